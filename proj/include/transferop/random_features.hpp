#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "transferop/activation.hpp"
#include "transferop/types.hpp"

namespace transferop {

enum class WeightFamily : std::uint32_t { Normal = 0, Uniform = 1 };

WeightFamily parse_weight_family(std::string_view name);
std::string_view to_string(WeightFamily family) noexcept;

/// Hidden-weight distribution. Weights are zero-mean with standard deviation
/// weight_scale/√fan_in (a uniform family uses the matching half-width);
/// biases are uniform on [-bias_scale, bias_scale].
struct Distribution {
  WeightFamily family = WeightFamily::Normal;
  double weight_scale = 1.0;
  double bias_scale = 1.0;
};

struct RandomLayer {
  Matrix weights;  ///< outputs × inputs
  Vector bias;
  std::uint64_t seed = 0;
  Distribution distribution;

  Index inputs() const noexcept { return weights.cols(); }
  Index outputs() const noexcept { return weights.rows(); }
};

/// Draws one layer. Entries are generated row-major, weights before biases,
/// from a single stream seeded with `seed`.
RandomLayer sample_layer(Index inputs, Index outputs, const Distribution& dist, std::uint64_t seed);

/// Real-valued function of a point, e.g. a potential V(x).
using ScalarField = std::function<double(std::span<const double>)>;

/// Frozen stack of affine layers, each followed by the activation.
class RandomFeatureMap {
 public:
  RandomFeatureMap(std::vector<RandomLayer> layers, Activation activation, std::uint64_t seed = 0,
                   Distribution distribution = {});

  /// Samples a map whose layer l uses stream derive_seed(seed, l).
  static RandomFeatureMap sample(Index input_dim, std::span<const Index> widths,
                                 Activation activation, const Distribution& distribution,
                                 std::uint64_t seed);

  Index input_dim() const noexcept { return layers_.front().inputs(); }
  Index output_dim() const noexcept { return layers_.back().outputs(); }
  Index depth() const noexcept { return static_cast<Index>(layers_.size()); }
  const std::vector<RandomLayer>& layers() const noexcept { return layers_; }
  Activation activation() const noexcept { return activation_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const Distribution& distribution() const noexcept { return distribution_; }

  /// R(X) for a d×m matrix of points; returns N×m.
  Matrix evaluate(const Matrix& x) const;

  /// (HR)(X) with H = -(ħ²/2m)Δ + V. Only single-layer maps with a twice
  /// differentiable activation are supported.
  Matrix evaluate_hamiltonian(const Matrix& x, const ScalarField& potential, double hbar,
                              double mass) const;

  /// Copy of this map with one more layer appended.
  RandomFeatureMap with_layer(RandomLayer layer) const;

 private:
  std::vector<RandomLayer> layers_;
  Activation activation_;
  std::uint64_t seed_ = 0;
  Distribution distribution_;
};

}  // namespace transferop
