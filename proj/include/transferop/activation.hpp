#pragma once

#include <cstdint>
#include <string_view>

#include "transferop/types.hpp"

namespace transferop {

enum class ActivationKind : std::uint32_t { Tanh = 0, Relu = 1, Gaussian = 2 };

/// Pointwise nonlinearity with analytic first and second derivatives.
/// Gaussian is exp(-z²); tanh and Gaussian are bounded by 1 in magnitude.
class Activation {
 public:
  constexpr Activation() = default;
  constexpr explicit Activation(ActivationKind kind) : kind_(kind) {}

  static Activation parse(std::string_view name);

  ActivationKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;
  bool twice_differentiable() const noexcept { return kind_ != ActivationKind::Relu; }

  double value(double z) const noexcept;
  double first(double z) const noexcept;
  double second(double z) const noexcept;

  /// In-place σ(z) over a block, vectorized where the kind allows.
  void apply(Eigen::Ref<Matrix> z) const;
  /// z ← σ(z) and deriv ← σ′(z) (deriv is resized).
  void apply_with_derivative(Eigen::Ref<Matrix> z, Matrix& deriv) const;

  friend bool operator==(Activation, Activation) = default;

 private:
  ActivationKind kind_ = ActivationKind::Tanh;
};

}  // namespace transferop
