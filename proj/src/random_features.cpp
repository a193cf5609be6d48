#include "transferop/random_features.hpp"

#include <cmath>
#include <string>

#include "transferop/error.hpp"
#include "transferop/kernels.hpp"
#include "transferop/rng.hpp"

namespace transferop {

WeightFamily parse_weight_family(std::string_view name) {
  if (name == "normal") return WeightFamily::Normal;
  if (name == "uniform") return WeightFamily::Uniform;
  fail(ErrorKind::InvalidArgument, "unknown weight distribution '" + std::string(name) + "'");
}

std::string_view to_string(WeightFamily family) noexcept {
  return family == WeightFamily::Uniform ? "uniform" : "normal";
}

RandomLayer sample_layer(Index inputs, Index outputs, const Distribution& dist, std::uint64_t seed) {
  require(inputs >= 1 && outputs >= 1, ErrorKind::InvalidShape, "layer widths must be positive");
  require(std::isfinite(dist.weight_scale) && dist.weight_scale >= 0.0 &&
              std::isfinite(dist.bias_scale) && dist.bias_scale >= 0.0,
          ErrorKind::InvalidArgument, "distribution scales must be finite and nonnegative");
  RandomLayer layer;
  layer.seed = seed;
  layer.distribution = dist;
  layer.weights.resize(outputs, inputs);
  layer.bias.resize(outputs);

  Rng rng(seed);
  const double std_dev = dist.weight_scale / std::sqrt(static_cast<double>(inputs));
  const double half_width = std_dev * std::sqrt(3.0);
  for (Index i = 0; i < outputs; ++i)
    for (Index j = 0; j < inputs; ++j)
      layer.weights(i, j) = dist.family == WeightFamily::Normal
                                ? std_dev * rng.normal()
                                : rng.uniform(-half_width, half_width);
  for (Index i = 0; i < outputs; ++i) layer.bias(i) = rng.uniform(-dist.bias_scale, dist.bias_scale);
  return layer;
}

RandomFeatureMap::RandomFeatureMap(std::vector<RandomLayer> layers, Activation activation,
                                   std::uint64_t seed, Distribution distribution)
    : layers_(std::move(layers)), activation_(activation), seed_(seed), distribution_(distribution) {
  require(!layers_.empty(), ErrorKind::InvalidShape, "a feature map needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const RandomLayer& layer = layers_[l];
    require(layer.outputs() >= 1 && layer.inputs() >= 1, ErrorKind::InvalidShape,
            "layer " + std::to_string(l) + " has zero width");
    require(layer.bias.size() == layer.outputs(), ErrorKind::InvalidShape,
            "layer " + std::to_string(l) + " bias length does not match its width");
    require(layer.weights.allFinite() && layer.bias.allFinite(), ErrorKind::InvalidArgument,
            "layer " + std::to_string(l) + " has non-finite entries");
    if (l > 0)
      require(layer.inputs() == layers_[l - 1].outputs(), ErrorKind::InvalidShape,
              "layer " + std::to_string(l) + " does not chain with the previous layer");
  }
}

RandomFeatureMap RandomFeatureMap::sample(Index input_dim, std::span<const Index> widths,
                                          Activation activation, const Distribution& distribution,
                                          std::uint64_t seed) {
  require(input_dim >= 1, ErrorKind::InvalidShape, "input dimension must be positive");
  require(!widths.empty(), ErrorKind::InvalidShape, "at least one layer width is required");
  std::vector<RandomLayer> layers;
  Index fan_in = input_dim;
  for (std::size_t l = 0; l < widths.size(); ++l) {
    require(widths[l] >= 1, ErrorKind::InvalidShape,
            "layer width " + std::to_string(l) + " must be positive");
    layers.push_back(sample_layer(fan_in, widths[l], distribution, derive_seed(seed, l)));
    fan_in = widths[l];
  }
  return RandomFeatureMap(std::move(layers), activation, seed, distribution);
}

Matrix RandomFeatureMap::evaluate(const Matrix& x) const {
  require(x.allFinite(), ErrorKind::InvalidArgument, "input points are not finite");
  return kernels::feature_map(layers_, activation_, x);
}

Matrix RandomFeatureMap::evaluate_hamiltonian(const Matrix& x, const ScalarField& potential,
                                              double hbar, double mass) const {
  require(activation_.twice_differentiable(), ErrorKind::UnsupportedActivation,
          std::string(activation_.name()) + " has no second derivative");
  require(layers_.size() == 1, ErrorKind::UnsupportedDepth,
          "the Hamiltonian is only available for single-layer maps");
  require(mass > 0.0 && std::isfinite(hbar), ErrorKind::InvalidArgument,
          "mass must be positive and hbar finite");
  require(x.allFinite(), ErrorKind::InvalidArgument, "input points are not finite");
  return kernels::hamiltonian_features(layers_.front(), activation_, x, potential,
                                       hbar * hbar / (2.0 * mass));
}

RandomFeatureMap RandomFeatureMap::with_layer(RandomLayer layer) const {
  std::vector<RandomLayer> layers = layers_;
  layers.push_back(std::move(layer));
  return RandomFeatureMap(std::move(layers), activation_, seed_, distribution_);
}

}  // namespace transferop
