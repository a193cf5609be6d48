#include "transferop/activation.hpp"

#include <cmath>
#include <string>

#include "transferop/error.hpp"

namespace transferop {

Activation Activation::parse(std::string_view name) {
  if (name == "tanh") return Activation(ActivationKind::Tanh);
  if (name == "relu") return Activation(ActivationKind::Relu);
  if (name == "gaussian") return Activation(ActivationKind::Gaussian);
  fail(ErrorKind::InvalidArgument, "unknown activation '" + std::string(name) + "'");
}

std::string_view Activation::name() const noexcept {
  switch (kind_) {
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::Relu: return "relu";
    case ActivationKind::Gaussian: return "gaussian";
  }
  return "tanh";
}

double Activation::value(double z) const noexcept {
  switch (kind_) {
    case ActivationKind::Tanh: return std::tanh(z);
    case ActivationKind::Relu: return z > 0.0 ? z : 0.0;
    case ActivationKind::Gaussian: return std::exp(-z * z);
  }
  return 0.0;
}

double Activation::first(double z) const noexcept {
  switch (kind_) {
    case ActivationKind::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case ActivationKind::Relu: return z > 0.0 ? 1.0 : 0.0;
    case ActivationKind::Gaussian: return -2.0 * z * std::exp(-z * z);
  }
  return 0.0;
}

double Activation::second(double z) const noexcept {
  switch (kind_) {
    case ActivationKind::Tanh: {
      const double t = std::tanh(z);
      return -2.0 * t * (1.0 - t * t);
    }
    case ActivationKind::Relu: return 0.0;
    case ActivationKind::Gaussian: return (4.0 * z * z - 2.0) * std::exp(-z * z);
  }
  return 0.0;
}

void Activation::apply(Eigen::Ref<Matrix> z) const {
  auto a = z.array();
  switch (kind_) {
    case ActivationKind::Tanh:
      // Eigen vectorizes exp but not tanh for doubles.
      a = 1.0 - 2.0 / ((2.0 * a).exp() + 1.0);
      break;
    case ActivationKind::Relu:
      a = a.max(0.0);
      break;
    case ActivationKind::Gaussian:
      a = (-a.square()).exp();
      break;
  }
}

void Activation::apply_with_derivative(Eigen::Ref<Matrix> z, Matrix& deriv) const {
  switch (kind_) {
    case ActivationKind::Tanh:
      apply(z);
      deriv = (1.0 - z.array().square()).matrix();
      break;
    case ActivationKind::Relu:
      deriv = (z.array() > 0.0).cast<double>().matrix();
      apply(z);
      break;
    case ActivationKind::Gaussian:
      deriv = z;
      apply(z);
      deriv = (-2.0 * deriv.array() * z.array()).matrix();
      break;
  }
}

}  // namespace transferop
