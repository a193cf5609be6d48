#pragma once

#include <Eigen/Dense>

namespace transferop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace transferop
