#pragma once

#include <Eigen/Dense>

namespace lgd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace lgd
