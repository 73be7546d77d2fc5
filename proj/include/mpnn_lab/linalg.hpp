#pragma once

#include <Eigen/Dense>

namespace mpnn_lab {

// Node-feature matrices are row-major: row i is the feature vector of node i.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace mpnn_lab
