#pragma once

#include <Eigen/Dense>

namespace vibronic {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
/// Least-squares subproblems use column-pivoted QR on the passive columns.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = -1,
                double tolerance = -1.0);

}  // namespace vibronic
