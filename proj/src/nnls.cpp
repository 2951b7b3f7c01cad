#include "vibronic/nnls.hpp"

#include <limits>
#include <vector>

namespace vibronic {
namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (passive[j]) cols.push_back(j);
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
  const Eigen::VectorXd zp = sub.colPivHouseholderQr().solve(b);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(a.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) z[cols[c]] = zp[static_cast<Eigen::Index>(c)];
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations,
                double tolerance) {
  const Eigen::Index n = a.cols();
  if (max_iterations < 0) max_iterations = static_cast<int>(3 * n + 30);
  if (tolerance < 0.0)
    tolerance = 10.0 * std::numeric_limits<double>::epsilon() * a.norm() * std::max<Eigen::Index>(a.rows(), n) *
                std::max(1.0, b.norm());

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd w = a.transpose() * (b - a * out.x);

  while (out.iterations < max_iterations) {
    // Most violated dual among active (clamped) variables.
    Eigen::Index best = -1;
    double best_w = tolerance;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) {
      out.converged = true;
      break;
    }
    passive[best] = true;

    for (;;) {
      ++out.iterations;
      Eigen::VectorXd z = solve_passive(a, b, passive);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) feasible = false;
      if (feasible) {
        out.x = z;
        break;
      }
      // Step back towards the previous feasible point until a variable hits zero.
      double alpha = 1.0;
      Eigen::Index blocking = -1;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) {
          const double step = out.x[j] / (out.x[j] - z[j]);
          if (blocking < 0 || step < alpha) {
            alpha = step;
            blocking = j;
          }
        }
      out.x += alpha * (z - out.x);
      out.x[blocking] = 0.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && out.x[j] <= 0.0) {
          passive[j] = false;
          out.x[j] = 0.0;
        }
      if (out.iterations >= max_iterations) break;
    }
    w = a.transpose() * (b - a * out.x);
  }
  out.residual_norm = (a * out.x - b).norm();
  return out;
}

}  // namespace vibronic
