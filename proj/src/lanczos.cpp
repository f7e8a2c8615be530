#include "ellrad/lanczos.hpp"

#include "ellrad/philox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ellrad {
namespace {

// Two passes of classical Gram-Schmidt against the first `count` columns.
void reorthogonalize(const Eigen::MatrixXd& basis, Eigen::Index count, Eigen::VectorXd& w) {
  if (count == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd coeffs = basis.leftCols(count).transpose() * w;
    w.noalias() -= basis.leftCols(count) * coeffs;
  }
}

struct RitzInfo {
  double top = 0.0;
  double second = 0.0;
  double last_left = 0.0;           // last component of the top left vector
  Eigen::VectorXd right;            // top right singular vector of B
};

RitzInfo ritz(const std::vector<double>& alpha, const std::vector<double>& beta, Eigen::Index k) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    b(i, i) = alpha[i];
    if (i + 1 < k) b(i, i + 1) = beta[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  RitzInfo info;
  info.top = svd.singularValues()(0);
  info.second = k > 1 ? svd.singularValues()(1) : 0.0;
  info.last_left = svd.matrixU()(k - 1, 0);
  info.right = svd.matrixV().col(0);
  return info;
}

}  // namespace

IterativeResult top_singular_value(const LinearMap& apply, const LinearMap& apply_transpose,
                                   Eigen::Index rows, Eigen::Index cols,
                                   const IterativeOptions& opts, const LinearMap& project) {
  IterativeResult result;
  if (rows == 0 || cols == 0) {
    result.converged = true;
    return result;
  }
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * cols);
  const Eigen::Index basis_cap =
      std::max<Eigen::Index>(1, std::min<Eigen::Index>({opts.max_basis, rows, cols}));
  constexpr double kEps = std::numeric_limits<double>::epsilon();

  Eigen::VectorXd v(cols);
  for (Eigen::Index i = 0; i < cols; ++i)
    v(i) = normal_at(opts.seed, 0x1A2Cu, static_cast<std::uint64_t>(i));
  if (project) {
    Eigen::VectorXd tmp = v;
    project(tmp, v);
  }
  double vnorm = v.norm();
  if (vnorm == 0.0) {
    result.converged = true;
    return result;
  }
  v /= vnorm;

  Eigen::MatrixXd left(rows, basis_cap);
  Eigen::MatrixXd right(cols, basis_cap);
  Eigen::VectorXd u(rows);
  Eigen::VectorXd w(cols);
  std::vector<double> alpha;
  std::vector<double> beta;
  double scale = 0.0;

  while (true) {
    alpha.clear();
    beta.clear();
    right.col(0) = v;
    for (Eigen::Index j = 0; j < basis_cap; ++j) {
      apply(right.col(j), u);
      if (j > 0) u -= beta[j - 1] * left.col(j - 1);
      reorthogonalize(left, j, u);
      const double a = u.norm();
      alpha.push_back(a);
      if (a > 0.0) left.col(j) = u / a;
      else left.col(j).setZero();

      apply_transpose(left.col(j), w);
      w -= a * right.col(j);
      reorthogonalize(right, j + 1, w);
      const double b = w.norm();
      beta.push_back(b);
      ++result.iterations;

      scale = std::max({scale, a, b});
      const double floor = 64.0 * kEps * std::max(scale, opts.noise_scale);
      const bool invariant = b <= floor || a <= floor;
      const bool last = j + 1 == basis_cap || result.iterations >= max_iter;
      const bool check = invariant || last || j < 16 || (j % 4) == 3;
      if (check) {
        const RitzInfo info = ritz(alpha, beta, j + 1);
        const double theta = info.top;
        const double resid = invariant ? 0.0 : b * std::abs(info.last_left);
        const double gap = std::max(theta - info.second, 0.0);
        result.value = theta;
        result.residual = resid;
        const bool converged = invariant || resid <= opts.tol * theta || resid <= floor ||
                               (resid * resid <= opts.tol * theta * gap &&
                                resid <= std::sqrt(opts.tol) * theta);
        if (converged) {
          result.converged = true;
          return result;
        }
        if (result.iterations >= max_iter) return result;
        if (j + 1 == basis_cap) {
          v = right.leftCols(j + 1) * info.right;
          if (project) {
            Eigen::VectorXd tmp = v;
            project(tmp, v);
          }
          vnorm = v.norm();
          if (vnorm == 0.0) return result;
          v /= vnorm;
          break;
        }
      }
      right.col(j + 1) = w / b;
    }
  }
}

}  // namespace ellrad
