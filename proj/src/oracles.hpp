#pragma once

// Reference computations that share no code with the solvers they check.
// Used by the acceptance runner and the unit tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ellrad::oracle {

/// Orthonormal basis of ker(a) from a full SVD (assumes full row rank).
inline Eigen::MatrixXd svd_kernel(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::Index rank = std::min(a.rows(), a.cols());
  return svd.matrixV().rightCols(a.cols() - rank);
}

/// max ||x|| over x in E_sigma with g x = 0, sigma > 0: sqrt of the top
/// eigenvalue of K^T D^2 K, K a kernel basis of g D.
inline double section_radius(const Eigen::MatrixXd& g, const Eigen::VectorXd& sigma) {
  const Eigen::MatrixXd k = svd_kernel(g * sigma.asDiagonal());
  if (k.cols() == 0) return 0.0;
  const Eigen::MatrixXd dk = sigma.asDiagonal() * k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dk.transpose() * dk, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

/// max x_k (one-based k) over x = L w in ker g with x^T D^-2 x <= 1. The
/// Lagrange conditions give sqrt(c^T M^-1 c), c = L^T e_k, M = B^T B with
/// B = D^-1 L; M^-1 is applied through a QR of B with its rows ordered by
/// decreasing weight.
inline double coordinate_radius(const Eigen::MatrixXd& g, const Eigen::VectorXd& sigma, int k) {
  const Eigen::MatrixXd l = svd_kernel(g);
  if (l.cols() == 0) return 0.0;
  const Eigen::Index m = sigma.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return sigma(a) < sigma(b); });
  Eigen::MatrixXd b(m, l.cols());
  for (Eigen::Index r = 0; r < m; ++r) b.row(r) = l.row(order[static_cast<std::size_t>(r)]) / sigma(order[static_cast<std::size_t>(r)]);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(l.cols()).triangularView<Eigen::Upper>();
  const Eigen::VectorXd c = l.row(k - 1).transpose();
  const Eigen::VectorXd y = r.transpose().triangularView<Eigen::Lower>().solve(c);
  return y.norm();
}

}  // namespace ellrad::oracle
