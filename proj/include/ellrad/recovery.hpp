#pragma once

#include "ellrad/geometry.hpp"
#include "ellrad/randmat.hpp"
#include "ellrad/sequences.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace ellrad {

/// Least-squares estimator with coordinate budget k (1 <= k <= n).
struct EstimatorSpec {
  std::int64_t k = 1;
  double rank_tol = -1.0;  // relative cutoff on the pivots of G_{n,k}; <= 0: max(n,k) * eps
};

/// A_n = iota * psi^+ * G_n, with psi = G_{n,k} (the first k columns) and iota
/// the embedding of R^k into the first k coordinates of R^m.
///
/// Throws RankDeficientError when G_{n,k} does not have numerical rank k.
class LeastSquaresEstimator {
 public:
  LeastSquaresEstimator(const GaussianInfo& g, const EstimatorSpec& spec);

  std::int64_t k() const noexcept { return k_; }
  /// psi^+ as a k x n matrix.
  const Eigen::MatrixXd& pseudo_inverse() const noexcept { return pinv_; }
  /// Smallest singular value of G_{n,k}.
  double smallest_singular_value() const noexcept { return smin_; }

  /// A_n(x) for x in R^m.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

 private:
  GaussianInfo g_;
  std::int64_t k_;
  Eigen::MatrixXd pinv_;
  double smin_ = 0.0;
};

Eigen::VectorXd apply_estimator(const GaussianInfo& g, const EstimatorSpec& spec,
                                const Eigen::VectorXd& x);

struct ErrorResult {
  double value = 0.0;
  SolveMethod method = SolveMethod::dense;
  int iterations = 0;
  double residual = 0.0;
};

/// e(A_n) = sup_{x in E_sigma} ||A_n x - x||_2 = s_1(iota psi^+ Sigma - D).
/// Throws RankDeficientError / NumericalError.
ErrorResult worst_case_error_detail(const SemiAxes& seq, const GaussianInfo& g,
                                    const EstimatorSpec& spec, const SolverOptions& opts = {});
double worst_case_error(const SemiAxes& seq, const GaussianInfo& g, const EstimatorSpec& spec,
                        const SolverOptions& opts = {});

/// Radius of optimal information: sigma_{n+1}.
double optimal_radius(const SemiAxes& seq, std::int64_t n);

}  // namespace ellrad
