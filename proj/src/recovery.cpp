#include "ellrad/recovery.hpp"

#include "ellrad/philox.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace ellrad {

LeastSquaresEstimator::LeastSquaresEstimator(const GaussianInfo& g, const EstimatorSpec& spec)
    : g_(g), k_(spec.k) {
  if (k_ < 1 || k_ > g.n())
    throw std::invalid_argument("estimator needs 1 <= k <= n (k = " + std::to_string(k_) +
                                ", n = " + std::to_string(g.n()) + ")");
  if (k_ > g.m()) throw std::invalid_argument("estimator needs k <= m");
  const Eigen::MatrixXd psi = g.block(0, g.n(), 0, k_);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(psi);
  const double tol = spec.rank_tol > 0.0
                         ? spec.rank_tol
                         : static_cast<double>(std::max<std::int64_t>(g.n(), k_)) *
                               std::numeric_limits<double>::epsilon();
  qr.setThreshold(tol);
  if (qr.rank() < k_)
    throw RankDeficientError("G_{n,k} has numerical rank " + std::to_string(qr.rank()) +
                                 " < k = " + std::to_string(k_),
                             qr.rank(), k_);
  pinv_ = qr.solve(Eigen::MatrixXd::Identity(g.n(), g.n()));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi);
  smin_ = svd.singularValues()(k_ - 1);
}

Eigen::VectorXd LeastSquaresEstimator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != g_.m()) throw std::invalid_argument("estimator input must have length m");
  const Eigen::VectorXd info = g_.block(0, g_.n(), 0, g_.m()) * x;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g_.m());
  out.head(k_) = pinv_ * info;
  return out;
}

Eigen::VectorXd apply_estimator(const GaussianInfo& g, const EstimatorSpec& spec,
                                const Eigen::VectorXd& x) {
  return LeastSquaresEstimator(g, spec).apply(x);
}

ErrorResult worst_case_error_detail(const SemiAxes& seq, const GaussianInfo& g,
                                    const EstimatorSpec& spec, const SolverOptions& opts) {
  if (g.m() != seq.m()) throw std::invalid_argument("G and sigma disagree on m");
  const LeastSquaresEstimator est(g, spec);
  const std::int64_t support = seq.support();
  const std::int64_t k = est.k();
  const auto sigma = seq.values().first(static_cast<std::size_t>(support));
  const Eigen::Map<const Eigen::VectorXd> d(sigma.data(), support);

  // Error operator on y (x = D y) restricted to supp(sigma), with
  // max(k, support) output rows: B = pad(psi^+ Sigma) - pad(D).
  const Eigen::MatrixXd reconstruct = est.pseudo_inverse() * g.block(0, g.n(), 0, support, sigma);
  const std::int64_t rows = std::max(k, support);

  ErrorResult out;
  const bool dense = opts.method ? *opts.method == SolveMethod::dense
                                 : support <= static_cast<std::int64_t>(opts.dense_cap);
  if (dense) {
    out.method = SolveMethod::dense;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(rows, support);
    b.topRows(k) = reconstruct;
    b.topLeftCorner(support, support).diagonal() -= d;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b);
    out.value = svd.singularValues()(0);
    return out;
  }

  out.method = SolveMethod::iterative;
  IterativeOptions iopts;
  iopts.tol = opts.tol;
  iopts.max_iter = opts.max_iter;
  iopts.seed = derive_seed(opts.start_seed, g.seed(), static_cast<std::uint64_t>(k), 0xE77u);
  iopts.noise_scale = std::max(seq.sigma(1), reconstruct.cwiseAbs().maxCoeff());
  const IterativeResult res = top_singular_value(
      [&](const Eigen::VectorXd& y, Eigen::VectorXd& z) {
        z = Eigen::VectorXd::Zero(rows);
        z.head(k).noalias() = reconstruct * y;
        z.head(support) -= d.cwiseProduct(y);
      },
      [&](const Eigen::VectorXd& z, Eigen::VectorXd& y) {
        y.noalias() = reconstruct.transpose() * z.head(k);
        y -= d.cwiseProduct(z.head(support));
      },
      rows, support, iopts);
  out.value = res.value;
  out.iterations = res.iterations;
  out.residual = res.residual;
  if (!res.converged)
    throw NumericalError("worst-case error did not converge", res.iterations, res.residual,
                         res.value);
  return out;
}

double worst_case_error(const SemiAxes& seq, const GaussianInfo& g, const EstimatorSpec& spec,
                        const SolverOptions& opts) {
  return worst_case_error_detail(seq, g, spec, opts).value;
}

double optimal_radius(const SemiAxes& seq, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("optimal_radius needs n >= 0");
  return seq.sigma(n + 1);
}

}  // namespace ellrad
