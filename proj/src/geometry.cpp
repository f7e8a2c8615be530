#include "ellrad/geometry.hpp"

#include "ellrad/philox.hpp"

#include <algorithm>
#include <stdexcept>

namespace ellrad {
namespace {

void check_dims(const SemiAxes& seq, const GaussianInfo& g) {
  if (g.m() != seq.m())
    throw std::invalid_argument("Gaussian information has m = " + std::to_string(g.m()) +
                                " but the sequence has m = " + std::to_string(seq.m()));
}

std::span<const double> support_values(const SemiAxes& seq) {
  return seq.values().first(static_cast<std::size_t>(seq.support()));
}

}  // namespace

const char* to_string(SolveMethod method) {
  return method == SolveMethod::dense ? "dense" : "iterative";
}

SectionRadius section_radius(const SemiAxes& seq, const GaussianInfo& g,
                             const SolverOptions& opts) {
  check_dims(seq, g);
  SectionRadius out;
  out.n = g.n();
  out.m = g.m();
  const std::int64_t support = seq.support();
  const auto sigma = support_values(seq);
  const bool dense = opts.method ? *opts.method == SolveMethod::dense
                                 : support <= static_cast<std::int64_t>(opts.dense_cap);
  out.method = dense ? SolveMethod::dense : SolveMethod::iterative;

  if (g.n() == 0) {
    out.value = seq.sigma(1);
    return out;
  }
  if (g.n() >= support) {
    out.degenerate = true;
    return out;
  }

  const Eigen::MatrixXd weighted = g.block(0, g.n(), 0, support, sigma);
  if (dense) {
    const Eigen::MatrixXd kernel = kernel_basis(weighted);
    if (kernel.cols() == 0) {
      out.degenerate = true;
      return out;
    }
    const Eigen::Map<const Eigen::VectorXd> d(sigma.data(), support);
    const Eigen::MatrixXd scaled = d.asDiagonal() * kernel;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
    out.value = svd.singularValues()(0);
    return out;
  }

  const KernelProjector projector(weighted);
  if (projector.kernel_dim() == 0) {
    out.degenerate = true;
    return out;
  }
  IterativeOptions iopts;
  iopts.tol = opts.tol;
  iopts.max_iter = opts.max_iter;
  iopts.seed = derive_seed(opts.start_seed, g.seed(), static_cast<std::uint64_t>(g.n()));
  const IterativeResult res = top_sv_of_projected_diag(projector, sigma, iopts);
  out.iterations = res.iterations;
  out.residual = res.residual;
  out.value = res.value;
  if (!res.converged)
    throw NumericalError("section radius did not converge", res.iterations, res.residual,
                         res.value);
  return out;
}

double coordinate_radius(const SemiAxes& seq, const GaussianInfo& g, std::int64_t k) {
  check_dims(seq, g);
  if (k < 1 || k > seq.m()) throw std::invalid_argument("coordinate index must lie in [1, m]");
  const double sk = seq.sigma(k);
  if (sk == 0.0) return 0.0;
  if (g.n() == 0) return sk;
  const std::int64_t support = seq.support();
  if (g.n() >= support) return 0.0;
  const Eigen::MatrixXd weighted = g.block(0, g.n(), 0, support, support_values(seq));
  const KernelProjector projector(weighted);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(support);
  e(k - 1) = 1.0;
  projector.apply_in_place(e);
  return sk * e.norm();
}

double ball_coordinate_sq(const GaussianInfo& g) {
  if (g.n() >= g.m()) throw std::invalid_argument("ball_coordinate_sq needs n < m");
  if (g.n() == 0) return 1.0;
  const KernelProjector projector(g.block(0, g.n(), 0, g.m()));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(g.m());
  e(0) = 1.0;
  projector.apply_in_place(e);
  return e.squaredNorm();
}

}  // namespace ellrad
