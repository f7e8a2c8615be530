#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace ellrad {

/// y <- Op(x). Sizes are fixed by the caller.
using LinearMap = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct IterativeOptions {
  double tol = 1e-10;       // relative accuracy target for the singular value
  int max_iter = 0;         // 0: 10 * number of columns
  int max_basis = 64;       // Krylov vectors kept before an explicit restart
  std::uint64_t seed = 0x5eedu;
  double noise_scale = 0.0;  // magnitude of the unprojected operator, sets the rounding floor
};

struct IterativeResult {
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;    // ||A^T u - s v|| for the returned triplet
  bool converged = false;
};

/// Largest singular value of an operator A: R^cols -> R^rows, by
/// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization and
/// explicit restarts from the current top Ritz vector.
///
/// Works on A itself, not A^T A: the absolute error is eps * ||A||, not
/// eps * ||A||^2.
///
/// The iteration starts from a Gaussian vector drawn from `opts.seed`;
/// `project` (optional) maps the start and restart
/// vectors into the subspace of interest; A^T must already map into it.
IterativeResult top_singular_value(const LinearMap& apply, const LinearMap& apply_transpose,
                                   Eigen::Index rows, Eigen::Index cols,
                                   const IterativeOptions& opts,
                                   const LinearMap& project = {});

}  // namespace ellrad
