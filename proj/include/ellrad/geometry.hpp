#pragma once

#include "ellrad/randmat.hpp"
#include "ellrad/sequences.hpp"

#include <cstdint>
#include <optional>

namespace ellrad {

enum class SolveMethod { dense, iterative };

const char* to_string(SolveMethod method);

struct SolverOptions {
  /// Largest support size solved densely when `method` is not forced.
  Eigen::Index dense_cap = kDefaultDenseCap;
  double tol = 1e-10;
  int max_iter = 0;
  std::optional<SolveMethod> method;
  std::uint64_t start_seed = 0x5eedu;
};

/// Circumradius of E_sigma intersected with ker G for one realization.
struct SectionRadius {
  double value = 0.0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  SolveMethod method = SolveMethod::dense;
  int iterations = 0;
  double residual = 0.0;
  bool degenerate = false;  // kernel restricted to supp(sigma) is {0}
};

/// sup{ ||x||_2 : x in E_sigma, G x = 0 }.
///
/// Coordinates with sigma_j = 0 are removed first. With y = D^-1 x the value
/// is the top singular value of D on ker(G D): dense path via an explicit
/// kernel basis and SVD, iterative path via Golub-Kahan-Lanczos on D P.
/// Throws NumericalError if the iterative path does not converge.
SectionRadius section_radius(const SemiAxes& seq, const GaussianInfo& g,
                             const SolverOptions& opts = {});

/// sup{ |x_k| : x in E_sigma, G x = 0 } = sigma_k * ||P e_k||, P the
/// orthogonal projector onto ker(G D). k is one-based.
double coordinate_radius(const SemiAxes& seq, const GaussianInfo& g, std::int64_t k);

/// ||P e_1||^2 with P the projector onto ker G: the squared first-coordinate
/// radius of the unit ball. Expectation (m - n) / m.
double ball_coordinate_sq(const GaussianInfo& g);

}  // namespace ellrad
