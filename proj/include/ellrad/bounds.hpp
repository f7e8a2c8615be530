#pragma once

#include "ellrad/geometry.hpp"
#include "ellrad/randmat.hpp"
#include "ellrad/sequences.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>

namespace ellrad {

enum class BoundDirection { upper, lower };

/// One closed-form bound: its value `rhs`, the probability with which it may
/// fail, and (once `check` is called) the quantity it bounds. `claimed_failure_prob` is the raw formula value and may exceed 1;
/// such reports are `vacuous`.
struct BoundReport {
  std::string name;
  BoundDirection direction = BoundDirection::upper;
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = 0.0;
  bool evaluated = false;
  bool holds = false;
  bool applicable = true;
  double claimed_failure_prob = 0.0;
  std::map<std::string, double> params;

  bool vacuous() const noexcept { return claimed_failure_prob >= 1.0; }
  /// Records lhs and sets `holds` (lhs <= rhs for upper bounds, >= for lower).
  BoundReport& check(double value);
};

/// Radius bound holding with probability >= 1 - 2 exp(-n/100):
/// rhs = 221 / sqrt(n) * (sum_{j >= floor(n/4)} sigma_j^2)^(1/2).
BoundReport ub_main(const SemiAxes& seq, std::int64_t n);

/// rhs = 14 s n (sum_{j>n} sigma_j^2)^(1/2), failing with probability at most
/// exp(-c^2 n) + c sqrt(2e) / s.
BoundReport ub_exponential(const SemiAxes& seq, std::int64_t n, double c, double s);

/// Lower bound sigma_k (1 - eps) for the smallest k with
/// sum_{j>k} sigma_j^2 >= 3 n sigma_k^2 / eps^2; failure probability
/// 5 exp(-n/64). Not applicable (rhs 0) when no k qualifies.
BoundReport lb_main(const SemiAxes& seq, std::int64_t n, double eps);

/// Deterministic bound on one realization, valid whenever G_{n,k} has full
/// rank: e(A_n) <= sigma_{k+1} + s_1(Sigma_{[n], j>k}) / s_k(G_{n,k}).
/// lhs is the estimator's worst-case error.
BoundReport realization_ub(const SemiAxes& seq, const GaussianInfo& g, std::int64_t k,
                           const SolverOptions& opts = {});
/// Same, with lhs supplied by the caller (already computed e(A_n)).
BoundReport realization_ub(const SemiAxes& seq, const GaussianInfo& g, std::int64_t k,
                           double error_an);

/// (3/2) sqrt(sum_{j>k} sigma_j^2) + 11 c sigma_{k+1} sqrt(n): s_1 of
/// Sigma_{[n], j>k} exceeds it with probability at most exp(-c^2 n).
double bvh_threshold(const SemiAxes& seq, std::int64_t n, std::int64_t k, double c);

/// Largest singular value of Sigma_{[n], j>k} for one realization.
double tail_block_norm(const SemiAxes& seq, const GaussianInfo& g, std::int64_t k);

/// a_n = sqrt(2) Gamma((n+1)/2) / Gamma(n/2) = E ||g||_2 for g ~ N(0, I_n).
double gordon_an(std::int64_t n);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Half mean width of E_sigma: mean of sqrt(sum sigma_j^2 u_j^2) over uniform
/// directions u on the sphere.
MonteCarloEstimate mstar_estimate(const SemiAxes& seq, std::int64_t samples, std::uint64_t seed);

/// Overestimate of M*(K_rho), K_rho = E_sigma intersected with rho B_2 and
/// k rho^2 = sum_{j>k} sigma_j^2, via the support-function bound
/// h^2(u) <= 2 rho^2 sum_{j<=k} u_j^2 + 2 sum_{j>k} sigma_j^2 u_j^2.
MonteCarloEstimate mstar_truncated_estimate(const SemiAxes& seq, std::int64_t k,
                                            std::int64_t samples, std::uint64_t seed);

/// Low-M* bound for the section of K_rho: rhs = a_m M*(K_rho) / (gamma a_n),
/// failure probability (7/2) exp(-(1-gamma)^2 a_n^2 / 18). The bounded
/// quantity is rad(K_rho cap ker G) = min(R_n, rho); use `mstar_section_check`.
BoundReport mstar_section_bound(const SemiAxes& seq, std::int64_t n, double gamma, std::int64_t k,
                                double mstar_rho);
/// Evaluates the report against a section radius R_n of E_sigma.
BoundReport& mstar_section_check(BoundReport& report, double section_radius);

/// sqrt(eps c^2 / (1 + eps c^2)) with c = sigma_m m^alpha: lower bound on R_n
/// holding with probability >= 1 - eps whenever n < m^(1 - 2 alpha).
double elementary_lb(std::int64_t m, std::int64_t n, double eps, double sigma_m, double alpha);
/// Report form of elementary_lb for a sequence (uses sigma_m of `seq`).
BoundReport elementary_lb_report(const SemiAxes& seq, std::int64_t n, double eps, double alpha);

/// sum_{j>m} sigma_j^2 / sum_{j>k} sigma_j^2 (neglected mass relative to the
/// tail a bound uses).
double neglected_tail_ratio(const SemiAxes& seq, std::int64_t k);

}  // namespace ellrad
