#pragma once

#include "ellrad/sequences.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ellrad {

enum class Verdict { consistent, violated, inconclusive };
const char* to_string(Verdict verdict);

/// Monte Carlo frequency of a tail event against the probability an inequality
/// claims for it.
///
/// verdict is `violated` only when the one-sided 95% Clopper-Pearson lower
/// bound on the frequency exceeds `claimed_bound`; otherwise `inconclusive`
/// when claimed_bound < 5 / trials; otherwise `consistent`.
struct TailCheck {
  std::string name;
  std::int64_t trials = 0;
  std::int64_t hits = 0;
  double threshold = 0.0;
  double claimed_bound = 0.0;  // clamped to [0, 1]
  double raw_bound = 0.0;      // formula value before clamping
  double empirical_freq = 0.0;
  double lower_conf_95 = 0.0;
  double upper_conf_95 = 0.0;
  Verdict verdict = Verdict::consistent;
  bool vacuous = false;  // raw_bound >= 1 or the event is empty by construction
};

/// One-sided 95% Clopper-Pearson bounds for `hits` successes in `trials`.
double clopper_pearson_upper(std::int64_t hits, std::int64_t trials, double level = 0.95);
double clopper_pearson_lower(std::int64_t hits, std::int64_t trials, double level = 0.95);

TailCheck make_tail_check(std::string name, std::int64_t trials, std::int64_t hits,
                          double threshold, double raw_bound);

/// Evaluates stat(trial_seed) for every trial, trial_seed = derive_seed(seed, trial).
/// The result is ordered by trial index whatever the thread count.
std::vector<double> sample_statistic(std::int64_t trials, std::uint64_t seed, int threads,
                                     const std::function<double(std::uint64_t)>& stat);

/// sum u_j^2 with u_j ~ N(0, a_j), against (1 -+ delta) sum a_j.
std::pair<TailCheck, TailCheck> check_laurent_massart(const std::vector<double>& a, double delta,
                                                      std::int64_t trials, std::uint64_t seed,
                                                      int threads = 1);

/// s_k(G_{n,k}) <= sqrt(n) / 7 with k = floor(n / 2), claimed exp(-n / 100).
TailCheck check_davidson_szarek(std::int64_t n, std::int64_t trials, std::uint64_t seed,
                                int threads = 1);
/// s_k(G_{n,k}) <= sqrt(n) (1 - sqrt(k / n) - t), claimed exp(-n t^2 / 2).
TailCheck check_davidson_szarek(std::int64_t n, std::int64_t k, double t, std::int64_t trials,
                                std::uint64_t seed, int threads = 1);

/// s_n(G_{n,n}) <= t / sqrt(n), claimed t sqrt(2e).
TailCheck check_szarek(std::int64_t n, double t, std::int64_t trials, std::uint64_t seed,
                       int threads = 1);

/// s_1(Sigma_{[n], j>k}) > bvh_threshold(seq, n, k, c) (strict: an empty tail never
/// counts), claimed exp(-c^2 n).
TailCheck check_bvh(const SemiAxes& seq, std::int64_t n, std::int64_t k, double c,
                    std::int64_t trials, std::uint64_t seed, int threads = 1);

/// s_n(A) <= sqrt((1-delta)||a||_1) - sqrt((1+delta) n ||a||_inf) for A with
/// independent rows of variances a_i, claimed
/// 4 exp(-(delta^2 / 16) min(n, ||a||_1 / ||a||_inf)).
TailCheck check_smin_basic(const std::vector<double>& a, std::int64_t n, double delta,
                           std::int64_t trials, std::uint64_t seed, int threads = 1);

/// Per c: P[s_n(A) < c] against 2 P[||D u||_2 - sqrt(||a||_inf) ||v||_2 <= c],
/// D = diag(sqrt(a)), u ~ N(0, I_m), v ~ N(0, I_n), both sides from
/// independent seed streams. claimed_bound = min(1, 2 * rhs frequency);
/// violated when the lhs lower band exceeds min(1, 2 * rhs upper band).
std::vector<std::pair<double, TailCheck>> check_gordon_comparison(
    const std::vector<double>& a, std::int64_t n, const std::vector<double>& c_grid,
    std::int64_t trials, std::uint64_t seed, int threads = 1);

}  // namespace ellrad
