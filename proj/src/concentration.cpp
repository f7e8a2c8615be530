#include "ellrad/concentration.hpp"

#include "ellrad/bounds.hpp"
#include "ellrad/parallel.hpp"
#include "ellrad/philox.hpp"
#include "ellrad/randmat.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ellrad {
namespace {

void require_trials(std::int64_t trials, std::int64_t minimum, const char* what) {
  if (trials < minimum)
    throw std::invalid_argument(std::string(what) + " needs at least " +
                                std::to_string(minimum) + " trials");
}

template <typename Pred>
std::int64_t count_if(const std::vector<double>& values, Pred pred) {
  return std::count_if(values.begin(), values.end(), pred);
}

double smallest_sv(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues().minCoeff();
}

Eigen::MatrixXd gaussian(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  return GaussianInfo(seed, rows, cols).block(0, rows, 0, cols);
}

}  // namespace

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::consistent: return "consistent";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

double clopper_pearson_upper(std::int64_t hits, std::int64_t trials, double level) {
  if (trials <= 0 || hits < 0 || hits > trials) throw std::invalid_argument("bad binomial counts");
  if (hits == trials) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(hits + 1), static_cast<double>(trials - hits),
                                level);
}

double clopper_pearson_lower(std::int64_t hits, std::int64_t trials, double level) {
  if (trials <= 0 || hits < 0 || hits > trials) throw std::invalid_argument("bad binomial counts");
  if (hits == 0) return 0.0;
  return boost::math::ibeta_inv(static_cast<double>(hits), static_cast<double>(trials - hits + 1),
                                1.0 - level);
}

TailCheck make_tail_check(std::string name, std::int64_t trials, std::int64_t hits,
                          double threshold, double raw_bound) {
  TailCheck t;
  t.name = std::move(name);
  t.trials = trials;
  t.hits = hits;
  t.threshold = threshold;
  t.raw_bound = raw_bound;
  t.claimed_bound = std::clamp(raw_bound, 0.0, 1.0);
  t.empirical_freq = static_cast<double>(hits) / static_cast<double>(trials);
  t.lower_conf_95 = clopper_pearson_lower(hits, trials);
  t.upper_conf_95 = clopper_pearson_upper(hits, trials);
  t.vacuous = raw_bound >= 1.0;
  if (t.lower_conf_95 > t.claimed_bound)
    t.verdict = Verdict::violated;
  else if (t.claimed_bound < 5.0 / static_cast<double>(trials))
    t.verdict = Verdict::inconclusive;
  else
    t.verdict = Verdict::consistent;
  return t;
}

std::vector<double> sample_statistic(std::int64_t trials, std::uint64_t seed, int threads,
                                     const std::function<double(std::uint64_t)>& stat) {
  std::vector<double> out(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](std::int64_t t) {
    out[static_cast<std::size_t>(t)] = stat(derive_seed(seed, static_cast<std::uint64_t>(t)));
  });
  return out;
}

std::pair<TailCheck, TailCheck> check_laurent_massart(const std::vector<double>& a, double delta,
                                                      std::int64_t trials, std::uint64_t seed,
                                                      int threads) {
  require_trials(trials, 1000, "check_laurent_massart");
  if (a.empty() || std::any_of(a.begin(), a.end(), [](double x) { return !(x > 0.0); }))
    throw std::invalid_argument("weights must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  const double l1 = std::accumulate(a.begin(), a.end(), 0.0);
  const double linf = *std::max_element(a.begin(), a.end());
  const auto values = sample_statistic(trials, seed, threads, [&](std::uint64_t s) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double u = normal_at(s, 0, j);
      sum += a[j] * u * u;
    }
    return sum;
  });
  const double lo = (1.0 - delta) * l1;
  const double hi = (1.0 + delta) * l1;
  const double ratio = delta * delta * l1 / linf;
  auto lower = make_tail_check("laurent_massart_lower", trials,
                               count_if(values, [&](double v) { return v <= lo; }), lo,
                               std::exp(-ratio / 4.0));
  auto upper = make_tail_check("laurent_massart_upper", trials,
                               count_if(values, [&](double v) { return v >= hi; }), hi,
                               std::exp(-ratio / 16.0));
  return {lower, upper};
}

TailCheck check_davidson_szarek(std::int64_t n, std::int64_t trials, std::uint64_t seed,
                                int threads) {
  if (n < 2) throw std::invalid_argument("check_davidson_szarek needs n >= 2");
  require_trials(trials, 1, "check_davidson_szarek");
  const std::int64_t k = n / 2;
  const double threshold = std::sqrt(static_cast<double>(n)) / 7.0;
  const auto values = sample_statistic(trials, seed, threads, [&](std::uint64_t s) {
    return smallest_sv(gaussian(s, n, k));
  });
  return make_tail_check("davidson_szarek", trials,
                         count_if(values, [&](double v) { return v <= threshold; }), threshold,
                         std::exp(-static_cast<double>(n) / 100.0));
}

TailCheck check_davidson_szarek(std::int64_t n, std::int64_t k, double t, std::int64_t trials,
                                std::uint64_t seed, int threads) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("check_davidson_szarek needs 1 <= k <= n");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  require_trials(trials, 1, "check_davidson_szarek");
  const double nd = static_cast<double>(n);
  const double threshold = std::sqrt(nd) * (1.0 - std::sqrt(static_cast<double>(k) / nd) - t);
  const auto values = sample_statistic(trials, seed, threads, [&](std::uint64_t s) {
    return smallest_sv(gaussian(s, n, k));
  });
  return make_tail_check("davidson_szarek_general", trials,
                         count_if(values, [&](double v) { return v <= threshold; }), threshold,
                         std::exp(-nd * t * t / 2.0));
}

TailCheck check_szarek(std::int64_t n, double t, std::int64_t trials, std::uint64_t seed,
                       int threads) {
  if (n < 1) throw std::invalid_argument("check_szarek needs n >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  require_trials(trials, 1, "check_szarek");
  const double threshold = t / std::sqrt(static_cast<double>(n));
  const auto values = sample_statistic(trials, seed, threads, [&](std::uint64_t s) {
    return smallest_sv(gaussian(s, n, n));
  });
  return make_tail_check("szarek", trials,
                         count_if(values, [&](double v) { return v <= threshold; }), threshold,
                         t * std::sqrt(2.0 * std::numbers::e));
}

TailCheck check_bvh(const SemiAxes& seq, std::int64_t n, std::int64_t k, double c,
                    std::int64_t trials, std::uint64_t seed, int threads) {
  require_trials(trials, 1000, "check_bvh");
  if (n < 1) throw std::invalid_argument("check_bvh needs n >= 1");
  const double threshold = bvh_threshold(seq, n, k, c);
  const auto values = sample_statistic(trials, seed, threads, [&](std::uint64_t s) {
    return tail_block_norm(seq, GaussianInfo(s, n, seq.m()), k);
  });
  return make_tail_check("bvh", trials,
                         count_if(values, [&](double v) { return v > threshold; }), threshold,
                         std::exp(-c * c * static_cast<double>(n)));
}

TailCheck check_smin_basic(const std::vector<double>& a, std::int64_t n, double delta,
                           std::int64_t trials, std::uint64_t seed, int threads) {
  if (a.empty() || std::any_of(a.begin(), a.end(), [](double x) { return !(x > 0.0); }))
    throw std::invalid_argument("row variances must be positive");
  if (n < 1) throw std::invalid_argument("check_smin_basic needs n >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  require_trials(trials, 1, "check_smin_basic");
  const auto m = static_cast<Eigen::Index>(a.size());
  const double l1 = std::accumulate(a.begin(), a.end(), 0.0);
  const double linf = *std::max_element(a.begin(), a.end());
  const double threshold =
      std::sqrt((1.0 - delta) * l1) - std::sqrt((1.0 + delta) * static_cast<double>(n) * linf);
  const double raw =
      4.0 * std::exp(-delta * delta / 16.0 * std::min(static_cast<double>(n), l1 / linf));
  if (threshold <= 0.0) {
    // s_n(A) >= 0, so the event has probability 0 and nothing is tested.
    TailCheck t = make_tail_check("smin_basic", trials, 0, threshold, raw);
    t.vacuous = true;
    return t;
  }
  Eigen::VectorXd root(m);
  for (Eigen::Index i = 0; i < m; ++i) root(i) = std::sqrt(a[static_cast<std::size_t>(i)]);
  const auto values = sample_statistic(trials, seed, threads, [&](std::uint64_t s) {
    const Eigen::MatrixXd g = gaussian(s, m, n);
    return smallest_sv(root.asDiagonal() * g);
  });
  return make_tail_check("smin_basic", trials,
                         count_if(values, [&](double v) { return v <= threshold; }), threshold,
                         raw);
}

std::vector<std::pair<double, TailCheck>> check_gordon_comparison(
    const std::vector<double>& a, std::int64_t n, const std::vector<double>& c_grid,
    std::int64_t trials, std::uint64_t seed, int threads) {
  require_trials(trials, 1000, "check_gordon_comparison");
  if (a.empty() || std::any_of(a.begin(), a.end(), [](double x) { return !(x > 0.0); }))
    throw std::invalid_argument("row variances must be positive");
  if (n < 1) throw std::invalid_argument("check_gordon_comparison needs n >= 1");
  const auto m = static_cast<Eigen::Index>(a.size());
  const double linf = *std::max_element(a.begin(), a.end());
  Eigen::VectorXd root(m);
  for (Eigen::Index i = 0; i < m; ++i) root(i) = std::sqrt(a[static_cast<std::size_t>(i)]);

  const auto lhs = sample_statistic(trials, derive_seed(seed, 0x6D1u), threads,
                                    [&](std::uint64_t s) {
                                      if (n > m) return 0.0;
                                      return smallest_sv(root.asDiagonal() * gaussian(s, m, n));
                                    });
  const auto rhs = sample_statistic(trials, derive_seed(seed, 0x6D2u), threads,
                                    [&](std::uint64_t s) {
                                      double du = 0.0;
                                      for (Eigen::Index i = 0; i < m; ++i) {
                                        const double u = root(i) * normal_at(s, 0, i);
                                        du += u * u;
                                      }
                                      double v = 0.0;
                                      for (std::int64_t j = 0; j < n; ++j) {
                                        const double x = normal_at(s, 1, j);
                                        v += x * x;
                                      }
                                      return std::sqrt(du) - std::sqrt(linf) * std::sqrt(v);
                                    });

  std::vector<std::pair<double, TailCheck>> out;
  out.reserve(c_grid.size());
  for (const double c : c_grid) {
    const std::int64_t lhs_hits = count_if(lhs, [&](double v) { return v < c; });
    const std::int64_t rhs_hits = count_if(rhs, [&](double v) { return v <= c; });
    const double rhs_freq = static_cast<double>(rhs_hits) / static_cast<double>(trials);
    TailCheck t = make_tail_check("gordon_comparison", trials, lhs_hits, c, 2.0 * rhs_freq);
    const double allowed = std::min(1.0, 2.0 * clopper_pearson_upper(rhs_hits, trials));
    if (t.lower_conf_95 > allowed)
      t.verdict = Verdict::violated;
    else if (t.verdict == Verdict::violated)
      t.verdict = Verdict::consistent;
    out.emplace_back(c, t);
  }
  return out;
}

}  // namespace ellrad
