#include "ellrad/bounds.hpp"

#include "ellrad/philox.hpp"
#include "ellrad/recovery.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ellrad {
namespace {

void require_positive_n(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("bound needs n >= 1");
}

}  // namespace

BoundReport& BoundReport::check(double value) {
  lhs = value;
  evaluated = true;
  holds = direction == BoundDirection::upper ? lhs <= rhs : lhs >= rhs;
  return *this;
}

double neglected_tail_ratio(const SemiAxes& seq, std::int64_t k) {
  const double neglected = seq.neglected_tail_sq();
  const double used = seq.tail_sq(k) + neglected;
  if (neglected == 0.0) return 0.0;
  if (std::isinf(neglected)) return 1.0;
  return neglected / used;
}

BoundReport ub_main(const SemiAxes& seq, std::int64_t n) {
  require_positive_n(n);
  const std::int64_t start = n / 4;
  const std::int64_t skip = std::max<std::int64_t>(start - 1, 0);
  const double sum = seq.tail_sq(skip);
  BoundReport r;
  r.name = "ub_main";
  r.rhs = 221.0 / std::sqrt(static_cast<double>(n)) * std::sqrt(sum);
  r.claimed_failure_prob = 2.0 * std::exp(-static_cast<double>(n) / 100.0);
  r.params = {{"n", static_cast<double>(n)},
              {"start_index", static_cast<double>(std::max<std::int64_t>(start, 1))},
              {"tail_ratio", neglected_tail_ratio(seq, skip)}};
  return r;
}

BoundReport ub_exponential(const SemiAxes& seq, std::int64_t n, double c, double s) {
  require_positive_n(n);
  if (!(c >= 1.0) || !(s >= 1.0)) throw std::invalid_argument("ub_exponential needs c, s >= 1");
  const double nd = static_cast<double>(n);
  BoundReport r;
  r.name = "ub_exp";
  r.rhs = 14.0 * s * nd * std::sqrt(seq.tail_sq(n));
  r.claimed_failure_prob = std::exp(-c * c * nd) + c * std::sqrt(2.0 * std::numbers::e) / s;
  r.params = {{"n", nd}, {"c", c}, {"s", s}, {"tail_ratio", neglected_tail_ratio(seq, n)}};
  return r;
}

BoundReport lb_main(const SemiAxes& seq, std::int64_t n, double eps) {
  require_positive_n(n);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("lb_main needs eps in (0, 1)");
  const double factor = 3.0 * static_cast<double>(n) / (eps * eps);
  BoundReport r;
  r.name = "lb_main";
  r.direction = BoundDirection::lower;
  r.claimed_failure_prob = 5.0 * std::exp(-static_cast<double>(n) / 64.0);
  r.params = {{"n", static_cast<double>(n)}, {"eps", eps}};
  r.applicable = false;
  for (std::int64_t k = 1; k <= seq.support(); ++k) {
    const double sk = seq.sigma(k);
    if (sk * sk < std::numeric_limits<double>::min()) break;  // squares underflow from here on
    if (seq.tail_sq(k) >= factor * sk * sk) {
      r.applicable = true;
      r.rhs = sk * (1.0 - eps);
      r.params["k"] = static_cast<double>(k);
      r.params["c_k"] = c_k(seq, k);
      r.params["tail_ratio"] = neglected_tail_ratio(seq, k);
      break;
    }
  }
  return r;
}

double tail_block_norm(const SemiAxes& seq, const GaussianInfo& g, std::int64_t k) {
  const std::int64_t support = seq.support();
  if (k >= support || g.n() == 0) return 0.0;
  const auto sigma = seq.values().subspan(static_cast<std::size_t>(k),
                                          static_cast<std::size_t>(support - k));
  const Eigen::MatrixXd block = g.block(0, g.n(), k, support - k, sigma);
  // The Gram matrix is n x n; its top eigenvalue carries relative error ~eps.
  Eigen::MatrixXd gram(g.n(), g.n());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(block);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

BoundReport realization_ub(const SemiAxes& seq, const GaussianInfo& g, std::int64_t k,
                           double error_an) {
  if (k < 1 || k > g.n()) throw std::invalid_argument("realization_ub needs 1 <= k <= n");
  const Eigen::MatrixXd psi = g.block(0, g.n(), 0, k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi);
  const double sk = svd.singularValues()(k - 1);
  const double s1 = tail_block_norm(seq, g, k);
  BoundReport r;
  r.name = "realization_ub";
  r.claimed_failure_prob = 0.0;
  r.rhs = sk > 0.0 ? seq.sigma(k + 1) + s1 / sk : kInf;
  r.params = {{"k", static_cast<double>(k)}, {"s1_tail", s1}, {"sk_head", sk}};
  r.check(error_an);
  return r;
}

BoundReport realization_ub(const SemiAxes& seq, const GaussianInfo& g, std::int64_t k,
                           const SolverOptions& opts) {
  const double err = worst_case_error(seq, g, EstimatorSpec{k}, opts);
  return realization_ub(seq, g, k, err);
}

double bvh_threshold(const SemiAxes& seq, std::int64_t n, std::int64_t k, double c) {
  if (!(c >= 1.0) || k < 0 || n < 0) throw std::invalid_argument("bvh_threshold needs c >= 1");
  return 1.5 * std::sqrt(seq.tail_sq(k)) +
         11.0 * c * seq.sigma(k + 1) * std::sqrt(static_cast<double>(n));
}

double gordon_an(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("gordon_an needs n >= 1");
  const double x = static_cast<double>(n);
  return std::sqrt(2.0) * std::exp(std::lgamma((x + 1.0) / 2.0) - std::lgamma(x / 2.0));
}

namespace {

template <typename Fn>
MonteCarloEstimate sphere_average(std::int64_t m, std::int64_t samples, std::uint64_t seed,
                                  Fn&& value) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo estimate needs samples >= 2");
  Eigen::VectorXd u(m);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t t = 0; t < samples; ++t) {
    for (std::int64_t j = 0; j < m; ++j)
      u(j) = normal_at(seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(j));
    u /= u.norm();
    const double h = value(u);
    const double delta = h - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (h - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace

MonteCarloEstimate mstar_estimate(const SemiAxes& seq, std::int64_t samples, std::uint64_t seed) {
  const Eigen::Map<const Eigen::VectorXd> sigma(seq.values().data(), seq.m());
  return sphere_average(seq.m(), samples, derive_seed(seed, 0x3A57u),
                        [&](const Eigen::VectorXd& u) { return sigma.cwiseProduct(u).norm(); });
}

MonteCarloEstimate mstar_truncated_estimate(const SemiAxes& seq, std::int64_t k,
                                            std::int64_t samples, std::uint64_t seed) {
  if (k < 1 || k > seq.m()) throw std::invalid_argument("truncation index must lie in [1, m]");
  const double rho_sq = seq.tail_sq(k) / static_cast<double>(k);
  const Eigen::Map<const Eigen::VectorXd> sigma(seq.values().data(), seq.m());
  const std::int64_t rest = seq.m() - k;
  return sphere_average(seq.m(), samples, derive_seed(seed, 0x3A58u), [&](const Eigen::VectorXd& u) {
    const double head = u.head(k).squaredNorm();
    const double tail = rest > 0 ? sigma.tail(rest).cwiseProduct(u.tail(rest)).squaredNorm() : 0.0;
    return std::sqrt(2.0 * rho_sq * head + 2.0 * tail);
  });
}

BoundReport mstar_section_bound(const SemiAxes& seq, std::int64_t n, double gamma, std::int64_t k,
                                double mstar_rho) {
  require_positive_n(n);
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (k < 1 || k > seq.m()) throw std::invalid_argument("k must lie in [1, m]");
  if (n >= seq.m()) throw std::invalid_argument("mstar_section_bound needs n < m");
  BoundReport r;
  r.name = "mstar_section";
  const double tail = seq.tail_sq(k);
  const double an = gordon_an(n);
  const double am = gordon_an(seq.m());
  r.claimed_failure_prob = 3.5 * std::exp(-(1.0 - gamma) * (1.0 - gamma) * an * an / 18.0);
  r.params = {{"n", static_cast<double>(n)}, {"k", static_cast<double>(k)}, {"gamma", gamma},
              {"a_n", an}, {"a_m", am}, {"mstar_rho", mstar_rho}};
  if (tail <= 0.0) {
    r.applicable = false;
    r.params["rho"] = 0.0;
    return r;
  }
  const double rho = std::sqrt(tail / static_cast<double>(k));
  r.params["rho"] = rho;
  r.rhs = am * mstar_rho / (gamma * an);
  // Below rho, the bound transfers from K_rho to the whole ellipsoid section.
  r.params["transfers"] = r.rhs < rho ? 1.0 : 0.0;
  return r;
}

BoundReport& mstar_section_check(BoundReport& report, double section_radius) {
  const auto it = report.params.find("rho");
  const double rho = it == report.params.end() ? kInf : it->second;
  return report.check(std::min(section_radius, rho));
}

double elementary_lb(std::int64_t m, std::int64_t n, double eps, double sigma_m, double alpha) {
  if (n >= m || n < 0) throw std::invalid_argument("elementary_lb needs 0 <= n < m");
  if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("elementary_lb needs eps in (0, 1)");
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("elementary_lb needs alpha in (0, 1/2)");
  const double c = sigma_m * std::pow(static_cast<double>(m), alpha);
  const double ec2 = eps * c * c;
  return std::sqrt(ec2 / (1.0 + ec2));
}

BoundReport elementary_lb_report(const SemiAxes& seq, std::int64_t n, double eps, double alpha) {
  BoundReport r;
  r.name = "elementary_lb";
  r.direction = BoundDirection::lower;
  r.rhs = elementary_lb(seq.m(), n, eps, seq.sigma(seq.m()), alpha);
  r.claimed_failure_prob = eps;
  const double md = static_cast<double>(seq.m());
  r.applicable = static_cast<double>(n) < std::pow(md, 1.0 - 2.0 * alpha);
  r.params = {{"n", static_cast<double>(n)}, {"eps", eps}, {"alpha", alpha},
              {"c", seq.sigma(seq.m()) * std::pow(md, alpha)}};
  return r;
}

}  // namespace ellrad
