#include "ellrad/experiments.hpp"

#include "ellrad/bounds.hpp"
#include "ellrad/errors.hpp"
#include "ellrad/parallel.hpp"
#include "ellrad/philox.hpp"
#include "ellrad/randmat.hpp"
#include "ellrad/recovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ellrad {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double quantile_sorted(const std::vector<double>& v, double p) {
  if (v.empty()) return kNaN;
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct CellPlan {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t k = 0;
  SemiAxes seq;
  BoundReport ub_main;
  BoundReport ub_exp;
  BoundReport lb_main;
  bool has_bounds = false;
};

CellPlan plan_cell(const SweepConfig& cfg, std::int64_t n) {
  const std::int64_t m = cfg.m_for(n);
  CellPlan p{n, m, cfg.k_rule.k_for(n), cfg.sequence.with_m(m), {}, {}, {}, false};
  if (n >= 1) {
    p.ub_main = ub_main(p.seq, n);
    p.ub_exp = ub_exponential(p.seq, n, cfg.c, cfg.s);
    p.lb_main = lb_main(p.seq, n, cfg.eps);
    p.has_bounds = true;
  }
  return p;
}

TrialRecord run_trial(const SweepConfig& cfg, const CellPlan& cell, std::int64_t trial) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  TrialRecord r;
  r.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(cell.n),
                       static_cast<std::uint64_t>(trial));
  r.n = cell.n;
  r.m = cell.m;
  r.trial = trial;
  r.k_used = cell.k;
  r.sigma_np1 = cell.seq.sigma(cell.n + 1);
  r.radius = r.error_an = r.coord_radius = r.realization_ub_holds = kNaN;
  r.ub_main = r.ub_exp = kInf;
  r.lb_main = 0.0;
  if (cfg.outputs.bounds && cell.has_bounds) {
    r.ub_main = cell.ub_main.rhs;
    r.ub_exp = cell.ub_exp.rhs;
    r.lb_main = cell.lb_main.rhs;
  } else if (!cfg.outputs.bounds) {
    r.ub_main = r.ub_exp = r.lb_main = kNaN;
  }

  try {
    if (cell.n == 0) {
      const double s1 = cell.seq.sigma(1);
      if (cfg.outputs.radius) r.radius = s1;
      if (cfg.outputs.error_an) r.error_an = s1;  // A_0 = 0
      if (cfg.outputs.coord_radius) r.coord_radius = cell.seq.sigma(cfg.coord_index);
      if (cfg.outputs.bounds) r.realization_ub_holds = 1.0;
    } else {
      const GaussianInfo g = sample(r.seed, cell.n, cell.m).materialized();
      if (cfg.outputs.radius) r.radius = section_radius(cell.seq, g, cfg.solver).value;
      if (cfg.outputs.coord_radius)
        r.coord_radius = coordinate_radius(cell.seq, g, cfg.coord_index);
      if (cfg.outputs.error_an || cfg.outputs.bounds) {
        const double err = worst_case_error(cell.seq, g, EstimatorSpec{cell.k}, cfg.solver);
        if (cfg.outputs.error_an) r.error_an = err;
        if (cfg.outputs.bounds)
          r.realization_ub_holds = realization_ub(cell.seq, g, cell.k, err).holds ? 1.0 : 0.0;
      }
    }
  } catch (const NumericalError& e) {
    r.failed = true;
    r.failure = e.what();
  } catch (const RankDeficientError& e) {
    r.failed = true;
    r.failure = e.what();
  }
  if (r.failed) r.radius = r.error_an = r.coord_radius = r.realization_ub_holds = kNaN;
  if (cfg.timing)
    r.runtime_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
  return r;
}

CellSummary summarize_cell(const CellPlan& cell,
                           const TrialRecord* first, std::int64_t count) {
  CellSummary s;
  s.n = cell.n;
  s.m = cell.m;
  s.k = cell.k;
  s.trials = count;
  s.sigma_n = cell.seq.sigma(std::max<std::int64_t>(cell.n, 1));
  s.sigma_np1 = cell.seq.sigma(cell.n + 1);
  std::vector<double> radius, error, coord;
  std::int64_t above = 0, below = 0, evaluated = 0;
  for (std::int64_t t = 0; t < count; ++t) {
    const TrialRecord& r = first[t];
    if (r.failed) {
      ++s.failures;
      continue;
    }
    ++evaluated;
    if (!std::isnan(r.radius)) radius.push_back(r.radius);
    if (!std::isnan(r.error_an)) error.push_back(r.error_an);
    if (!std::isnan(r.coord_radius)) coord.push_back(r.coord_radius);
    if (!chain_holds(r)) ++s.chain_violations;
    if (r.realization_ub_holds == 0.0) ++s.realization_violations;
    if (cell.has_bounds && !std::isnan(r.radius)) {
      if (r.radius > cell.ub_main.rhs) ++above;
      if (cell.lb_main.applicable && r.radius < cell.lb_main.rhs) ++below;
    }
  }
  s.radius = describe(radius);
  s.error_an = describe(error);
  s.coord_radius = describe(coord);
  s.ratio_opt = s.radius.mean / s.sigma_np1;
  s.ratio_log = s.radius.mean / (s.sigma_np1 * std::sqrt(std::log(static_cast<double>(cell.n) + 1.0)));
  s.ratio_opt_min = radius.empty() ? kNaN
                                   : *std::min_element(radius.begin(), radius.end()) / s.sigma_np1;
  if (cell.has_bounds) {
    s.tail_ratio = cell.ub_main.params.at("tail_ratio");
    s.ub_main = cell.ub_main.rhs;
    s.ub_main_claimed = cell.ub_main.claimed_failure_prob;
    s.ub_exp = cell.ub_exp.rhs;
    s.lb_main = cell.lb_main.rhs;
    s.lb_main_claimed = cell.lb_main.claimed_failure_prob;
    s.lb_main_applicable = cell.lb_main.applicable;
  } else {
    s.tail_ratio = neglected_tail_ratio(cell.seq, 0);
    s.ub_main = s.ub_exp = kInf;
  }
  if (evaluated > 0) {
    s.freq_above_ub_main = static_cast<double>(above) / static_cast<double>(evaluated);
    s.freq_below_lb_main = static_cast<double>(below) / static_cast<double>(evaluated);
  }
  return s;
}

}  // namespace

std::int64_t MRule::m_for(std::int64_t n) const {
  switch (kind) {
    case Kind::fixed: return static_cast<std::int64_t>(value);
    case Kind::multiple:
      return std::max<std::int64_t>(static_cast<std::int64_t>(std::llround(value * static_cast<double>(n))), 1);
    case Kind::power:
      return std::max<std::int64_t>(
          static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(n), value))), 1);
  }
  return 1;
}

std::string MRule::describe() const {
  const char* names[] = {"fixed", "multiple", "power"};
  return std::string(names[static_cast<int>(kind)]) + "(" + format_number(value) + ")";
}

std::int64_t KRule::k_for(std::int64_t n) const {
  if (n <= 0) return 0;
  switch (kind) {
    case Kind::half: return std::max<std::int64_t>(n / 2, 1);
    case Kind::full: return n;
    case Kind::fraction:
      return std::clamp<std::int64_t>(
          static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(n))), 1, n);
  }
  return n;
}

std::string KRule::describe() const {
  switch (kind) {
    case Kind::half: return "half";
    case Kind::full: return "full";
    case Kind::fraction: return "fraction(" + format_number(fraction) + ")";
  }
  return "unknown";
}

std::int64_t SweepConfig::m_for(std::int64_t n) const {
  return m_rule ? m_rule->m_for(n) : sequence.m();
}

void SweepConfig::validate() const {
  if (n_list.empty()) throw std::invalid_argument("n_list is empty");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (m_rule && !(m_rule->value > 0.0)) throw std::invalid_argument("m_rule value must be positive");
  if (k_rule.kind == KRule::Kind::fraction && !(k_rule.fraction > 0.0 && k_rule.fraction <= 1.0))
    throw std::invalid_argument("estimator_k_rule fraction must lie in (0, 1]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(c >= 1.0) || !(s >= 1.0)) throw std::invalid_argument("c and s must be >= 1");
  for (const std::int64_t n : n_list) {
    if (n < 0) throw std::invalid_argument("n_list entries must be >= 0");
    const std::int64_t m = m_for(n);
    if (n >= m)
      throw std::invalid_argument("n = " + std::to_string(n) + " is not below m = " +
                                  std::to_string(m));
    if (outputs.coord_radius && (coord_index < 1 || coord_index > m))
      throw std::invalid_argument("coord_index must lie in [1, m]");
  }
}

Distribution describe(std::vector<double> values) {
  Distribution d;
  if (values.empty()) {
    d.mean = d.std_error = d.median = d.q05 = d.q95 = kNaN;
    return d;
  }
  std::sort(values.begin(), values.end());
  const double count = static_cast<double>(values.size());
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  double ss = 0.0;
  for (const double v : values) ss += (v - d.mean) * (v - d.mean);
  d.std_error = values.size() > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
  d.median = quantile_sorted(values, 0.5);
  d.q05 = quantile_sorted(values, 0.05);
  d.q95 = quantile_sorted(values, 0.95);
  return d;
}

bool chain_holds(const TrialRecord& r) {
  if (r.failed || std::isnan(r.radius)) return true;
  if (r.radius < r.sigma_np1 * (1.0 - kChainRelTol)) return false;
  if (!std::isnan(r.error_an) && r.radius > r.error_an + kChainAbsTol) return false;
  return true;
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  std::vector<std::int64_t> ns = config.n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::vector<CellPlan> cells;
  cells.reserve(ns.size());
  for (const std::int64_t n : ns) cells.push_back(plan_cell(config, n));

  const std::int64_t per_cell = config.trials;
  const std::int64_t total = per_cell * static_cast<std::int64_t>(cells.size());
  SweepResult result;
  result.records.resize(static_cast<std::size_t>(total));
  parallel_for(total, config.threads, [&](std::int64_t idx) {
    const auto& cell = cells[static_cast<std::size_t>(idx / per_cell)];
    result.records[static_cast<std::size_t>(idx)] = run_trial(config, cell, idx % per_cell);
  });

  std::int64_t failures = 0;
  std::string first_failure;
  for (const auto& r : result.records) {
    if (!r.failed) continue;
    if (failures++ == 0)
      first_failure = "n=" + std::to_string(r.n) + " trial=" + std::to_string(r.trial) + ": " + r.failure;
  }
  if (failures * 100 > total)
    throw NumericalError("sweep aborted: " + std::to_string(failures) + " of " +
                             std::to_string(total) + " trials failed; first " + first_failure,
                         0, kNaN, kNaN);

  result.summary.sequence = config.sequence;
  result.summary.m_rule = config.m_rule ? config.m_rule->describe()
                                        : "fixed(" + std::to_string(config.sequence.m()) + ")";
  result.summary.k_rule = config.k_rule.describe();
  result.summary.master_seed = config.master_seed;
  for (std::size_t c = 0; c < cells.size(); ++c)
    result.summary.cells.push_back(summarize_cell(
        cells[c], result.records.data() + static_cast<std::int64_t>(c) * per_cell, per_cell));
  return result;
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.seed << ',' << r.n << ',' << r.m << ',' << r.trial << ',' << format_number(r.radius)
        << ',' << format_number(r.sigma_np1) << ',' << format_number(r.error_an) << ','
        << r.k_used << ',' << format_number(r.ub_main) << ',' << format_number(r.ub_exp) << ','
        << format_number(r.lb_main) << ',' << format_number(r.realization_ub_holds) << ','
        << format_number(r.runtime_ms) << '\n';
  }
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

DichotomyReport dichotomy_experiment(double alpha, double beta, std::int64_t n,
                                     const std::vector<std::int64_t>& m_list, double eps,
                                     std::int64_t trials, std::uint64_t seed, int threads,
                                     const SolverOptions& solver) {
  if (!(alpha <= 0.5)) throw std::invalid_argument("dichotomy_experiment needs alpha <= 1/2");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  if (n < 1 || trials < 1) throw std::invalid_argument("dichotomy_experiment needs n, trials >= 1");
  if (m_list.empty() || !std::is_sorted(m_list.begin(), m_list.end()) ||
      std::adjacent_find(m_list.begin(), m_list.end()) != m_list.end())
    throw std::invalid_argument("m_list must be strictly increasing");
  if (m_list.front() <= n) throw std::invalid_argument("every m must exceed n");

  DichotomyReport rep{alpha, beta, n, eps, trials, seed, {}, true, true};
  for (const std::int64_t m : m_list) {
    const SemiAxes seq = SemiAxes::polynomial(alpha, beta, m);
    DichotomyRow row;
    row.m = m;
    row.n_zero = eps < 1.0 ? n_zero(seq, eps) : 0;
    row.threshold = seq.sigma(1) * (1.0 - eps);
    row.claimed_lower = 1.0 - 5.0 * std::exp(-static_cast<double>(row.n_zero) / 64.0);
    std::vector<double> radii(static_cast<std::size_t>(trials));
    std::vector<char> failed(static_cast<std::size_t>(trials), 0);
    parallel_for(trials, threads, [&](std::int64_t t) {
      const auto s = derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t));
      try {
        radii[static_cast<std::size_t>(t)] = section_radius(seq, sample(s, n, m), solver).value;
      } catch (const NumericalError&) {
        failed[static_cast<std::size_t>(t)] = 1;
        radii[static_cast<std::size_t>(t)] = kNaN;
      }
    });
    double sum = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
      if (failed[static_cast<std::size_t>(t)]) {
        ++row.failures;
        continue;
      }
      const double r = radii[static_cast<std::size_t>(t)];
      sum += r;
      if (r >= row.threshold) ++row.hits;
    }
    const std::int64_t ok = trials - row.failures;
    row.frequency = ok > 0 ? static_cast<double>(row.hits) / static_cast<double>(ok) : kNaN;
    row.mean_radius = ok > 0 ? sum / static_cast<double>(ok) : kNaN;
    if (!rep.rows.empty() && row.frequency < rep.rows.back().frequency) rep.monotone = false;
    rep.rows.push_back(row);
  }
  rep.n_within_n_zero = eps >= 1.0 || n <= rep.rows.back().n_zero;
  return rep;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::slow: return "slow";
    case Regime::critical: return "critical";
    case Regime::fast: return "fast";
    case Regime::exponential: return "exponential";
  }
  return "unknown";
}

RegimeSeries analyze_regime(Regime regime, const SweepSummary& summary) {
  RegimeSeries out;
  out.regime = regime;
  const double s1 = summary.sequence.sigma(1);
  const double scale = summary.sequence.scale();
  std::vector<double> lx, ly;
  for (const auto& cell : summary.cells) {
    if (cell.n < 1) continue;
    const double nd = static_cast<double>(cell.n);
    double value = kNaN;
    switch (regime) {
      case Regime::slow: value = cell.radius.mean / s1; break;
      case Regime::critical: value = cell.ratio_log; break;
      case Regime::fast: value = cell.ratio_opt; break;
      case Regime::exponential: value = cell.error_an.mean / (nd * nd * cell.sigma_n / scale); break;
    }
    out.n.push_back(cell.n);
    out.normalized.push_back(value);
    if (cell.radius.mean > 0.0) {
      lx.push_back(std::log(nd));
      ly.push_back(std::log(cell.radius.mean));
    }
  }
  if (out.normalized.empty()) return out;
  out.min = *std::min_element(out.normalized.begin(), out.normalized.end());
  out.max = *std::max_element(out.normalized.begin(), out.normalized.end());
  out.spread = out.max / out.min;
  out.fitted_constant = out.max;
  if (lx.size() >= 2) {
    const double count = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / count;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / count;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    out.slope = sxx > 0.0 ? sxy / sxx : kNaN;
    double rss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double fit = my + out.slope * (lx[i] - mx);
      rss += (ly[i] - fit) * (ly[i] - fit);
    }
    out.slope_residual = std::sqrt(rss / count);
  }
  return out;
}

RegimeReport regime_report(const std::vector<std::pair<Regime, SweepSummary>>& inputs) {
  RegimeReport rep;
  for (const auto& [regime, summary] : inputs) rep.series.push_back(analyze_regime(regime, summary));
  return rep;
}

}  // namespace ellrad
