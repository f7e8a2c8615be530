#include "ellrad/acceptance.hpp"

#include "ellrad/bounds.hpp"
#include "ellrad/concentration.hpp"
#include "ellrad/experiments.hpp"
#include "ellrad/geometry.hpp"
#include "ellrad/json_io.hpp"
#include "ellrad/philox.hpp"
#include "ellrad/randmat.hpp"
#include "oracles.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

namespace ellrad {
namespace {

std::string fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// Runtime budgets (seconds) and numerical tolerances of each criterion.
constexpr double kBudget1 = 120, kBudget2 = 60, kBudget4 = 600, kBudget5 = 1800, kBudget6 = 120,
                 kBudget7 = 600, kBudget8 = 300;
constexpr double kStdErrors = 3.0;
constexpr double kRadiusRelTol = 1e-8;
constexpr double kCoordRelTol = 1e-6;
constexpr double kRatioLo = 1.0, kRatioHi = 30.0, kSpreadFast = 3.0, kSpreadCritical = 4.0;
constexpr double kSlowFreq = 0.95;
constexpr double kExpConstant = 50.0;
constexpr double kChiSqStdErrors = 4.0;
constexpr Eigen::Index kSweepDenseCap = 512;

class Runner {
 public:
  Runner(const AcceptanceOptions& opts, const std::function<void(const CriterionResult&)>& progress)
      : opts_(opts), progress_(progress) {}

  std::vector<CriterionResult> run() {
    auto want = [&](int id) {
      return opts_.only.empty() || std::count(opts_.only.begin(), opts_.only.end(), id) > 0;
    };
    std::map<int, CriterionResult> results;
    auto record = [&](CriterionResult r) {
      if (progress_) progress_(r);
      results[r.id] = std::move(r);
    };
    if (want(1)) record(timed(1, "carl2 exact mean", kBudget1, [&](auto& r) { criterion1(r); }));
    if (want(2)) record(timed(2, "oracle equivalence", kBudget2, [&](auto& r) { criterion2(r); }));
    const bool sweeps = want(3) || want(4) || want(5) || want(6);
    if (sweeps && (want(4) || want(3)))
      record(timed(4, "ub_main never exceeded", kBudget4, [&](auto& r) { criterion4(r); }));
    if (sweeps && (want(5) || want(3)))
      record(timed(5, "polynomial regimes", kBudget5, [&](auto& r) { criterion5(r); }));
    if (sweeps && (want(6) || want(3)))
      record(timed(6, "exponential decay", kBudget6, [&](auto& r) { criterion6(r); }));
    if (want(3)) record(timed(3, "per-realization chain", 0, [&](auto& r) { criterion3(r); }));
    if (want(7)) record(timed(7, "concentration suite", kBudget7, [&](auto& r) { criterion7(r); }));
    if (want(8)) record(timed(8, "dichotomy", kBudget8, [&](auto& r) { criterion8(r); }));
    if (want(9)) record(timed(9, "thread determinism", 0, [&](auto& r) { criterion9(r); }));

    std::vector<CriterionResult> out;
    for (auto& [id, r] : results)
      if (want(id)) out.push_back(r);
    return out;
  }

 private:
  template <typename Fn>
  CriterionResult timed(int id, const char* name, double budget, Fn&& fn) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    r.budget_seconds = budget;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget > 0 && r.seconds > budget) {
      r.passed = false;
      r.detail += fmt("; over the %.0f s budget", budget);
    }
    return r;
  }

  std::uint64_t seed(std::uint64_t criterion, std::uint64_t part = 0) const {
    return derive_seed(opts_.seed, criterion, part);
  }

  SweepResult sweep(SweepConfig cfg, const std::string& tag) {
    cfg.threads = opts_.threads;
    cfg.solver.dense_cap = kSweepDenseCap;
    cfg.out_path = tag + ".csv";
    SweepResult res = run_sweep(cfg);
    for (const auto& r : res.records) {
      if (r.failed) {
        ++sweep_failures_;
        continue;
      }
      ++sweep_records_;
      if (!chain_holds(r)) ++chain_violations_;
      if (r.realization_ub_holds == 0.0) ++realization_violations_;
      if (std::isnan(r.realization_ub_holds)) ++realization_unchecked_;
    }
    if (!opts_.out_dir.empty()) {
      std::filesystem::create_directories(opts_.out_dir);
      const std::filesystem::path dir(opts_.out_dir);
      std::ofstream csv(dir / cfg.out_path);
      write_csv(csv, res.records);
      std::ofstream summary(dir / (tag + "_summary.json"));
      summary << to_json(res.summary).dump(2) << '\n';
    }
    return res;
  }

  void write_json(const std::string& name, const json& j) {
    if (opts_.out_dir.empty()) return;
    std::filesystem::create_directories(opts_.out_dir);
    std::ofstream out(std::filesystem::path(opts_.out_dir) / name);
    out << j.dump(2) << '\n';
  }

  void criterion1(CriterionResult& r) {
    constexpr std::int64_t m = 200, trials = 2000;
    r.passed = true;
    for (const std::int64_t n : {20, 100, 180}) {
      std::vector<double> v(trials);
      for (std::int64_t t = 0; t < trials; ++t)
        v[static_cast<std::size_t>(t)] = ball_coordinate_sq(sample(seed(1, derive_seed(n, t)), n, m));
      const Distribution d = describe(v);
      const double expected = static_cast<double>(m - n) / static_cast<double>(m);
      const double z = (d.mean - expected) / d.std_error;
      const bool ok = std::abs(z) <= kStdErrors;
      r.passed = r.passed && ok;
      r.detail += fmt("%sn=%lld mean %.4f vs %.2f (z=%+.2f)", r.detail.empty() ? "" : "; ",
                      static_cast<long long>(n), d.mean, expected, z);
    }
  }

  void criterion2(CriterionResult& r) {
    constexpr int instances = 50;
    double worst_radius = 0.0, worst_coord = 0.0;
    for (int i = 0; i < instances; ++i) {
      const std::uint64_t s = seed(2, static_cast<std::uint64_t>(i));
      auto u = [&](int slot) { return uniform_at(s, 0, static_cast<std::uint64_t>(slot)); };
      const std::int64_t m = 6 + static_cast<std::int64_t>(u(0) * 59.0);
      const std::int64_t n = 1 + static_cast<std::int64_t>(u(1) * static_cast<double>(m - 1));
      const std::int64_t k = 1 + static_cast<std::int64_t>(u(2) * static_cast<double>(m));
      std::optional<SemiAxes> seq;
      switch (i % 3) {
        case 0: seq = SemiAxes::polynomial(2.0 * u(3), u(4), m); break;
        case 1: {
          // Keep sigma_m >= 1e-6 so the Lagrangian oracle's D^-1 stays representable.
          const double a = std::max(0.6 + 0.35 * u(3), std::exp(std::log(1e-6) / static_cast<double>(m)));
          seq = SemiAxes::exponential(std::min(a, 0.99), m);
          break;
        }
        default: {
          std::vector<double> vals(static_cast<std::size_t>(m));
          for (std::int64_t j = 0; j < m; ++j) vals[static_cast<std::size_t>(j)] = 0.05 + 0.95 * u(10 + static_cast<int>(j));
          std::sort(vals.rbegin(), vals.rend());
          seq = SemiAxes::from_values(vals);
        }
      }
      const GaussianInfo g = sample(derive_seed(s, 1), n, m);
      SolverOptions it;
      it.method = SolveMethod::iterative;
      const double got = section_radius(*seq, g, it).value;
      const Eigen::MatrixXd gm = g.block(0, n, 0, m);
      const Eigen::VectorXd sig = Eigen::Map<const Eigen::VectorXd>(seq->values().data(), m);
      const double want = oracle::section_radius(gm, sig);
      worst_radius = std::max(worst_radius, std::abs(got - want) / want);
      const double cgot = coordinate_radius(*seq, g, k);
      const double cwant = oracle::coordinate_radius(gm, sig, static_cast<int>(k));
      worst_coord = std::max(worst_coord, std::abs(cgot - cwant) / std::max(cwant, 1e-300));
    }
    r.passed = worst_radius <= kRadiusRelTol && worst_coord <= kCoordRelTol;
    r.detail = fmt("%d instances; max rel err radius %.2e (tol %.0e), coordinate %.2e (tol %.0e)",
                   instances, worst_radius, kRadiusRelTol, worst_coord, kCoordRelTol);
  }

  void criterion3(CriterionResult& r) {
    r.passed = sweep_records_ > 0 && chain_violations_ == 0 && realization_violations_ == 0 &&
               realization_unchecked_ == 0;
    r.detail = fmt("%lld records (criteria 4-6 sweeps): %lld chain violations, %lld realization-bound "
                   "violations, %lld unchecked, %lld failed trials",
                   static_cast<long long>(sweep_records_), static_cast<long long>(chain_violations_),
                   static_cast<long long>(realization_violations_),
                   static_cast<long long>(realization_unchecked_),
                   static_cast<long long>(sweep_failures_));
  }

  void criterion4(CriterionResult& r) {
    SweepConfig cfg;
    cfg.sequence = SemiAxes::polynomial(1.0, 0.0, 64);
    cfg.n_list = {50, 100};
    cfg.m_rule = MRule{MRule::Kind::multiple, 64.0};
    cfg.trials = 500;
    cfg.master_seed = seed(4);
    const SweepResult res = sweep(cfg, "ub_main_alpha1");
    r.passed = true;
    for (const auto& c : res.summary.cells) {
      const bool ok = c.freq_above_ub_main == 0.0 && c.failures == 0;
      r.passed = r.passed && ok;
      r.detail += fmt("%sn=%lld freq(R > ub_main)=%g, q95 R %.4g vs rhs %.4g (claimed <= %.3f)",
                      r.detail.empty() ? "" : "; ", static_cast<long long>(c.n), c.freq_above_ub_main,
                      c.radius.q95, c.ub_main, c.ub_main_claimed);
    }
  }

  void criterion5(CriterionResult& r) {
    // (a) alpha = 1, m = 64 n.
    SweepConfig fast;
    fast.sequence = SemiAxes::polynomial(1.0, 0.0, 64);
    fast.n_list = {8, 16, 32, 64};
    fast.m_rule = MRule{MRule::Kind::multiple, 64.0};
    fast.trials = 100;
    fast.master_seed = seed(5, 1);
    const SweepResult a = sweep(fast, "regime_alpha1");
    const RegimeSeries sa = analyze_regime(Regime::fast, a.summary);
    const bool a_ok = sa.min >= kRatioLo && sa.max <= kRatioHi && sa.spread <= kSpreadFast;

    // (b) alpha = 1/4, m = 4096, n = 1 .. n_zero.
    SweepConfig slow;
    slow.sequence = SemiAxes::polynomial(0.25, 0.0, 4096);
    const std::int64_t n0 = n_zero(slow.sequence, 0.5);
    for (std::int64_t n = 1; n <= n0; ++n) slow.n_list.push_back(n);
    slow.trials = 100;
    slow.master_seed = seed(5, 2);
    const SweepResult b = sweep(slow, "regime_alpha025");
    const double threshold = 0.5 * slow.sequence.sigma(1);
    double worst_freq = 1.0;
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(b.summary.cells.size()); ++c) {
      std::int64_t hits = 0, ok = 0;
      for (std::int64_t t = 0; t < slow.trials; ++t) {
        const auto& rec = b.records[static_cast<std::size_t>(c * slow.trials + t)];
        if (rec.failed) continue;
        ++ok;
        if (rec.radius >= threshold) ++hits;
      }
      worst_freq = std::min(worst_freq, ok ? static_cast<double>(hits) / static_cast<double>(ok) : 0.0);
    }
    const bool b_ok = n0 >= 1 && worst_freq >= kSlowFreq;

    // (c) alpha = 1/2, beta = 1, m = 2^17.
    SweepConfig crit;
    crit.sequence = SemiAxes::polynomial(0.5, 1.0, std::int64_t{1} << 17);
    crit.n_list = {16, 32, 64};
    crit.trials = 100;
    crit.master_seed = seed(5, 3);
    const SweepResult c = sweep(crit, "regime_alpha05_beta1");
    const RegimeSeries sc = analyze_regime(Regime::critical, c.summary);
    const bool c_ok = sc.spread <= kSpreadCritical;
    double max_tail = 0.0;
    for (const auto& cell : c.summary.cells) max_tail = std::max(max_tail, cell.tail_ratio);

    write_json("regimes.json",
               to_json(regime_report({{Regime::fast, a.summary},
                                      {Regime::slow, b.summary},
                                      {Regime::critical, c.summary}})));
    r.passed = a_ok && b_ok && c_ok;
    r.detail = fmt("(a) R/sigma_{n+1} in [%.2f, %.2f], spread %.2f, slope %.3f %s; "
                   "(b) n_zero=%lld, min freq(R >= sigma_1/2) %.2f %s; "
                   "(c) R/(sigma_{n+1} sqrt(ln(n+1))) in [%.2f, %.2f], spread %.2f, tail ratio <= %.3f %s",
                   sa.min, sa.max, sa.spread, sa.slope, a_ok ? "ok" : "FAIL", static_cast<long long>(n0),
                   worst_freq, b_ok ? "ok" : "FAIL", sc.min, sc.max, sc.spread, max_tail,
                   c_ok ? "ok" : "FAIL");
  }

  void criterion6(CriterionResult& r) {
    SweepConfig cfg;
    cfg.sequence = SemiAxes::exponential(0.5, 64);
    for (std::int64_t n = 5; n <= 25; ++n) cfg.n_list.push_back(n);
    cfg.k_rule.kind = KRule::Kind::full;
    cfg.trials = 100;
    cfg.master_seed = seed(6);
    const SweepResult res = sweep(cfg, "regime_exponential");
    const RegimeSeries s = analyze_regime(Regime::exponential, res.summary);
    bool lower_ok = true;
    for (const auto& c : res.summary.cells) lower_ok = lower_ok && c.radius.mean >= c.sigma_np1;
    r.passed = lower_ok && s.fitted_constant <= kExpConstant;
    r.detail = fmt("sigma_{n+1} <= mean R_n for all n: %s; K = max mean e(A_n)/(n^2 a^n) = %.3g "
                   "(limit %.0f), min %.3g",
                   lower_ok ? "yes" : "no", s.fitted_constant, kExpConstant, s.min);
  }

  void criterion7(CriterionResult& r) {
    constexpr std::int64_t trials = 10000;
    const int th = opts_.threads;
    std::vector<TailCheck> checks;
    const auto [lm_lo, lm_hi] = check_laurent_massart(std::vector<double>(50, 1.0), 0.3, trials, seed(7, 1), th);
    checks.push_back(lm_lo);
    checks.push_back(lm_hi);
    const boost::math::chi_squared chi(50.0);
    const double p_lo = boost::math::cdf(chi, lm_lo.threshold);
    const double p_hi = boost::math::cdf(boost::math::complement(chi, lm_hi.threshold));
    auto z = [&](const TailCheck& t, double p) {
      return (t.empirical_freq - p) / std::sqrt(p * (1.0 - p) / static_cast<double>(t.trials));
    };
    const double z_lo = z(lm_lo, p_lo), z_hi = z(lm_hi, p_hi);
    const bool chi_ok = std::abs(z_lo) <= kChiSqStdErrors && std::abs(z_hi) <= kChiSqStdErrors;

    checks.push_back(check_davidson_szarek(16, trials, seed(7, 2), th));
    checks.push_back(check_szarek(20, 0.1, trials, seed(7, 3), th));
    checks.push_back(check_bvh(SemiAxes::polynomial(1.0, 0.0, 2048), 32, 16, 1.0, trials, seed(7, 4), th));
    checks.push_back(check_smin_basic(std::vector<double>(400, 1.0), 20, 0.5, trials, seed(7, 5), th));
    const std::vector<double> grid = {5.5, 6.25, 7.0, 7.75, 8.5};
    for (const auto& [c, t] : check_gordon_comparison(std::vector<double>(100, 1.0), 10, grid, trials, seed(7, 6), th)) {
      (void)c;
      checks.push_back(t);
    }
    int violated = 0;
    std::string parts;
    for (const auto& t : checks) {
      if (t.verdict == Verdict::violated) ++violated;
      parts += fmt(" %s(%.3g<=%.3g:%s)", t.name.c_str(), t.empirical_freq, t.claimed_bound,
                   to_string(t.verdict));
    }
    json all = json::array();
    for (const auto& t : checks) all.push_back(to_json(t));
    write_json("concentration.json", all);
    r.passed = violated == 0 && chi_ok;
    r.detail = fmt("%d checks, %d violated; chi-square cross-check z = %+.2f, %+.2f;", static_cast<int>(checks.size()),
                   violated, z_lo, z_hi) + parts;
  }

  void criterion8(CriterionResult& r) {
    SolverOptions solver;
    solver.dense_cap = kSweepDenseCap;
    const DichotomyReport ones = dichotomy_experiment(0.0, 0.0, 1, {10000}, 0.01, 200, seed(8, 1), opts_.threads, solver);
    std::vector<std::int64_t> ms;
    for (int p = 8; p <= 14; ++p) ms.push_back(std::int64_t{1} << p);
    const DichotomyReport quarter = dichotomy_experiment(0.25, 0.0, 4, ms, 0.5, 200, seed(8, 2), opts_.threads, solver);
    write_json("dichotomy_ones.json", to_json(ones));
    write_json("dichotomy_alpha025.json", to_json(quarter));
    const double f1 = ones.rows.front().frequency;
    std::string series;
    for (const auto& row : quarter.rows) series += fmt("%s%.3f", series.empty() ? "" : ",", row.frequency);
    r.passed = f1 == 1.0 && quarter.monotone;
    r.detail = fmt("all-ones m=10^4: freq(R_1 >= 0.99) = %.3f; alpha=1/4, m=2^8..2^14: freq %s (%s)", f1,
                   series.c_str(), quarter.monotone ? "non-decreasing" : "NOT monotone");
  }

  void criterion9(CriterionResult& r) {
    SweepConfig cfg;
    cfg.sequence = SemiAxes::polynomial(1.0, 0.0, 256);
    cfg.n_list = {0, 4, 16, 40};
    cfg.m_rule = MRule{MRule::Kind::fixed, 256.0};
    cfg.trials = 12;
    cfg.master_seed = seed(9);
    cfg.outputs.coord_radius = true;
    cfg.solver.dense_cap = 128;  // exercises the iterative path as well
    cfg.threads = 1;
    const std::string one = to_csv(run_sweep(cfg).records);
    cfg.threads = 8;
    const std::string eight = to_csv(run_sweep(cfg).records);
    r.passed = one == eight;
    r.detail = fmt("%zu-byte CSV, threads 1 vs 8: %s", one.size(), r.passed ? "identical" : "DIFFERENT");
  }

  const AcceptanceOptions& opts_;
  const std::function<void(const CriterionResult&)>& progress_;
  std::int64_t sweep_records_ = 0;
  std::int64_t sweep_failures_ = 0;
  std::int64_t chain_violations_ = 0;
  std::int64_t realization_violations_ = 0;
  std::int64_t realization_unchecked_ = 0;
};

}  // namespace

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options, const std::function<void(const CriterionResult&)>& progress) {
  return Runner(options, progress).run();
}

std::string format_result(const CriterionResult& r) {
  return fmt("[%s] criterion %d %s: ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str()) + r.detail +
         fmt(" (%.1f s)", r.seconds);
}

}  // namespace ellrad
