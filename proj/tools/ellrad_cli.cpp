// ellrad: radii of random ellipsoid sections, estimator errors, bounds and
// Monte Carlo experiments. JSON goes to stdout, diagnostics to stderr.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 selftest failure.

#include "ellrad/acceptance.hpp"
#include "ellrad/bounds.hpp"
#include "ellrad/concentration.hpp"
#include "ellrad/errors.hpp"
#include "ellrad/experiments.hpp"
#include "ellrad/geometry.hpp"
#include "ellrad/json_io.hpp"
#include "ellrad/randmat.hpp"
#include "ellrad/recovery.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ellrad;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitSelftest = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string sigma;
  std::int64_t n = 0;
  std::optional<std::int64_t> m;
  std::optional<std::int64_t> k;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<double> c;
  std::optional<double> s;
  std::optional<double> t;
  std::optional<double> gamma;
  std::string out;
  std::optional<int> threads;
  std::optional<Eigen::Index> dense_cap;
  std::optional<double> tol;
  std::string name;
  std::string config;
  std::vector<std::int64_t> m_list;
  std::vector<double> c_grid;
  std::vector<std::string> summaries;
  std::vector<int> only;
};

SemiAxes load_sequence(const Flags& f) {
  if (f.sigma.empty()) throw UsageError("--sigma <path> is required");
  SemiAxes seq = semiaxes_from_json(load_json_file(f.sigma));
  if (f.m) seq = seq.with_m(*f.m);
  return seq;
}

SolverOptions solver(const Flags& f) {
  SolverOptions o;
  if (f.dense_cap) o.dense_cap = *f.dense_cap;
  if (f.tol) o.tol = *f.tol;
  return o;
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

int cmd_radius(const Flags& f) {
  const SemiAxes seq = load_sequence(f);
  const std::uint64_t seed = f.seed.value_or(1);
  const SectionRadius r = section_radius(seq, GaussianInfo(seed, f.n, seq.m()), solver(f));
  json j = to_json(r);
  j["sigma_np1"] = optimal_radius(seq, f.n);
  j["seed"] = seed;
  emit(j);
  std::cerr << "R_" << f.n << " = " << j["radius"] << " (sigma_{n+1} = " << j["sigma_np1"] << ")\n";
  return 0;
}

int cmd_coord_radius(const Flags& f) {
  const SemiAxes seq = load_sequence(f);
  const std::uint64_t seed = f.seed.value_or(1);
  const std::int64_t k = f.k.value_or(1);
  const double v = coordinate_radius(seq, GaussianInfo(seed, f.n, seq.m()), k);
  emit({{"coord_radius", v}, {"k", k}, {"n", f.n}, {"m", seq.m()}, {"seed", seed}, {"sigma_k", seq.sigma(k)}});
  std::cerr << "R_" << f.n << "^(" << k << ") = " << v << "\n";
  return 0;
}

int cmd_error(const Flags& f) {
  const SemiAxes seq = load_sequence(f);
  if (f.n < 1) throw UsageError("error needs --n >= 1");
  const std::uint64_t seed = f.seed.value_or(1);
  const std::int64_t k = f.k.value_or(std::max<std::int64_t>(f.n / 2, 1));
  const GaussianInfo g = sample(seed, f.n, seq.m()).materialized();
  const ErrorResult e = worst_case_error_detail(seq, g, EstimatorSpec{k}, solver(f));
  const SectionRadius r = section_radius(seq, g, solver(f));
  emit({{"error_an", e.value},
        {"radius", r.value},
        {"sigma_np1", optimal_radius(seq, f.n)},
        {"k", k},
        {"n", f.n},
        {"m", seq.m()},
        {"seed", seed},
        {"method", to_string(e.method)},
        {"iterations", e.iterations},
        {"residual", e.residual}});
  std::cerr << "e(A_n) = " << e.value << ", R_n = " << r.value << "\n";
  return 0;
}

int cmd_bound(const Flags& f) {
  const SemiAxes seq = load_sequence(f);
  const std::string& name = f.name;
  json j;
  if (name == "ub_main") {
    j = to_json(ub_main(seq, f.n));
  } else if (name == "ub_exp") {
    j = to_json(ub_exponential(seq, f.n, f.c.value_or(1.0), f.s.value_or(10.0)));
  } else if (name == "lb_main") {
    j = to_json(lb_main(seq, f.n, f.eps.value_or(0.5)));
  } else if (name == "realization_ub") {
    const std::int64_t k = f.k.value_or(std::max<std::int64_t>(f.n / 2, 1));
    const GaussianInfo g = sample(f.seed.value_or(1), f.n, seq.m()).materialized();
    j = to_json(realization_ub(seq, g, k, solver(f)));
  } else if (name == "bvh") {
    const std::int64_t k = f.k.value_or(0);
    const double c = f.c.value_or(1.0);
    j = {{"name", "bvh"}, {"threshold", bvh_threshold(seq, f.n, k, c)},
         {"claimed_failure_prob", std::exp(-c * c * static_cast<double>(f.n))},
         {"params", {{"n", f.n}, {"k", k}, {"c", c}}}};
  } else if (name == "mstar_section") {
    const double gamma = f.gamma.value_or(1.0 - 1.0 / std::sqrt(2.0));
    const double c = f.c.value_or(1.0);
    const std::int64_t k = f.k.value_or(std::max<std::int64_t>(
        static_cast<std::int64_t>(std::floor(gamma * gamma * static_cast<double>(f.n) / (4.0 * c))), 1));
    const auto est = mstar_truncated_estimate(seq, k, f.trials.value_or(2000), f.seed.value_or(1));
    BoundReport rep = mstar_section_bound(seq, f.n, gamma, k, est.estimate);
    rep.params["mstar_rho_std_error"] = est.std_error;
    j = to_json(rep);
  } else if (name == "elementary_lb") {
    const auto* p = std::get_if<Polynomial>(&seq.family());
    if (p == nullptr) throw UsageError("elementary_lb needs a polynomial sequence (alpha is read from it)");
    j = to_json(elementary_lb_report(seq, f.n, f.eps.value_or(0.5), p->alpha));
  } else {
    throw UsageError("unknown bound '" + name +
                     "' (ub_main, ub_exp, lb_main, realization_ub, bvh, mstar_section, elementary_lb)");
  }
  emit(j);
  std::cerr << name << ": rhs = " << (j.contains("rhs") ? j["rhs"] : j["threshold"]) << "\n";
  return 0;
}

int cmd_concentration(const Flags& f) {
  const std::int64_t trials = f.trials.value_or(10000);
  const std::uint64_t seed = f.seed.value_or(1);
  const int threads = f.threads.value_or(1);
  const std::string& name = f.name;
  json out = json::array();
  if (name == "laurent_massart") {
    const auto [lo, hi] = check_laurent_massart(std::vector<double>(static_cast<std::size_t>(f.m.value_or(100)), 1.0),
                                                f.delta.value_or(0.5), trials, seed, threads);
    out.push_back(to_json(lo));
    out.push_back(to_json(hi));
  } else if (name == "davidson_szarek") {
    if (f.k || f.t)
      out.push_back(to_json(check_davidson_szarek(f.n, f.k.value_or(f.n / 2), f.t.value_or(0.0), trials, seed, threads)));
    else
      out.push_back(to_json(check_davidson_szarek(f.n, trials, seed, threads)));
  } else if (name == "szarek") {
    out.push_back(to_json(check_szarek(f.n, f.t.value_or(0.1), trials, seed, threads)));
  } else if (name == "bvh") {
    const SemiAxes seq = load_sequence(f);
    out.push_back(to_json(check_bvh(seq, f.n, f.k.value_or(f.n / 2), f.c.value_or(1.0), trials, seed, threads)));
  } else if (name == "smin_basic") {
    out.push_back(to_json(check_smin_basic(std::vector<double>(static_cast<std::size_t>(f.m.value_or(400)), 1.0), f.n,
                                           f.delta.value_or(0.5), trials, seed, threads)));
  } else if (name == "gordon") {
    const std::int64_t m = f.m.value_or(100);
    std::vector<double> grid = f.c_grid;
    if (grid.empty()) {
      const double centre = std::sqrt(static_cast<double>(m)) - std::sqrt(static_cast<double>(f.n));
      for (const double d : {-1.5, -0.75, 0.0, 0.75, 1.5}) grid.push_back(centre + d);
    }
    for (const auto& [c, t] : check_gordon_comparison(std::vector<double>(static_cast<std::size_t>(m), 1.0), f.n, grid,
                                                      trials, seed, threads)) {
      json j = to_json(t);
      j["c"] = c;
      out.push_back(j);
    }
  } else {
    throw UsageError("unknown check '" + name +
                     "' (laurent_massart, davidson_szarek, szarek, bvh, smin_basic, gordon)");
  }
  emit(out);
  for (const auto& t : out)
    std::cerr << t["name"].get<std::string>() << ": freq " << t["empirical_freq"] << " vs claimed "
              << t["claimed_bound"] << " -> " << t["verdict"].get<std::string>() << "\n";
  return 0;
}

int cmd_mstar(const Flags& f) {
  const SemiAxes seq = load_sequence(f);
  const std::int64_t samples = f.trials.value_or(10000);
  const std::uint64_t seed = f.seed.value_or(1);
  const auto est = mstar_estimate(seq, samples, seed);
  json j = {{"estimate", est.estimate},
            {"std_error", est.std_error},
            {"samples", samples},
            {"upper_bound", std::sqrt(seq.tail_sq(0) / static_cast<double>(seq.m()))}};
  if (f.k) {
    const auto trunc = mstar_truncated_estimate(seq, *f.k, samples, seed);
    j["truncated"] = {{"k", *f.k}, {"estimate", trunc.estimate}, {"std_error", trunc.std_error}};
  }
  emit(j);
  std::cerr << "M* = " << est.estimate << " +- " << est.std_error << "\n";
  return 0;
}

int cmd_sweep(const Flags& f) {
  if (f.config.empty()) throw UsageError("sweep needs --config <path>");
  SweepConfig cfg = sweep_config_from_json(load_json_file(f.config));
  if (f.trials) cfg.trials = *f.trials;
  if (f.seed) cfg.master_seed = *f.seed;
  if (f.m) cfg.m_rule = MRule{MRule::Kind::fixed, static_cast<double>(*f.m)};
  if (f.threads) cfg.threads = *f.threads;
  if (f.dense_cap) cfg.solver.dense_cap = *f.dense_cap;
  if (f.tol) cfg.solver.tol = *f.tol;
  const SweepResult res = run_sweep(cfg);
  const std::filesystem::path dir(f.out.empty() ? "." : f.out);
  std::filesystem::create_directories(dir);
  const std::filesystem::path csv = dir / cfg.out_path;
  std::filesystem::path summary = csv;
  summary.replace_extension(".summary.json");
  {
    std::ofstream out(csv);
    write_csv(out, res.records);
  }
  const json j = to_json(res.summary);
  std::ofstream(summary) << j.dump(2) << '\n';
  emit(j);
  std::cerr << res.records.size() << " records -> " << csv.string() << ", summary -> " << summary.string() << "\n";
  return 0;
}

int cmd_dichotomy(const Flags& f) {
  const SemiAxes seq = load_sequence(f);
  const auto* p = std::get_if<Polynomial>(&seq.family());
  if (p == nullptr) throw UsageError("dichotomy needs a polynomial sequence");
  std::vector<std::int64_t> ms = f.m_list;
  if (ms.empty())
    for (int e = 8; e <= 14; ++e) ms.push_back(std::int64_t{1} << e);
  const DichotomyReport rep = dichotomy_experiment(p->alpha, p->beta, std::max<std::int64_t>(f.n, 1), ms,
                                                   f.eps.value_or(0.5), f.trials.value_or(200),
                                                   f.seed.value_or(1), f.threads.value_or(1), solver(f));
  emit(to_json(rep));
  for (const auto& row : rep.rows)
    std::cerr << "m=" << row.m << " n_zero=" << row.n_zero << " freq=" << row.frequency << "\n";
  return 0;
}

int cmd_regimes(const Flags& f) {
  if (f.summaries.empty()) throw UsageError("regimes needs --summary <regime>=<path> (repeatable)");
  std::vector<std::pair<Regime, SweepSummary>> inputs;
  for (const auto& spec : f.summaries) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--summary expects <regime>=<path>, got '" + spec + "'");
    const std::string name = spec.substr(0, eq);
    Regime regime;
    if (name == "slow") regime = Regime::slow;
    else if (name == "critical") regime = Regime::critical;
    else if (name == "fast") regime = Regime::fast;
    else if (name == "exponential") regime = Regime::exponential;
    else throw UsageError("unknown regime '" + name + "' (slow, critical, fast, exponential)");
    inputs.emplace_back(regime, sweep_summary_from_json(load_json_file(spec.substr(eq + 1))));
  }
  const RegimeReport rep = regime_report(inputs);
  emit(to_json(rep));
  for (const auto& s : rep.series)
    std::cerr << to_string(s.regime) << ": spread " << s.spread << ", slope " << s.slope << "\n";
  return 0;
}

int cmd_selftest(const Flags& f) {
  AcceptanceOptions opts;
  opts.threads = f.threads.value_or(1);
  if (f.seed) opts.seed = *f.seed;
  opts.out_dir = f.out;
  opts.only = f.only;
  const auto results = run_acceptance(opts, [](const CriterionResult& r) {
    std::cerr << format_result(r) << std::endl;
  });
  json out = json::array();
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    out.push_back({{"criterion", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail},
                   {"seconds", r.seconds}, {"budget_seconds", r.budget_seconds}});
  }
  emit(out);
  return ok ? 0 : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radii of random ellipsoid sections and least-squares recovery from Gaussian information"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub, bool needs_sigma) {
    auto* opt = sub->add_option("--sigma", f.sigma, "Sequence spec (JSON file)")->check(CLI::ExistingFile);
    if (needs_sigma) opt->required();
    sub->add_option("--m", f.m, "Truncation dimension (overrides the sequence file)");
    sub->add_option("--seed", f.seed, "Random seed");
    sub->add_option("--dense-cap", f.dense_cap, "Largest support solved densely");
    sub->add_option("--tol", f.tol, "Relative tolerance of the iterative solver");
  };

  auto* radius = app.add_subcommand("radius", "Section radius R_n for one realization");
  add_common(radius, true);
  radius->add_option("--n", f.n, "Number of measurements")->required();

  auto* coord = app.add_subcommand("coord-radius", "Coordinate radius R_n^(k) for one realization");
  add_common(coord, true);
  coord->add_option("--n", f.n, "Number of measurements")->required();
  coord->add_option("--k", f.k, "Coordinate (one-based)");

  auto* error = app.add_subcommand("error", "Worst-case error e(A_n) of the least-squares estimator");
  add_common(error, true);
  error->add_option("--n", f.n, "Number of measurements")->required();
  error->add_option("--k", f.k, "Estimator coordinate budget (default floor(n/2))");

  auto* bound = app.add_subcommand("bound", "Evaluate one analytic bound");
  add_common(bound, true);
  bound->add_option("--name", f.name, "ub_main | ub_exp | lb_main | realization_ub | bvh | mstar_section | elementary_lb")
      ->required();
  bound->add_option("--n", f.n, "Number of measurements")->required();
  bound->add_option("--k", f.k, "Index k");
  bound->add_option("--eps", f.eps, "epsilon");
  bound->add_option("--c", f.c, "c");
  bound->add_option("--s", f.s, "s");
  bound->add_option("--gamma", f.gamma, "gamma");
  bound->add_option("--trials", f.trials, "Monte Carlo samples (mstar_section)");

  auto* conc = app.add_subcommand("concentration", "Monte Carlo check of one tail inequality");
  add_common(conc, false);
  conc->add_option("--name", f.name, "laurent_massart | davidson_szarek | szarek | bvh | smin_basic | gordon")
      ->required();
  conc->add_option("--n", f.n, "Dimension n");
  conc->add_option("--k", f.k, "k");
  conc->add_option("--trials", f.trials, "Trials (default 10000)");
  conc->add_option("--delta", f.delta, "delta");
  conc->add_option("--c", f.c, "c");
  conc->add_option("--t", f.t, "t");
  conc->add_option("--c-grid", f.c_grid, "Thresholds for the Gordon comparison")->delimiter(',');
  conc->add_option("--threads", f.threads, "Worker threads");

  auto* mstar = app.add_subcommand("mstar", "Monte Carlo estimate of the half mean width M*");
  add_common(mstar, true);
  mstar->add_option("--trials", f.trials, "Samples (default 10000)");
  mstar->add_option("--k", f.k, "Also estimate M*(K_rho) for this truncation index");

  auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep from a JSON config");
  sweep->add_option("--config", f.config, "Sweep config (JSON file)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", f.out, "Output directory (default .)");
  sweep->add_option("--trials", f.trials, "Override config trials");
  sweep->add_option("--seed", f.seed, "Override config master_seed");
  sweep->add_option("--m", f.m, "Override config m_rule with fixed(m)");
  sweep->add_option("--threads", f.threads, "Override config threads");
  sweep->add_option("--dense-cap", f.dense_cap, "Override config dense_cap");
  sweep->add_option("--tol", f.tol, "Override config tol");

  auto* dich = app.add_subcommand("dichotomy", "Frequency of R_n >= sigma_1 (1 - eps) across truncations");
  add_common(dich, true);
  dich->add_option("--n", f.n, "Number of measurements")->required();
  dich->add_option("--m-list", f.m_list, "Truncations (default 2^8..2^14)")->delimiter(',');
  dich->add_option("--eps", f.eps, "epsilon (default 1/2)");
  dich->add_option("--trials", f.trials, "Trials per m (default 200)");
  dich->add_option("--threads", f.threads, "Worker threads");

  auto* regimes = app.add_subcommand("regimes", "Normalized regime series from sweep summaries");
  regimes->add_option("--summary", f.summaries, "<slow|critical|fast|exponential>=<summary.json>")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  selftest->add_option("--threads", f.threads, "Worker threads");
  selftest->add_option("--seed", f.seed, "Base seed");
  selftest->add_option("--out", f.out, "Write sweep CSVs and summaries here");
  selftest->add_option("--only", f.only, "Run only these criteria")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*radius) return cmd_radius(f);
    if (*coord) return cmd_coord_radius(f);
    if (*error) return cmd_error(f);
    if (*bound) return cmd_bound(f);
    if (*conc) return cmd_concentration(f);
    if (*mstar) return cmd_mstar(f);
    if (*sweep) return cmd_sweep(f);
    if (*dich) return cmd_dichotomy(f);
    if (*regimes) return cmd_regimes(f);
    if (*selftest) return cmd_selftest(f);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (iterations " << e.iterations() << ", residual "
              << e.residual() << ")\n";
    return kExitNumerical;
  } catch (const RankDeficientError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
