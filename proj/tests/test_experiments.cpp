#include "ellrad/experiments.hpp"
#include "ellrad/json_io.hpp"
#include "ellrad/philox.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

using namespace ellrad;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.sequence = SemiAxes::polynomial(1.0, 0.0, 96);
  cfg.n_list = {0, 2, 8, 20};
  cfg.trials = 4;
  cfg.master_seed = 42;
  cfg.outputs.coord_radius = true;
  return cfg;
}

std::size_t count_lines(const std::string& s) {
  std::size_t lines = 0;
  for (char ch : s) lines += ch == '\n';
  return lines;
}

}  // namespace

TEST_CASE("rules") {
  CHECK(MRule{MRule::Kind::fixed, 100}.m_for(7) == 100);
  CHECK(MRule{MRule::Kind::multiple, 8}.m_for(7) == 56);
  CHECK(MRule{MRule::Kind::power, 2}.m_for(7) == 49);
  CHECK(KRule{}.k_for(0) == 0);
  CHECK(KRule{}.k_for(1) == 1);
  CHECK(KRule{}.k_for(9) == 4);
  CHECK(KRule{KRule::Kind::full}.k_for(9) == 9);
  CHECK(KRule{KRule::Kind::fraction, 0.25}.k_for(9) == 2);
  CHECK(KRule{KRule::Kind::fraction, 0.01}.k_for(9) == 1);
}

TEST_CASE("describe uses type-7 quantiles") {
  const auto d = describe({4.0, 1.0, 3.0, 2.0, 5.0});
  CHECK(d.mean == doctest::Approx(3.0));
  CHECK(d.median == doctest::Approx(3.0));
  CHECK(d.q05 == doctest::Approx(1.2));
  CHECK(d.q95 == doctest::Approx(4.8));
  CHECK(d.std_error == doctest::Approx(std::sqrt(2.5 / 5)));
  CHECK(std::isnan(describe({}).mean));
}

TEST_CASE("sweep records") {
  const auto cfg = small_config();
  const auto res = run_sweep(cfg);
  REQUIRE(res.records.size() == 16);
  for (const auto& r : res.records) {
    CHECK(r.seed == derive_seed(42, static_cast<std::uint64_t>(r.n), static_cast<std::uint64_t>(r.trial)));
    CHECK(r.sigma_np1 == doctest::Approx(1.0 / static_cast<double>(r.n + 1)));
    CHECK_FALSE(r.failed);
    CHECK(chain_holds(r));
    CHECK(r.runtime_ms == 0.0);
    CHECK(r.coord_radius <= r.radius * (1 + 1e-12));
    if (r.n == 0) {
      CHECK(r.radius == 1.0);
      CHECK(r.error_an == 1.0);
      CHECK(r.k_used == 0);
      CHECK(std::isinf(r.ub_main));
    } else {
      CHECK(r.realization_ub_holds == 1.0);
      CHECK(r.k_used == std::max<std::int64_t>(r.n / 2, 1));
      CHECK(r.radius <= r.ub_main);
    }
  }
  REQUIRE(res.summary.cells.size() == 4);
  const auto& c0 = res.summary.cells[0];
  CHECK(c0.sigma_n == 1.0);
  CHECK(c0.radius.mean == 1.0);
  CHECK(res.summary.cells[2].ratio_opt >= 1.0);
  CHECK(res.summary.cells[2].chain_violations == 0);
}

TEST_CASE("CSV output is byte-identical across runs and thread counts") {
  auto cfg = small_config();
  const std::string a = to_csv(run_sweep(cfg).records);
  const std::string b = to_csv(run_sweep(cfg).records);
  cfg.threads = 3;
  const std::string c = to_csv(run_sweep(cfg).records);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(count_lines(a) == 17);
  cfg.master_seed = 43;
  CHECK(to_csv(run_sweep(cfg).records) != a);
}

TEST_CASE("m_rule grows the truncation with n") {
  auto cfg = small_config();
  cfg.n_list = {2, 4};
  cfg.m_rule = MRule{MRule::Kind::multiple, 16};
  const auto res = run_sweep(cfg);
  CHECK(res.records.front().m == 32);
  CHECK(res.records.back().m == 64);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  cfg.n_list = {96};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.n_list = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.trials = 0;
  CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
}

TEST_CASE("config JSON") {
  const auto j = json::parse(R"({
    "sequence": {"family": "exponential", "a": 0.5, "m": 40},
    "n_list": [1, 4],
    "m_rule": {"power": 1.5},
    "trials": 3,
    "master_seed": 9,
    "estimator_k_rule": {"fraction": 0.5},
    "outputs": {"coord_radius": true},
    "dense_cap": 128
  })");
  const auto cfg = sweep_config_from_json(j);
  CHECK(cfg.n_list == std::vector<std::int64_t>{1, 4});
  REQUIRE(cfg.m_rule.has_value());
  CHECK(cfg.m_for(4) == 8);
  CHECK(cfg.k_rule.kind == KRule::Kind::fraction);
  CHECK(cfg.outputs.coord_radius);
  CHECK(cfg.outputs.radius);
  CHECK(cfg.solver.dense_cap == 128);
  CHECK(sweep_config_from_json(to_json(cfg)).master_seed == 9);

  auto bad = j;
  bad["trails"] = 3;
  CHECK_THROWS_AS(sweep_config_from_json(bad), std::invalid_argument);
  bad = j;
  bad["estimator_k_rule"] = "third";
  CHECK_THROWS_AS(sweep_config_from_json(bad), std::invalid_argument);
  bad = j;
  bad["sequence"]["family"] = "gamma";
  CHECK_THROWS_AS(sweep_config_from_json(bad), std::invalid_argument);
}

TEST_CASE("summary JSON round trip for regime analysis") {
  const auto res = run_sweep(small_config());
  const json j = to_json(res.summary);
  CHECK(j.at("cells").size() == 4);
  const auto back = sweep_summary_from_json(json::parse(j.dump()));
  REQUIRE(back.cells.size() == 4);
  CHECK(back.cells[3].radius.mean == res.summary.cells[3].radius.mean);
  const auto a = analyze_regime(Regime::fast, res.summary);
  const auto b = analyze_regime(Regime::fast, back);
  CHECK(a.normalized == b.normalized);
}

TEST_CASE("regime analysis on a synthetic power law") {
  SweepSummary s;
  s.sequence = SemiAxes::polynomial(1.0, 0.0, 4096);
  for (std::int64_t n : {0, 4, 8, 16, 32, 64}) {
    CellSummary c;
    c.n = n;
    c.radius.mean = 3.0 / static_cast<double>(n + 1);
    c.sigma_np1 = 1.0 / static_cast<double>(n + 1);
    c.ratio_opt = c.radius.mean / c.sigma_np1;
    s.cells.push_back(c);
  }
  const auto fast = analyze_regime(Regime::fast, s);
  CHECK(fast.n.size() == 5);
  CHECK(fast.spread == doctest::Approx(1.0));
  CHECK(fast.fitted_constant == doctest::Approx(3.0));
  CHECK(fast.slope < -0.8);
  CHECK(fast.slope > -1.0);
}

TEST_CASE("dichotomy: radii are monotone along m for shared seeds") {
  const auto rep = dichotomy_experiment(0.25, 0.0, 4, {64, 256, 1024}, 0.5, 30, 5);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.monotone);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].frequency >= rep.rows[i - 1].frequency);
    CHECK(rep.rows[i].mean_radius >= rep.rows[i - 1].mean_radius * (1 - 1e-12));
  }
  CHECK(rep.rows.back().n_zero == n_zero(SemiAxes::polynomial(0.25, 0.0, 1024), 0.5));
  // every radius is at least sigma_{n+1} = 5^-1/4 > 0.5
  const auto easy = dichotomy_experiment(0.25, 0.0, 4, {64}, 0.5, 10, 5);
  CHECK(easy.rows[0].hits == 10);
}
