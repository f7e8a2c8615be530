#include "ellrad/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace ellrad {
namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* what) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw std::invalid_argument(std::string("unknown key '") + key + "' in " + what);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

MRule m_rule_from_json(const json& j) {
  if (!j.is_object() || j.size() != 1)
    throw std::invalid_argument("m_rule must be one of {\"fixed\":m}, {\"multiple\":c}, {\"power\":p}");
  const auto& [key, value] = *j.items().begin();
  MRule r;
  r.value = value.get<double>();
  if (key == "fixed") r.kind = MRule::Kind::fixed;
  else if (key == "multiple") r.kind = MRule::Kind::multiple;
  else if (key == "power") r.kind = MRule::Kind::power;
  else throw std::invalid_argument("unknown m_rule '" + key + "'");
  return r;
}

json to_json(const MRule& r) {
  const char* names[] = {"fixed", "multiple", "power"};
  return json{{names[static_cast<int>(r.kind)], r.value}};
}

KRule k_rule_from_json(const json& j) {
  KRule r;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "half") r.kind = KRule::Kind::half;
    else if (s == "full") r.kind = KRule::Kind::full;
    else throw std::invalid_argument("unknown estimator_k_rule '" + s + "'");
    return r;
  }
  if (j.is_object() && j.size() == 1 && j.contains("fraction")) {
    r.kind = KRule::Kind::fraction;
    r.fraction = j.at("fraction").get<double>();
    return r;
  }
  throw std::invalid_argument("estimator_k_rule must be \"half\", \"full\" or {\"fraction\":r}");
}

json to_json(const KRule& r) {
  switch (r.kind) {
    case KRule::Kind::half: return "half";
    case KRule::Kind::full: return "full";
    case KRule::Kind::fraction: return json{{"fraction", r.fraction}};
  }
  return nullptr;
}

}  // namespace

SemiAxes semiaxes_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("sequence spec must be a JSON object");
  const auto family = j.at("family").get<std::string>();
  const double scale = get_or(j, "scale", 1.0);
  if (family == "polynomial") {
    reject_unknown(j, {"family", "alpha", "beta", "m", "scale"}, "polynomial sequence");
    return SemiAxes::polynomial(j.at("alpha").get<double>(), get_or(j, "beta", 0.0),
                                j.at("m").get<std::int64_t>(), scale);
  }
  if (family == "exponential") {
    reject_unknown(j, {"family", "a", "m", "scale"}, "exponential sequence");
    return SemiAxes::exponential(j.at("a").get<double>(), j.at("m").get<std::int64_t>(), scale);
  }
  if (family == "explicit") {
    reject_unknown(j, {"family", "values", "m", "scale"}, "explicit sequence");
    auto seq = SemiAxes::from_values(j.at("values").get<std::vector<double>>(), scale);
    if (j.contains("m")) seq = seq.with_m(j.at("m").get<std::int64_t>());
    return seq;
  }
  throw std::invalid_argument("unknown sequence family '" + family + "'");
}

json to_json(const SemiAxes& seq) {
  json j;
  if (const auto* p = std::get_if<Polynomial>(&seq.family())) {
    j = {{"family", "polynomial"}, {"alpha", p->alpha}, {"beta", p->beta}};
  } else if (const auto* e = std::get_if<Exponential>(&seq.family())) {
    j = {{"family", "exponential"}, {"a", e->a}};
  } else {
    j = {{"family", "explicit"}, {"values", std::get<Explicit>(seq.family()).values}};
  }
  j["m"] = seq.m();
  j["scale"] = seq.scale();
  return j;
}

SweepConfig sweep_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("sweep config must be a JSON object");
  reject_unknown(j,
                 {"sequence", "n_list", "m_rule", "trials", "master_seed", "estimator_k_rule",
                  "outputs", "eps", "c", "s", "coord_index", "threads", "timing", "out_path",
                  "dense_cap", "tol"},
                 "sweep config");
  SweepConfig cfg;
  cfg.sequence = semiaxes_from_json(j.at("sequence"));
  cfg.n_list = j.at("n_list").get<std::vector<std::int64_t>>();
  if (j.contains("m_rule")) cfg.m_rule = m_rule_from_json(j.at("m_rule"));
  cfg.trials = get_or(j, "trials", cfg.trials);
  cfg.master_seed = get_or(j, "master_seed", cfg.master_seed);
  if (j.contains("estimator_k_rule")) cfg.k_rule = k_rule_from_json(j.at("estimator_k_rule"));
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    reject_unknown(o, {"radius", "coord_radius", "error_an", "bounds"}, "outputs");
    cfg.outputs.radius = get_or(o, "radius", cfg.outputs.radius);
    cfg.outputs.coord_radius = get_or(o, "coord_radius", cfg.outputs.coord_radius);
    cfg.outputs.error_an = get_or(o, "error_an", cfg.outputs.error_an);
    cfg.outputs.bounds = get_or(o, "bounds", cfg.outputs.bounds);
  }
  cfg.eps = get_or(j, "eps", cfg.eps);
  cfg.c = get_or(j, "c", cfg.c);
  cfg.s = get_or(j, "s", cfg.s);
  cfg.coord_index = get_or(j, "coord_index", cfg.coord_index);
  cfg.threads = get_or(j, "threads", cfg.threads);
  cfg.timing = get_or(j, "timing", cfg.timing);
  cfg.out_path = get_or(j, "out_path", cfg.out_path);
  cfg.solver.dense_cap = get_or<Eigen::Index>(j, "dense_cap", cfg.solver.dense_cap);
  cfg.solver.tol = get_or(j, "tol", cfg.solver.tol);
  return cfg;
}

json to_json(const SweepConfig& cfg) {
  json j = {{"sequence", to_json(cfg.sequence)},
            {"n_list", cfg.n_list},
            {"trials", cfg.trials},
            {"master_seed", cfg.master_seed},
            {"estimator_k_rule", to_json(cfg.k_rule)},
            {"outputs",
             {{"radius", cfg.outputs.radius},
              {"coord_radius", cfg.outputs.coord_radius},
              {"error_an", cfg.outputs.error_an},
              {"bounds", cfg.outputs.bounds}}},
            {"eps", cfg.eps},
            {"c", cfg.c},
            {"s", cfg.s},
            {"coord_index", cfg.coord_index},
            {"threads", cfg.threads},
            {"timing", cfg.timing},
            {"out_path", cfg.out_path},
            {"dense_cap", cfg.solver.dense_cap},
            {"tol", cfg.solver.tol}};
  if (cfg.m_rule) j["m_rule"] = to_json(*cfg.m_rule);
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

namespace {

double number_or_nan(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

Distribution distribution_from_json(const json& j) {
  Distribution d;
  d.mean = number_or_nan(j, "mean");
  d.std_error = number_or_nan(j, "std_error");
  d.median = number_or_nan(j, "median");
  d.q05 = number_or_nan(j, "q05");
  d.q95 = number_or_nan(j, "q95");
  return d;
}

}  // namespace

SweepSummary sweep_summary_from_json(const json& j) {
  SweepSummary s;
  s.sequence = semiaxes_from_json(j.at("sequence"));
  s.m_rule = get_or<std::string>(j, "m_rule", "");
  s.k_rule = get_or<std::string>(j, "estimator_k_rule", "");
  s.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  for (const auto& c : j.at("cells")) {
    CellSummary cell;
    cell.n = c.at("n").get<std::int64_t>();
    cell.m = get_or<std::int64_t>(c, "m", 0);
    cell.k = get_or<std::int64_t>(c, "k", 0);
    cell.trials = get_or<std::int64_t>(c, "trials", 0);
    cell.sigma_n = number_or_nan(c, "sigma_n");
    cell.sigma_np1 = number_or_nan(c, "sigma_np1");
    if (c.contains("radius")) cell.radius = distribution_from_json(c.at("radius"));
    cell.radius.mean = number_or_nan(c, "mean_radius");
    if (c.contains("error_an")) cell.error_an = distribution_from_json(c.at("error_an"));
    cell.ratio_opt = number_or_nan(c, "ratio_opt");
    cell.ratio_log = number_or_nan(c, "ratio_log");
    cell.tail_ratio = number_or_nan(c, "tail_ratio");
    s.cells.push_back(cell);
  }
  return s;
}

json to_json(const BoundReport& r) {
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = number(v);
  return {{"name", r.name},
          {"direction", r.direction == BoundDirection::upper ? "upper" : "lower"},
          {"lhs", r.evaluated ? number(r.lhs) : json(nullptr)},
          {"rhs", number(r.rhs)},
          {"holds", r.evaluated ? json(r.holds) : json(nullptr)},
          {"applicable", r.applicable},
          {"vacuous", r.vacuous()},
          {"claimed_failure_prob", number(r.claimed_failure_prob)},
          {"params", params}};
}

json to_json(const TailCheck& t) {
  return {{"name", t.name},
          {"trials", t.trials},
          {"hits", t.hits},
          {"threshold", number(t.threshold)},
          {"claimed_bound", number(t.claimed_bound)},
          {"raw_bound", number(t.raw_bound)},
          {"empirical_freq", number(t.empirical_freq)},
          {"lower_conf_95", number(t.lower_conf_95)},
          {"upper_conf_95", number(t.upper_conf_95)},
          {"verdict", to_string(t.verdict)},
          {"vacuous", t.vacuous}};
}

json to_json(const SectionRadius& r) {
  return {{"radius", number(r.value)},
          {"n", r.n},
          {"m", r.m},
          {"method", to_string(r.method)},
          {"iterations", r.iterations},
          {"residual", number(r.residual)},
          {"degenerate", r.degenerate}};
}

json to_json(const Distribution& d) {
  return {{"mean", number(d.mean)},
          {"std_error", number(d.std_error)},
          {"median", number(d.median)},
          {"q05", number(d.q05)},
          {"q95", number(d.q95)}};
}

json to_json(const CellSummary& c) {
  return {{"n", c.n},
          {"m", c.m},
          {"k", c.k},
          {"trials", c.trials},
          {"failures", c.failures},
          {"sigma_n", number(c.sigma_n)},
          {"sigma_np1", number(c.sigma_np1)},
          {"mean_radius", number(c.radius.mean)},
          {"median_radius", number(c.radius.median)},
          {"q05", number(c.radius.q05)},
          {"q95", number(c.radius.q95)},
          {"radius", to_json(c.radius)},
          {"error_an", to_json(c.error_an)},
          {"coord_radius", to_json(c.coord_radius)},
          {"ratio_opt", number(c.ratio_opt)},
          {"ratio_log", number(c.ratio_log)},
          {"ratio_opt_min", number(c.ratio_opt_min)},
          {"tail_ratio", number(c.tail_ratio)},
          {"ub_main", number(c.ub_main)},
          {"ub_main_claimed", number(c.ub_main_claimed)},
          {"ub_exp", number(c.ub_exp)},
          {"lb_main", number(c.lb_main)},
          {"lb_main_claimed", number(c.lb_main_claimed)},
          {"lb_main_applicable", c.lb_main_applicable},
          {"freq_above_ub_main", number(c.freq_above_ub_main)},
          {"freq_below_lb_main", number(c.freq_below_lb_main)},
          {"chain_violations", c.chain_violations},
          {"realization_violations", c.realization_violations}};
}

json to_json(const SweepSummary& s) {
  json cells = json::array();
  for (const auto& c : s.cells) cells.push_back(to_json(c));
  return {{"sequence", to_json(s.sequence)},
          {"m_rule", s.m_rule},
          {"estimator_k_rule", s.k_rule},
          {"master_seed", s.master_seed},
          {"cells", cells}};
}

json to_json(const DichotomyReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"m", row.m},
                    {"n_zero", row.n_zero},
                    {"hits", row.hits},
                    {"frequency", number(row.frequency)},
                    {"threshold", number(row.threshold)},
                    {"claimed_lower", number(row.claimed_lower)},
                    {"mean_radius", number(row.mean_radius)},
                    {"failures", row.failures}});
  return {{"alpha", r.alpha}, {"beta", r.beta},   {"n", r.n},
          {"eps", r.eps},     {"trials", r.trials}, {"seed", r.seed},
          {"rows", rows},     {"monotone", r.monotone}, {"n_within_n_zero", r.n_within_n_zero}};
}

json to_json(const RegimeSeries& s) {
  json values = json::array();
  for (const double v : s.normalized) values.push_back(number(v));
  return {{"regime", to_string(s.regime)},
          {"n", s.n},
          {"normalized", values},
          {"min", number(s.min)},
          {"max", number(s.max)},
          {"spread", number(s.spread)},
          {"slope", number(s.slope)},
          {"slope_residual", number(s.slope_residual)},
          {"fitted_constant", number(s.fitted_constant)}};
}

json to_json(const RegimeReport& r) {
  json series = json::array();
  for (const auto& s : r.series) series.push_back(to_json(s));
  return {{"series", series}};
}

}  // namespace ellrad
