#pragma once

#include "ellrad/bounds.hpp"
#include "ellrad/concentration.hpp"
#include "ellrad/experiments.hpp"
#include "ellrad/geometry.hpp"
#include "ellrad/sequences.hpp"

#include <json.hpp>

#include <string>

namespace ellrad {

using nlohmann::json;

/// {"family":"polynomial","alpha":1,"beta":0,"m":4096,"scale":1}
/// {"family":"exponential","a":0.5,"m":64}
/// {"family":"explicit","values":[...]}   (optional "m" pads or cuts)
/// Throws std::invalid_argument on unknown families or missing keys.
SemiAxes semiaxes_from_json(const json& j);
json to_json(const SemiAxes& seq);

/// Sweep configuration. Keys (all but "sequence" and "n_list" optional):
///   sequence, n_list, m_rule ({"fixed":m} | {"multiple":c} | {"power":p}),
///   trials, master_seed, estimator_k_rule ("half" | "full" | {"fraction":r}),
///   outputs {radius, coord_radius, error_an, bounds}, eps, c, s, coord_index,
///   threads, timing, out_path, dense_cap, tol.
/// Unknown keys are rejected.
SweepConfig sweep_config_from_json(const json& j);
json to_json(const SweepConfig& config);

json load_json_file(const std::string& path);

/// Reads back the fields of a summary written by to_json(SweepSummary) that
/// regime analysis needs (null numbers become NaN).
SweepSummary sweep_summary_from_json(const json& j);

// Non-finite numbers serialize as null.
json to_json(const BoundReport& report);
json to_json(const TailCheck& check);
json to_json(const SectionRadius& radius);
json to_json(const Distribution& d);
json to_json(const CellSummary& cell);
json to_json(const SweepSummary& summary);
json to_json(const DichotomyReport& report);
json to_json(const RegimeSeries& series);
json to_json(const RegimeReport& report);

}  // namespace ellrad
