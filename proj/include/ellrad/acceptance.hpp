#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ellrad {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0: no runtime limit
};

struct AcceptanceOptions {
  int threads = 1;
  std::uint64_t seed = 20240501;
  std::string out_dir;  // when set, sweep CSVs and summaries are written here
  std::vector<int> only;  // empty: all criteria
};

/// Runs acceptance criteria 1-9. Criterion 3 is evaluated on the records of
/// the sweeps run for criteria 4, 5 and 6, so it runs them if they were not
/// selected. `progress` receives each result as it completes.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& progress = {});

/// "[PASS] 1 name: detail (12.3 s)".
std::string format_result(const CriterionResult& result);

}  // namespace ellrad
