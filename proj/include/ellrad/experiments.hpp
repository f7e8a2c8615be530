#pragma once

#include "ellrad/geometry.hpp"
#include "ellrad/sequences.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ellrad {

/// Truncation dimension as a function of n.
struct MRule {
  enum class Kind { fixed, multiple, power };
  Kind kind = Kind::multiple;
  double value = 64.0;  // m, c in m = c n, or p in m = n^p

  std::int64_t m_for(std::int64_t n) const;
  std::string describe() const;
};

/// Coordinate budget k of the least-squares estimator as a function of n.
struct KRule {
  enum class Kind { half, full, fraction };
  Kind kind = Kind::half;
  double fraction = 0.5;

  /// max(1, floor(n/2)), n, or clamp(floor(r n), 1, n); 0 when n = 0.
  std::int64_t k_for(std::int64_t n) const;
  std::string describe() const;
};

struct SweepOutputs {
  bool radius = true;
  bool coord_radius = false;
  bool error_an = true;
  bool bounds = true;
};

struct SweepConfig {
  SemiAxes sequence = SemiAxes::polynomial(1.0, 0.0, 64);
  std::vector<std::int64_t> n_list;
  std::optional<MRule> m_rule;  // unset: fixed at sequence.m()
  std::int64_t trials = 1;
  std::uint64_t master_seed = 1;
  KRule k_rule;
  SweepOutputs outputs;
  double eps = 0.5;  // lb_main
  double c = 1.0;    // ub_exp
  double s = 10.0;   // ub_exp
  std::int64_t coord_index = 1;
  int threads = 1;
  bool timing = false;  // runtime_ms is 0 unless set, keeping CSV output reproducible
  std::string out_path = "sweep.csv";
  SolverOptions solver;

  std::int64_t m_for(std::int64_t n) const;
  /// Throws std::invalid_argument listing the first violated requirement.
  void validate() const;
};

/// One trial of one sweep cell. Quantities not computed are NaN.
struct TrialRecord {
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t trial = 0;
  double radius = 0.0;
  double sigma_np1 = 0.0;
  double error_an = 0.0;
  std::int64_t k_used = 0;
  double ub_main = 0.0;
  double ub_exp = 0.0;
  double lb_main = 0.0;
  double realization_ub_holds = 0.0;  // 1, 0, or NaN when not evaluated
  double runtime_ms = 0.0;
  double coord_radius = 0.0;
  bool failed = false;
  std::string failure;
};

/// Sample quantiles use linear interpolation between order statistics.
struct Distribution {
  double mean = 0.0;
  double std_error = 0.0;
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};
Distribution describe(std::vector<double> values);

struct CellSummary {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t k = 0;
  std::int64_t trials = 0;
  std::int64_t failures = 0;
  double sigma_n = 0.0;  // sigma_1 when n = 0
  double sigma_np1 = 0.0;
  Distribution radius;
  Distribution error_an;
  Distribution coord_radius;
  double ratio_opt = 0.0;  // mean radius / sigma_{n+1}
  double ratio_log = 0.0;  // mean radius / (sigma_{n+1} sqrt(ln(n+1)))
  double ratio_opt_min = 0.0;
  double tail_ratio = 0.0;  // neglected tail over the tail ub_main uses
  double ub_main = 0.0;
  double ub_main_claimed = 0.0;
  double ub_exp = 0.0;
  double lb_main = 0.0;
  double lb_main_claimed = 0.0;
  bool lb_main_applicable = false;
  double freq_above_ub_main = 0.0;
  double freq_below_lb_main = 0.0;
  std::int64_t chain_violations = 0;
  std::int64_t realization_violations = 0;
};

struct SweepSummary {
  SemiAxes sequence = SemiAxes::polynomial(1.0, 0.0, 1);
  std::string m_rule;
  std::string k_rule;
  std::uint64_t master_seed = 0;
  std::vector<CellSummary> cells;
};

struct SweepResult {
  std::vector<TrialRecord> records;  // sorted by (n, trial)
  SweepSummary summary;
};

/// Tolerances of the per-record ordering chain
/// sigma_{n+1} (1 - rel) <= radius <= error_an + abs.
inline constexpr double kChainRelTol = 1e-8;
inline constexpr double kChainAbsTol = 1e-8;
bool chain_holds(const TrialRecord& r);

/// Runs every (n, trial) cell. The trial seed is derive_seed(master_seed, n,
/// trial) and results do not depend on `threads`. Throws NumericalError when
/// more than 1% of trials fail.
SweepResult run_sweep(const SweepConfig& config);

inline constexpr const char* kCsvHeader =
    "seed,n,m,trial,radius,sigma_np1,error_an,k_used,ub_main,ub_exp,lb_main,"
    "realization_ub_holds,runtime_ms";
void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::string to_csv(const std::vector<TrialRecord>& records);

struct DichotomyRow {
  std::int64_t m = 0;
  std::int64_t n_zero = 0;
  std::int64_t hits = 0;
  double frequency = 0.0;
  double threshold = 0.0;
  double claimed_lower = 0.0;  // 1 - 5 exp(-n_zero / 64), may be negative
  double mean_radius = 0.0;
  std::int64_t failures = 0;
};

struct DichotomyReport {
  double alpha = 0.0;
  double beta = 0.0;
  std::int64_t n = 0;
  double eps = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<DichotomyRow> rows;
  bool monotone = true;           // frequencies non-decreasing in m
  bool n_within_n_zero = true;    // n <= n_zero at the largest m
};

/// Frequency of R_n >= sigma_1 (1 - eps) for polynomial(alpha, beta) at each
/// truncation in m_list. Trial seeds do not depend on m, and the Gaussian
/// columns are nested in m, so each realization's radius is non-decreasing
/// along m_list.
DichotomyReport dichotomy_experiment(double alpha, double beta, std::int64_t n,
                                     const std::vector<std::int64_t>& m_list, double eps,
                                     std::int64_t trials, std::uint64_t seed, int threads = 1,
                                     const SolverOptions& solver = {});

enum class Regime { slow, critical, fast, exponential };
const char* to_string(Regime regime);

struct RegimeSeries {
  Regime regime = Regime::fast;
  std::vector<std::int64_t> n;
  std::vector<double> normalized;
  double min = 0.0;
  double max = 0.0;
  double spread = 0.0;  // max / min
  double slope = 0.0;   // least-squares slope of ln E[R_n] against ln n
  double slope_residual = 0.0;  // root mean square residual of that fit
  double fitted_constant = 0.0; // max of `normalized` (K for the exponential case)
};

/// Normalizers: slow R/sigma_1, critical R/(sigma_{n+1} sqrt(ln(n+1))),
/// fast R/sigma_{n+1}, exponential e(A_n)/(n^2 sigma_n) with sigma_n = a^n at scale 1.
/// Cells with n = 0 are skipped.
RegimeSeries analyze_regime(Regime regime, const SweepSummary& summary);

struct RegimeReport {
  std::vector<RegimeSeries> series;
};
RegimeReport regime_report(const std::vector<std::pair<Regime, SweepSummary>>& inputs);

}  // namespace ellrad
