#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ellrad {

/// Iterative solver did not reach its tolerance. Carries the last iterate's
/// diagnostics so callers can report them instead of silently using the value.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int iterations, double residual, double best_estimate)
      : std::runtime_error(what),
        iterations_(iterations),
        residual_(residual),
        best_estimate_(best_estimate) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }
  double best_estimate() const noexcept { return best_estimate_; }

 private:
  int iterations_;
  double residual_;
  double best_estimate_;
};

/// A matrix expected to have full column rank does not, under the rank cutoff.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, long rank, long expected)
      : std::runtime_error(what), rank_(rank), expected_(expected) {}
  long rank() const noexcept { return rank_; }
  long expected() const noexcept { return expected_; }

 private:
  long rank_;
  long expected_;
};

/// Requested allocation exceeds the configured memory cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ellrad
