#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace ellrad {

struct Polynomial {
  double alpha = 1.0;
  double beta = 0.0;
};

struct Exponential {
  double a = 0.5;
};

struct Explicit {
  std::vector<double> values;
};

using Family = std::variant<Polynomial, Exponential, Explicit>;

/// Non-increasing semi-axis sequence sigma_1 >= sigma_2 >= ... truncated at m
/// (sigma_j = 0 for j > m).
///
/// Values and all tail sums are tabulated once at construction; the object is
/// immutable afterwards and may be shared between threads.
///
/// Families:
///   polynomial:  sigma_j = scale * j^-alpha * ln(j+1)^-beta
///   exponential: sigma_j = scale * a^j
///   explicit:    sigma_j = scale * values[j-1], m = values.size()
class SemiAxes {
 public:
  /// Throws std::invalid_argument when the sequence is not non-increasing,
  /// sigma_1 <= 0, or parameters are out of range.
  SemiAxes(Family family, std::int64_t m, double scale = 1.0);

  static SemiAxes polynomial(double alpha, double beta, std::int64_t m, double scale = 1.0);
  static SemiAxes exponential(double a, std::int64_t m, double scale = 1.0);
  static SemiAxes from_values(std::vector<double> values, double scale = 1.0);

  const Family& family() const noexcept { return family_; }
  std::int64_t m() const noexcept { return m_; }
  double scale() const noexcept { return scale_; }

  /// sigma_j for j >= 1 (0 beyond the truncation).
  double sigma(std::int64_t j) const;
  /// sigma_1 .. sigma_m as a contiguous view.
  std::span<const double> values() const noexcept { return values_; }
  /// Number of leading strictly positive semi-axes.
  std::int64_t support() const noexcept { return support_; }

  /// sum_{k < j <= m} sigma_j^2 (k >= 0; 0 for k >= m).
  double tail_sq(std::int64_t k) const;

  /// sum_{j > m} sigma_j^2 for the untruncated family (0 for explicit lists,
  /// +inf when the family is not square-summable).
  double neglected_tail_sq() const;

  /// Same sequence with m replaced (explicit lists are cut or zero-padded).
  SemiAxes with_m(std::int64_t m) const;
  /// Same sequence with every value multiplied by c.
  SemiAxes scaled(double c) const;

 private:
  Family family_;
  std::int64_t m_;
  double scale_;
  std::int64_t support_ = 0;
  std::vector<double> values_;
  std::vector<double> tails_;  // tails_[k] = sum_{j>k} sigma_j^2, size m+1
};

/// sigma_j (0 when j > m).
double sigma_value(const SemiAxes& seq, std::int64_t j);

/// sum_{j>k, j<=m} sigma_j^2, compensated and accumulated smallest-first.
double tail_sq(const SemiAxes& seq, std::int64_t k);

/// sigma_k^-2 * sum_{j>k} sigma_j^2 with a/0 = inf (a > 0) and 0/0 = 0.
double c_k(const SemiAxes& seq, std::int64_t k);

/// floor(eps^2 / (3 sigma_1^2) * sum_{j>=2} sigma_j^2): the largest n for which
/// random information is provably no better than sigma_1 (1 - eps).
std::int64_t n_zero(const SemiAxes& seq, double eps);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace ellrad
