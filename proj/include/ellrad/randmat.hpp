#pragma once

#include "ellrad/errors.hpp"
#include "ellrad/lanczos.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace ellrad {

/// Upper bound on bytes a single materialized Gaussian matrix may occupy.
inline constexpr std::int64_t kDefaultMemoryCap = std::int64_t{2} << 30;

/// n x m standard Gaussian matrix whose entry (i, j) depends only on
/// (seed, i, j). Prefixes in either dimension are therefore nested: the first
/// n' rows of sample(seed, n, m) are sample(seed, n', m), and growing m keeps
/// the existing columns.
///
/// Entries are generated on demand; `materialized()` returns a copy that
/// caches the full matrix for repeated use within one trial.
class GaussianInfo {
 public:
  GaussianInfo(std::uint64_t seed, std::int64_t n, std::int64_t m);

  std::uint64_t seed() const noexcept { return seed_; }
  std::int64_t n() const noexcept { return n_; }
  std::int64_t m() const noexcept { return m_; }

  double entry(std::int64_t i, std::int64_t j) const;

  /// Rows [row0, row0+rows) x cols [col0, col0+cols), each column j multiplied
  /// by weights[j - col0] when weights is non-empty.
  Eigen::MatrixXd block(std::int64_t row0, std::int64_t rows, std::int64_t col0,
                        std::int64_t cols, std::span<const double> weights = {}) const;

  /// Throws ResourceError when n * m doubles exceed `memory_cap` bytes.
  GaussianInfo materialized(std::int64_t memory_cap = kDefaultMemoryCap) const;
  bool is_materialized() const noexcept { return static_cast<bool>(cache_); }

 private:
  std::uint64_t seed_;
  std::int64_t n_;
  std::int64_t m_;
  std::shared_ptr<const Eigen::MatrixXd> cache_;
};

/// sample(seed, n, m): see GaussianInfo. Throws ResourceError over the cap.
GaussianInfo sample(std::uint64_t seed, std::int64_t n, std::int64_t m,
                    std::int64_t memory_cap = kDefaultMemoryCap);

/// Half-open index range [begin, end), zero-based.
struct IndexRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  std::int64_t size() const noexcept { return end - begin; }
};

/// Sub-block of a Gaussian matrix with column weights:
/// entry (i, j) = column_weights[j - J.begin] * g_ij. Unit weights give G_{I,J};
/// weights sigma_j give Sigma_{I,J} = G_{I,J} diag(sigma).
struct StructuredMatrix {
  GaussianInfo base;
  IndexRange rows;
  IndexRange cols;
  std::vector<double> column_weights;  // empty means all ones

  Eigen::MatrixXd materialize() const;
};

/// Sigma_{[n], J} for the given semi-axes (weights sigma_j, j in J).
StructuredMatrix weighted_columns(const GaussianInfo& g, std::span<const double> sigma,
                                  IndexRange cols);

enum class SvMode { all_dense, extreme_iterative };

inline constexpr Eigen::Index kDefaultDenseCap = 2048;

/// Singular values in non-increasing order. all_dense returns min(r, c)
/// values and requires min(r, c) <= dense_cap; extreme_iterative returns
/// {s_1, s_min} with s_min the min(r, c)-th singular value.
/// Throws NumericalError when the iterative solver does not converge.
std::vector<double> singular_values(const Eigen::MatrixXd& a, SvMode mode, double tol = 1e-10,
                                    Eigen::Index dense_cap = kDefaultDenseCap);
std::vector<double> singular_values(const StructuredMatrix& a, SvMode mode, double tol = 1e-10,
                                    Eigen::Index dense_cap = kDefaultDenseCap);

/// Orthogonal projector onto ker(S) for a short-wide S (rows <= cols),
/// factored once through a column-pivoted Householder QR of S^T:
/// P v = v - Q (Q^T v), where Q spans the numerical row space of S.
///
/// The rank cutoff is max(rows, cols) * eps * s_1(S), evaluated on the
/// diagonal of R. Rank deficiency is recorded, not thrown.
class KernelProjector {
 public:
  explicit KernelProjector(const Eigen::MatrixXd& s, double rank_tol = -1.0);

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  void apply_in_place(Eigen::VectorXd& v) const;

  Eigen::Index dim() const noexcept { return cols_; }
  Eigen::Index rank() const noexcept { return row_space_.cols(); }
  Eigen::Index kernel_dim() const noexcept { return cols_ - rank(); }
  bool rank_deficient() const noexcept { return rank() < rows_; }
  /// Orthonormal basis of the row space (cols x rank).
  const Eigen::MatrixXd& row_space() const noexcept { return row_space_; }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Eigen::MatrixXd row_space_;
};

Eigen::VectorXd kernel_projector_apply(const Eigen::MatrixXd& s, const Eigen::VectorXd& v,
                                       double tol = -1.0);

/// max{ ||D y|| : ||y|| = 1, S y = 0 } with D = diag(weights): the largest
/// singular value of D restricted to ker S. Iterates on y -> D P y.
IterativeResult top_sv_of_projected_diag(const Eigen::MatrixXd& s,
                                         std::span<const double> weights,
                                         const IterativeOptions& opts = {});
IterativeResult top_sv_of_projected_diag(const KernelProjector& projector,
                                         std::span<const double> weights,
                                         const IterativeOptions& opts = {});

}  // namespace ellrad

namespace ellrad {

/// Orthonormal basis (cols x (cols - rank)) of ker S from the full Householder
/// factor; O(cols^2 * rows) memory and time, intended for dense paths.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& s, double rank_tol = -1.0);

}  // namespace ellrad
