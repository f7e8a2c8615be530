#include "ellrad/randmat.hpp"

#include "ellrad/philox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ellrad {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_cap(std::int64_t n, std::int64_t m, std::int64_t memory_cap) {
  const long double bytes = static_cast<long double>(n) * static_cast<long double>(m) * 8.0L;
  if (bytes > static_cast<long double>(memory_cap))
    throw ResourceError("Gaussian matrix of " + std::to_string(n) + " x " + std::to_string(m) +
                        " exceeds the memory cap of " + std::to_string(memory_cap) + " bytes");
}

double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) * kEps;
}

}  // namespace

GaussianInfo::GaussianInfo(std::uint64_t seed, std::int64_t n, std::int64_t m)
    : seed_(seed), n_(n), m_(m) {
  if (n < 0 || m < 1) throw std::invalid_argument("GaussianInfo needs n >= 0 and m >= 1");
}

double GaussianInfo::entry(std::int64_t i, std::int64_t j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= m_) throw std::out_of_range("GaussianInfo::entry");
  if (cache_) return (*cache_)(i, j);
  return normal_at(seed_, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
}

Eigen::MatrixXd GaussianInfo::block(std::int64_t row0, std::int64_t rows, std::int64_t col0,
                                    std::int64_t cols, std::span<const double> weights) const {
  if (row0 < 0 || rows < 0 || col0 < 0 || cols < 0 || row0 + rows > n_ || col0 + cols > m_)
    throw std::out_of_range("GaussianInfo::block outside the matrix");
  if (!weights.empty() && static_cast<std::int64_t>(weights.size()) != cols)
    throw std::invalid_argument("GaussianInfo::block: weight count must match column count");

  Eigen::MatrixXd out(rows, cols);
  if (cache_) {
    out = cache_->block(row0, col0, rows, cols);
  } else {
    const std::int64_t end = col0 + cols;
    for (std::int64_t i = 0; i < rows; ++i) {
      const auto row = static_cast<std::uint64_t>(row0 + i);
      std::int64_t j = col0;
      if (j < end && (j & 1)) {
        out(i, 0) = normal_pair(seed_, row, static_cast<std::uint64_t>(j) >> 1)[1];
        ++j;
      }
      for (; j + 1 < end; j += 2) {
        const auto z = normal_pair(seed_, row, static_cast<std::uint64_t>(j) >> 1);
        out(i, j - col0) = z[0];
        out(i, j + 1 - col0) = z[1];
      }
      if (j < end) out(i, j - col0) = normal_pair(seed_, row, static_cast<std::uint64_t>(j) >> 1)[0];
    }
  }
  if (!weights.empty())
    for (std::int64_t j = 0; j < cols; ++j) out.col(j) *= weights[j];
  return out;
}

GaussianInfo GaussianInfo::materialized(std::int64_t memory_cap) const {
  if (cache_) return *this;
  check_cap(n_, m_, memory_cap);
  GaussianInfo copy = *this;
  copy.cache_ = std::make_shared<const Eigen::MatrixXd>(block(0, n_, 0, m_));
  return copy;
}

GaussianInfo sample(std::uint64_t seed, std::int64_t n, std::int64_t m, std::int64_t memory_cap) {
  if (n < 1 || m < 1) throw std::invalid_argument("sample needs n >= 1 and m >= 1");
  check_cap(n, m, memory_cap);
  return GaussianInfo(seed, n, m);
}

Eigen::MatrixXd StructuredMatrix::materialize() const {
  return base.block(rows.begin, rows.size(), cols.begin, cols.size(), column_weights);
}

StructuredMatrix weighted_columns(const GaussianInfo& g, std::span<const double> sigma,
                                  IndexRange cols) {
  if (cols.begin < 0 || cols.end > static_cast<std::int64_t>(sigma.size()) || cols.end > g.m())
    throw std::out_of_range("weighted_columns: column range outside sigma or G");
  return StructuredMatrix{g, IndexRange{0, g.n()}, cols,
                          std::vector<double>(sigma.begin() + cols.begin, sigma.begin() + cols.end)};
}

std::vector<double> singular_values(const Eigen::MatrixXd& a, SvMode mode, double tol,
                                    Eigen::Index dense_cap) {
  const Eigen::Index small = std::min(a.rows(), a.cols());
  if (small == 0) return {};
  if (mode == SvMode::all_dense) {
    if (small > dense_cap)
      throw std::invalid_argument("dense singular values need min(rows, cols) <= " +
                                  std::to_string(dense_cap));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const Eigen::VectorXd s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
  }

  IterativeOptions opts;
  opts.tol = tol;
  opts.noise_scale = a.cwiseAbs().maxCoeff();
  const IterativeResult top = top_singular_value(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = a * x; },
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = a.transpose() * x; },
      a.rows(), a.cols(), opts);
  if (!top.converged)
    throw NumericalError("largest singular value did not converge", top.iterations, top.residual,
                         top.value);

  // s_min(A) = s_min(R) for the triangular factor of the tall orientation,
  // found as 1 / s_1(R^-1).
  const Eigen::MatrixXd tall = a.rows() >= a.cols() ? a : Eigen::MatrixXd(a.transpose());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(tall);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  if ((r.diagonal().array() == 0.0).any()) return {top.value, 0.0};
  const auto upper = r.triangularView<Eigen::Upper>();
  opts.noise_scale = 0.0;
  const IterativeResult inv = top_singular_value(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = upper.solve(x); },
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = upper.transpose().solve(x); },
      small, small, opts);
  if (!inv.converged)
    throw NumericalError("smallest singular value did not converge", inv.iterations,
                         inv.residual, inv.value > 0.0 ? 1.0 / inv.value : 0.0);
  return {top.value, inv.value > 0.0 ? 1.0 / inv.value : 0.0};
}

std::vector<double> singular_values(const StructuredMatrix& a, SvMode mode, double tol,
                                    Eigen::Index dense_cap) {
  return singular_values(a.materialize(), mode, tol, dense_cap);
}

KernelProjector::KernelProjector(const Eigen::MatrixXd& s, double rank_tol)
    : rows_(s.rows()), cols_(s.cols()) {
  if (rows_ > cols_)
    throw std::invalid_argument("KernelProjector needs rows <= cols (short-wide matrix)");
  if (rows_ == 0) {
    row_space_.resize(cols_, 0);
    return;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s.transpose());
  qr.setThreshold(rank_tol > 0.0 ? rank_tol : default_rank_tol(rows_, cols_));
  const Eigen::Index rank = qr.rank();
  row_space_ = qr.householderQ().setLength(qr.nonzeroPivots()) *
               Eigen::MatrixXd::Identity(cols_, rank);
}

Eigen::VectorXd KernelProjector::apply(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = v;
  apply_in_place(out);
  return out;
}

void KernelProjector::apply_in_place(Eigen::VectorXd& v) const {
  if (v.size() != cols_) throw std::invalid_argument("KernelProjector: vector length mismatch");
  if (row_space_.cols() == 0) return;
  const Eigen::VectorXd coeffs = row_space_.transpose() * v;
  v.noalias() -= row_space_ * coeffs;
}

Eigen::VectorXd kernel_projector_apply(const Eigen::MatrixXd& s, const Eigen::VectorXd& v,
                                       double tol) {
  return KernelProjector(s, tol).apply(v);
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& s, double rank_tol) {
  const Eigen::Index cols = s.cols();
  if (s.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s.transpose());
  qr.setThreshold(rank_tol > 0.0 ? rank_tol : default_rank_tol(s.rows(), cols));
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd q = qr.householderQ().setLength(qr.nonzeroPivots());
  return q.rightCols(cols - rank);
}

IterativeResult top_sv_of_projected_diag(const KernelProjector& projector,
                                         std::span<const double> weights,
                                         const IterativeOptions& opts) {
  const Eigen::Index dim = projector.dim();
  if (static_cast<Eigen::Index>(weights.size()) != dim)
    throw std::invalid_argument("top_sv_of_projected_diag: weight count must match columns");
  const Eigen::Map<const Eigen::VectorXd> d(weights.data(), dim);
  IterativeResult result;
  if (projector.rank() == 0) {
    result.value = dim > 0 ? d.cwiseAbs().maxCoeff() : 0.0;
    result.converged = true;
    return result;
  }
  if (projector.kernel_dim() == 0) {
    result.converged = true;
    return result;
  }
  IterativeOptions local = opts;
  local.noise_scale = std::max(opts.noise_scale, d.cwiseAbs().maxCoeff());
  return top_singular_value(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        y = x;
        projector.apply_in_place(y);
        y.array() *= d.array();
      },
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        y = x.cwiseProduct(d);
        projector.apply_in_place(y);
      },
      dim, dim, local,
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        y = x;
        projector.apply_in_place(y);
      });
}

IterativeResult top_sv_of_projected_diag(const Eigen::MatrixXd& s,
                                         std::span<const double> weights,
                                         const IterativeOptions& opts) {
  return top_sv_of_projected_diag(KernelProjector(s), weights, opts);
}

}  // namespace ellrad
