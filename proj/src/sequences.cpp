#include "ellrad/sequences.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ellrad {
namespace {

double family_value(const Family& family, std::int64_t j) {
  const double x = static_cast<double>(j);
  if (const auto* p = std::get_if<Polynomial>(&family)) {
    double v = std::pow(x, -p->alpha);
    if (p->beta != 0.0) v *= std::pow(std::log(x + 1.0), -p->beta);
    return v;
  }
  if (const auto* e = std::get_if<Exponential>(&family)) return std::pow(e->a, x);
  const auto& ex = std::get<Explicit>(family);
  return j <= static_cast<std::int64_t>(ex.values.size()) ? ex.values[j - 1] : 0.0;
}

void validate_family(const Family& family) {
  if (const auto* p = std::get_if<Polynomial>(&family)) {
    if (!(p->alpha >= 0.0) || !std::isfinite(p->beta))
      throw std::invalid_argument("polynomial family needs alpha >= 0 and finite beta");
    if (p->alpha == 0.0 && p->beta < 0.0)
      throw std::invalid_argument("polynomial family with alpha = 0 needs beta >= 0");
  } else if (const auto* e = std::get_if<Exponential>(&family)) {
    if (!(e->a > 0.0 && e->a < 1.0))
      throw std::invalid_argument("exponential family needs a in (0, 1)");
  } else {
    for (double v : std::get<Explicit>(family).values)
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("explicit semi-axes must be finite and non-negative");
  }
}

}  // namespace

SemiAxes::SemiAxes(Family family, std::int64_t m, double scale)
    : family_(std::move(family)), m_(m), scale_(scale) {
  if (m_ < 1) throw std::invalid_argument("truncation dimension m must be >= 1");
  if (!(scale_ > 0.0) || !std::isfinite(scale_))
    throw std::invalid_argument("scale must be a positive finite number");
  validate_family(family_);

  values_.resize(static_cast<std::size_t>(m_));
  for (std::int64_t j = 1; j <= m_; ++j) {
    const double v = scale_ * family_value(family_, j);
    if (j > 1 && v > values_[j - 2])
      throw std::invalid_argument("semi-axes must be non-increasing (violated at j = " +
                                  std::to_string(j) + ")");
    values_[j - 1] = v;
  }
  if (!(values_[0] > 0.0)) throw std::invalid_argument("sigma_1 must be positive");
  while (support_ < m_ && values_[support_] > 0.0) ++support_;

  // Kahan summation from the smallest term upwards.
  tails_.assign(static_cast<std::size_t>(m_) + 1, 0.0);
  double sum = 0.0;
  double comp = 0.0;
  for (std::int64_t k = m_ - 1; k >= 0; --k) {
    const double term = values_[k] * values_[k] - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
    tails_[k] = sum;
  }
}

SemiAxes SemiAxes::polynomial(double alpha, double beta, std::int64_t m, double scale) {
  return SemiAxes(Polynomial{alpha, beta}, m, scale);
}

SemiAxes SemiAxes::exponential(double a, std::int64_t m, double scale) {
  return SemiAxes(Exponential{a}, m, scale);
}

SemiAxes SemiAxes::from_values(std::vector<double> values, double scale) {
  const auto m = static_cast<std::int64_t>(values.size());
  return SemiAxes(Explicit{std::move(values)}, m, scale);
}

double SemiAxes::sigma(std::int64_t j) const {
  if (j < 1) throw std::invalid_argument("semi-axis index must be >= 1");
  return j <= m_ ? values_[j - 1] : 0.0;
}

double SemiAxes::tail_sq(std::int64_t k) const {
  if (k < 0) throw std::invalid_argument("tail index must be >= 0");
  return k >= m_ ? 0.0 : tails_[k];
}

double SemiAxes::neglected_tail_sq() const {
  const double s2 = scale_ * scale_;
  if (const auto* e = std::get_if<Exponential>(&family_)) {
    return s2 * std::pow(e->a, 2.0 * static_cast<double>(m_ + 1)) / (1.0 - e->a * e->a);
  }
  const auto* p = std::get_if<Polynomial>(&family_);
  if (p == nullptr) return 0.0;
  const double two_a = 2.0 * p->alpha;
  const double two_b = 2.0 * p->beta;
  if (two_a < 1.0 || (two_a == 1.0 && two_b <= 1.0)) return kInf;

  // Explicit head, then the midpoint integral for the rest (substituting x = e^t).
  constexpr std::int64_t kHead = 2000;
  double head = 0.0;
  for (std::int64_t j = m_ + kHead; j > m_; --j) {
    const double v = family_value(family_, j);
    head += v * v;
  }
  const double lower = std::log(static_cast<double>(m_ + kHead) + 0.5);
  auto integrand = [&](double t) {
    const double x = std::exp(t);
    return std::exp((1.0 - two_a) * t) * std::pow(std::log(x + 1.0), -two_b);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double rest =
      integrator.integrate([&](double u) { return integrand(lower + u); }, 0.0, kInf);
  return s2 * (head + rest);
}

SemiAxes SemiAxes::with_m(std::int64_t m) const {
  if (const auto* ex = std::get_if<Explicit>(&family_)) {
    std::vector<double> v = ex->values;
    v.resize(static_cast<std::size_t>(m), 0.0);
    return SemiAxes(Explicit{std::move(v)}, m, scale_);
  }
  return SemiAxes(family_, m, scale_);
}

SemiAxes SemiAxes::scaled(double c) const { return SemiAxes(family_, m_, scale_ * c); }

double sigma_value(const SemiAxes& seq, std::int64_t j) { return seq.sigma(j); }

double tail_sq(const SemiAxes& seq, std::int64_t k) { return seq.tail_sq(k); }

double c_k(const SemiAxes& seq, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("c_k needs k >= 1");
  const double tail = seq.tail_sq(k);
  const double sk = seq.sigma(k);
  if (sk == 0.0) return tail > 0.0 ? kInf : 0.0;
  return tail / (sk * sk);
}

std::int64_t n_zero(const SemiAxes& seq, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  const double s1 = seq.sigma(1);
  return static_cast<std::int64_t>(std::floor(eps * eps * seq.tail_sq(1) / (3.0 * s1 * s1)));
}

}  // namespace ellrad
