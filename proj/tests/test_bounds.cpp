#include "ellrad/bounds.hpp"
#include "ellrad/geometry.hpp"
#include "ellrad/recovery.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace ellrad;

namespace {

// Direct summation in long double, largest index first.
double tail_oracle(const SemiAxes& seq, std::int64_t k) {
  long double s = 0.0L;
  for (std::int64_t j = seq.m(); j > k; --j) {
    const long double v = seq.sigma(j);
    s += v * v;
  }
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("ub_main") {
  const auto ones = SemiAxes::from_values(std::vector<double>(100, 1.0));
  const auto r = ub_main(ones, 4);
  CHECK(r.rhs == doctest::Approx(1105.0).epsilon(1e-14));
  CHECK(r.direction == BoundDirection::upper);
  CHECK(ub_main(ones, 400).claimed_failure_prob == doctest::Approx(2 * std::exp(-4.0)).epsilon(1e-14));
  CHECK(ub_main(ones, 400).claimed_failure_prob == doctest::Approx(0.0366).epsilon(1e-3));
  CHECK(ub_main(ones, 3).rhs == doctest::Approx(221.0 / std::sqrt(3.0) * 10.0));
  CHECK(ub_main(ones, 4).vacuous());

  const auto poly = SemiAxes::polynomial(1.0, 0.0, 65536);
  // sum over j >= 16 is the tail past index 15
  CHECK(ub_main(poly, 64).rhs == doctest::Approx(221.0 / 8.0 * std::sqrt(tail_oracle(poly, 15))).epsilon(1e-12));
}

TEST_CASE("ub_exponential") {
  const auto seq = SemiAxes::exponential(0.5, 200);
  const auto r = ub_exponential(seq, 10, 1.0, 1.0);
  CHECK(r.rhs == doctest::Approx(140.0 * std::sqrt(std::pow(4.0, -10.0) / 3.0)).epsilon(1e-12));
  const auto p = ub_exponential(seq, 100, 1.0, 10.0);
  CHECK(p.claimed_failure_prob == doctest::Approx(std::exp(-100.0) + std::sqrt(2 * std::numbers::e) / 10));
  CHECK(p.claimed_failure_prob == doctest::Approx(0.2331).epsilon(1e-3));
  CHECK(ub_exponential(SemiAxes::from_values({1.0, 1.0, 1.0}), 3, 1.0, 1.0).rhs == 0.0);
  CHECK_THROWS_AS(ub_exponential(seq, 10, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("lb_main") {
  const auto ones = SemiAxes::from_values(std::vector<double>(12 * 5 + 1, 1.0));
  const auto r = lb_main(ones, 5, 0.5);
  CHECK(r.applicable);
  CHECK(r.params.at("k") == 1);
  CHECK(r.rhs == doctest::Approx(0.5));
  CHECK(r.claimed_failure_prob == doctest::Approx(5 * std::exp(-5.0 / 64)));
  CHECK(r.direction == BoundDirection::lower);
  CHECK_FALSE(lb_main(SemiAxes::from_values(std::vector<double>(60, 1.0)), 5, 0.5).applicable);

  const auto expo = lb_main(SemiAxes::exponential(0.5, 4096), 64, 0.5);
  CHECK_FALSE(expo.applicable);
  CHECK(expo.rhs == 0.0);

  const auto poly = SemiAxes::polynomial(0.5, 1.0, std::int64_t{1} << 20);
  const auto pr = lb_main(poly, 64, 0.5);
  std::vector<long double> suffix(static_cast<std::size_t>(poly.m()) + 1, 0.0L);
  for (std::int64_t j = poly.m(); j >= 1; --j) {
    const long double v = poly.sigma(j);
    suffix[static_cast<std::size_t>(j - 1)] = suffix[static_cast<std::size_t>(j)] + v * v;
  }
  std::int64_t k_scan = 0;
  for (std::int64_t k = 1; k <= poly.m(); ++k) {
    const double s = poly.sigma(k);
    if (static_cast<double>(suffix[static_cast<std::size_t>(k)]) >= 3.0 * 64 * s * s / 0.25) {
      k_scan = k;
      break;
    }
  }
  REQUIRE(k_scan > 0);
  CHECK(pr.params.at("k") == k_scan);
  CHECK(pr.rhs == doctest::Approx(poly.sigma(k_scan) * 0.5));
}

TEST_CASE("realization_ub is a deterministic inequality") {
  const auto head = SemiAxes::from_values({1.0, 0.5, 0.25, 0.0, 0.0, 0.0});
  auto r = realization_ub(head, sample(1, 4, 6), 3);
  CHECK(r.rhs == doctest::Approx(0.0));
  CHECK(r.lhs == doctest::Approx(0.0).epsilon(1e-12));

  const auto seq = SemiAxes::polynomial(1.0, 0.0, 12);
  const auto g = sample(1, 6, 12);
  const auto base = realization_ub(seq, g, 3);
  CHECK(base.evaluated);
  CHECK(base.holds);
  CHECK(base.claimed_failure_prob == 0.0);
  const auto scaled = realization_ub(seq.scaled(10.0), g, 3);
  CHECK(scaled.rhs == doctest::Approx(10 * base.rhs).epsilon(1e-10));
  CHECK(scaled.lhs == doctest::Approx(10 * base.lhs).epsilon(1e-10));

  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto gs = sample(s, 8, 50);
    const auto p = SemiAxes::polynomial(0.75, 0.0, 50);
    for (std::int64_t k : {1, 4, 8}) CHECK(realization_ub(p, gs, k).holds);
  }
}

TEST_CASE("bvh_threshold") {
  const auto ones = SemiAxes::from_values(std::vector<double>(100, 1.0));
  CHECK(bvh_threshold(ones, 4, 0, 1.0) == doctest::Approx(37.0));
  const auto head = SemiAxes::from_values({3.0, 2.0, 0.0});
  CHECK(bvh_threshold(head, 5, 2, 1.0) == 0.0);
  const auto poly = SemiAxes::polynomial(1.0, 0.0, 4096);
  CHECK(bvh_threshold(poly, 64, 32, 1.0) ==
        doctest::Approx(1.5 * std::sqrt(tail_oracle(poly, 32)) + 11.0 * (1.0 / 33) * 8.0).epsilon(1e-12));
}

TEST_CASE("gordon_an") {
  CHECK(gordon_an(1) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
  CHECK(gordon_an(2) == doctest::Approx(std::sqrt(std::numbers::pi / 2)).epsilon(1e-14));
  const double a1000 = gordon_an(1000);
  CHECK(a1000 < std::sqrt(1000.0));
  CHECK(a1000 > std::sqrt(1000.0) * (1 - 1.0 / 4000) - 1e-3);
  double prev = 0.0;
  for (std::int64_t n = 1; n <= 10000; ++n) {
    const double a = gordon_an(n);
    CHECK(a > prev);
    CHECK(a * a <= static_cast<double>(n));
    prev = a;
  }
}

TEST_CASE("mean width estimates") {
  const auto flat = mstar_estimate(SemiAxes::from_values(std::vector<double>(20, 2.5)), 100, 3);
  CHECK(flat.estimate == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(flat.std_error < 1e-12);

  const auto e1 = mstar_estimate(SemiAxes::from_values({1.0, 0.0, 0.0}), 200000, 5);
  CHECK(std::abs(e1.estimate - 0.5) < 4 * e1.std_error);

  const auto poly = SemiAxes::polynomial(1.0, 0.0, 200);
  const auto est = mstar_estimate(poly, 20000, 9);
  CHECK(est.estimate * est.estimate <= poly.tail_sq(0) / 200 + 3 * est.std_error);

  const auto trunc = mstar_truncated_estimate(poly, 10, 20000, 9);
  CHECK(trunc.estimate > 0.0);
}

TEST_CASE("mstar_section_bound") {
  const auto ones = SemiAxes::from_values(std::vector<double>(50, 1.0));
  CHECK_FALSE(mstar_section_bound(ones, 10, 0.5, 50, 1.0).applicable);

  const auto poly = SemiAxes::polynomial(1.0, 0.0, 512);
  const auto near_one = mstar_section_bound(poly, 32, 1.0 - 1e-9, 4, 0.3);
  CHECK(near_one.claimed_failure_prob == doctest::Approx(3.5).epsilon(1e-6));
  CHECK(near_one.vacuous());
  CHECK(std::isfinite(near_one.rhs));

  const double gamma = 1.0 - 1.0 / std::sqrt(2.0);
  const auto r = mstar_section_bound(poly, 32, gamma, 4, 0.3);
  CHECK(r.rhs == doctest::Approx(gordon_an(512) * 0.3 / (gamma * gordon_an(32))).epsilon(1e-12));
  CHECK(r.claimed_failure_prob ==
        doctest::Approx(3.5 * std::exp(-(1 - gamma) * (1 - gamma) * gordon_an(32) * gordon_an(32) / 18)));
}

TEST_CASE("elementary_lb") {
  CHECK(elementary_lb(16, 2, 0.5, 0.5, 0.25) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
  CHECK(elementary_lb(16, 2, 1e-14, 0.5, 0.25) < 1e-6);
  // c = sigma_m m^alpha = 1 for sigma_j = j^-1/4
  CHECK(elementary_lb(4096, 16, 0.5, std::pow(4096.0, -0.25), 0.25) == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK_THROWS_AS(elementary_lb(16, 16, 0.5, 0.5, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(elementary_lb(16, 2, 0.5, 0.5, 0.5), std::invalid_argument);
  const auto rep = elementary_lb_report(SemiAxes::polynomial(0.25, 0.0, 4096), 16, 0.5, 0.25);
  CHECK(rep.rhs == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(rep.direction == BoundDirection::lower);
}

TEST_CASE("BoundReport bookkeeping") {
  BoundReport up;
  up.rhs = 1.0;
  CHECK(up.check(1.0).holds);
  CHECK_FALSE(up.check(1.5).holds);
  CHECK(up.evaluated);
  BoundReport lo;
  lo.direction = BoundDirection::lower;
  lo.rhs = 1.0;
  CHECK(lo.check(1.0).holds);
  CHECK_FALSE(lo.check(0.5).holds);
  lo.claimed_failure_prob = 1.0;
  CHECK(lo.vacuous());
}

TEST_CASE("neglected tail ratio") {
  const auto seq = SemiAxes::exponential(0.5, 20);
  // sum_{j>20} 4^-j / sum_{j>5, j<=20} 4^-j
  const double num = std::pow(4.0, -20.0) / 3.0;
  const double den = (std::pow(4.0, -5.0) - std::pow(4.0, -20.0)) / 3.0;
  CHECK(neglected_tail_ratio(seq, 5) == doctest::Approx(num / den).epsilon(1e-10));
  CHECK(neglected_tail_ratio(SemiAxes::from_values({1.0, 0.5}), 0) == 0.0);
}

TEST_CASE("lower bound never exceeds upper bound where both are informative") {
  for (double alpha : {0.5, 0.75, 1.0}) {
    for (double beta : {0.0, 1.0, 2.0}) {
      const auto seq = SemiAxes::polynomial(alpha, beta, std::int64_t{1} << 16);
      for (std::int64_t n : {70, 128, 256, 512}) {
        const auto ub = ub_main(seq, n);
        for (double eps : {0.25, 0.5}) {
          const auto lb = lb_main(seq, n, eps);
          if (!lb.applicable || ub.claimed_failure_prob >= 0.5 || lb.claimed_failure_prob >= 0.5) continue;
          CHECK(lb.rhs <= ub.rhs);
        }
      }
    }
  }
}
