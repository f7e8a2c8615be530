#include "ellrad/sequences.hpp"

#include <boost/math/special_functions/trigamma.hpp>
#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace ellrad;

namespace {

// Plain summation in the opposite order from the library (largest first, long double).
long double direct_tail(double alpha, double beta, std::int64_t m, std::int64_t k) {
  long double sum = 0.0L;
  for (std::int64_t j = k + 1; j <= m; ++j) {
    const long double v = std::pow(static_cast<long double>(j), -alpha) *
                          std::pow(std::log(static_cast<long double>(j) + 1.0L), -beta);
    sum += v * v;
  }
  return sum;
}

}  // namespace

TEST_CASE("sigma_value reads the family") {
  const auto ex = SemiAxes::from_values({1.0, 0.5, 0.25});
  CHECK(sigma_value(ex, 2) == 0.5);
  CHECK(sigma_value(ex, 4) == 0.0);
  const auto poly = SemiAxes::polynomial(1.0, 0.0, 10);
  CHECK(sigma_value(poly, 4) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sigma_value(poly, 11) == 0.0);
  CHECK_THROWS_AS(sigma_value(poly, 0), std::invalid_argument);
  const auto expo = SemiAxes::exponential(0.5, 8, 3.0);
  CHECK(expo.sigma(3) == doctest::Approx(3.0 * 0.125).epsilon(1e-15));
  const auto logp = SemiAxes::polynomial(0.5, 1.0, 10);
  CHECK(logp.sigma(3) == doctest::Approx(1.0 / (std::sqrt(3.0) * std::log(4.0))).epsilon(1e-14));
}

TEST_CASE("construction rejects invalid sequences") {
  CHECK_THROWS_AS(SemiAxes::from_values({1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(SemiAxes::from_values({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(SemiAxes::from_values({1.0, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(SemiAxes::polynomial(0.0, -1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(SemiAxes::exponential(1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(SemiAxes::exponential(0.5, 0), std::invalid_argument);
  CHECK_NOTHROW(SemiAxes::polynomial(0.0, 0.0, 10));
}

TEST_CASE("tail_sq") {
  const auto ex = SemiAxes::from_values({1.0, 0.5, 0.25});
  CHECK(tail_sq(ex, 1) == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(tail_sq(ex, 3) == 0.0);
  CHECK(tail_sq(ex, 7) == 0.0);

  const auto poly = SemiAxes::polynomial(1.0, 0.0, 10000);
  const double t = tail_sq(poly, 100);
  CHECK(t > 0.0098);
  CHECK(t < 0.0099);
  CHECK(t == doctest::Approx(static_cast<double>(direct_tail(1.0, 0.0, 10000, 100))).epsilon(1e-13));
}

TEST_CASE("tail telescoping and scale homogeneity") {
  for (const auto& seq : {SemiAxes::polynomial(1.0, 0.0, 300), SemiAxes::polynomial(0.5, 1.0, 300),
                          SemiAxes::exponential(0.7, 300)}) {
    for (std::int64_t k = 0; k < seq.m(); ++k) {
      const double s = seq.sigma(k + 1);
      CHECK(seq.tail_sq(k) - seq.tail_sq(k + 1) == doctest::Approx(s * s).epsilon(1e-12).scale(seq.tail_sq(k)));
      CHECK(seq.sigma(k + 1) >= seq.sigma(k + 2));
    }
    const auto scaled = seq.scaled(7.5);
    for (const std::int64_t k : {0, 1, 17, 150}) {
      CHECK(scaled.tail_sq(k) == doctest::Approx(56.25 * seq.tail_sq(k)).epsilon(1e-12));
      CHECK(c_k(scaled, k + 1) == doctest::Approx(c_k(seq, k + 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("c_k") {
  const auto ones = SemiAxes::from_values(std::vector<double>(100, 1.0));
  CHECK(c_k(ones, 1) == doctest::Approx(99.0));
  const auto spike = SemiAxes::from_values({1.0, 0.0, 0.0});
  CHECK(c_k(spike, 2) == 0.0);
  const auto logp = SemiAxes::polynomial(0.5, 1.0, 65536);
  const double direct = static_cast<double>(direct_tail(0.5, 1.0, 65536, 64)) / std::pow(logp.sigma(64), 2);
  CHECK(c_k(logp, 64) > 0.0);
  CHECK(c_k(logp, 64) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("n_zero") {
  const auto ones = SemiAxes::from_values(std::vector<double>(49, 1.0));
  CHECK(n_zero(ones, 0.5) == 4);
  CHECK(n_zero(SemiAxes::from_values({2.0}), 0.3) == 0);
  const auto quarter = SemiAxes::polynomial(0.25, 0.0, 4096);
  const auto direct = static_cast<std::int64_t>(std::floor(0.25 * static_cast<double>(direct_tail(0.25, 0.0, 4096, 1)) / 3.0));
  CHECK(n_zero(quarter, 0.5) == direct);
  CHECK(n_zero(quarter, 0.5) == 10);
  CHECK_THROWS_AS(n_zero(quarter, 1.0), std::invalid_argument);

  std::int64_t prev = 0;
  for (std::int64_t m = 64; m <= 8192; m *= 2) {
    const auto n0 = n_zero(SemiAxes::polynomial(0.25, 0.0, m), 0.5);
    CHECK(n0 >= prev);
    prev = n0;
  }
  CHECK(n_zero(quarter, 0.3) <= n_zero(quarter, 0.6));
}

TEST_CASE("neglected tail") {
  const auto expo = SemiAxes::exponential(0.5, 20);
  // sum_{j>20} 4^-j = 4^-20 / 3
  CHECK(expo.neglected_tail_sq() == doctest::Approx(std::pow(4.0, -20) / 3.0).epsilon(1e-12));
  CHECK(std::isinf(SemiAxes::polynomial(0.5, 0.0, 100).neglected_tail_sq()));
  CHECK(std::isinf(SemiAxes::polynomial(0.25, 0.0, 100).neglected_tail_sq()));
  CHECK(SemiAxes::from_values({1.0, 0.5}).neglected_tail_sq() == 0.0);
  // sum_{j>m} j^-2 = trigamma(m + 1)
  CHECK(SemiAxes::polynomial(1.0, 0.0, 1000).neglected_tail_sq() ==
        doctest::Approx(boost::math::trigamma(1001.0)).epsilon(1e-9));
}

TEST_CASE("with_m pads and cuts explicit lists") {
  const auto ex = SemiAxes::from_values({1.0, 0.5, 0.25});
  const auto longer = ex.with_m(5);
  CHECK(longer.m() == 5);
  CHECK(longer.sigma(5) == 0.0);
  CHECK(longer.support() == 3);
  CHECK(ex.with_m(2).tail_sq(0) == doctest::Approx(1.25));
  CHECK(SemiAxes::polynomial(1.0, 0.0, 10).with_m(20).sigma(20) == doctest::Approx(0.05));
}
