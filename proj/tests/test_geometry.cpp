#include "ellrad/geometry.hpp"
#include "ellrad/philox.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ellrad;

namespace {

Eigen::VectorXd as_vector(const SemiAxes& seq) {
  return Eigen::Map<const Eigen::VectorXd>(seq.values().data(), seq.m());
}

SolverOptions forced(SolveMethod m) {
  SolverOptions o;
  o.method = m;
  return o;
}

}  // namespace

TEST_CASE("section radius closed forms") {
  const auto seq = SemiAxes::polynomial(1.0, 0.0, 30);
  CHECK(section_radius(seq, GaussianInfo(3, 0, 30)).value == 1.0);

  const auto sphere = SemiAxes::from_values(std::vector<double>(20, 1.7));
  for (int n : {1, 5, 19}) {
    CHECK(section_radius(sphere, sample(4, n, 20)).value == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(section_radius(sphere, sample(4, n, 20), forced(SolveMethod::iterative)).value ==
          doctest::Approx(1.7).epsilon(1e-10));
  }

  std::vector<double> spike(10, 0.0);
  spike[0] = 1.0;
  const auto seg = SemiAxes::from_values(spike);
  const auto r = section_radius(seg, sample(5, 1, 10));
  CHECK(r.value == 0.0);
  CHECK(r.degenerate);

  const auto full = section_radius(seq, sample(6, 30, 30));
  CHECK(full.degenerate);
  CHECK(full.value == 0.0);
  CHECK_THROWS_AS(section_radius(seq, sample(6, 3, 31)), std::invalid_argument);
}

TEST_CASE("section radius matches the dense eigen oracle") {
  const auto seq = SemiAxes::from_values({1.0, 0.8, 0.5, 0.3, 0.1});
  const auto g = sample(12345, 2, 5);
  const double want = oracle::section_radius(g.block(0, 2, 0, 5), as_vector(seq));
  CHECK(section_radius(seq, g, forced(SolveMethod::iterative)).value == doctest::Approx(want).epsilon(1e-8));
  CHECK(section_radius(seq, g, forced(SolveMethod::dense)).value == doctest::Approx(want).epsilon(1e-10));

  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::int64_t m = 8 + static_cast<std::int64_t>(s) * 25;  // up to 483
    const std::int64_t n = 1 + static_cast<std::int64_t>(uniform_at(s, 1, 0) * static_cast<double>(m - 1));
    const auto sq = s % 2 ? SemiAxes::polynomial(1.0, 0.0, m) : SemiAxes::exponential(0.9, m);
    const auto gi = sample(s + 99, n, m);
    const double dense = section_radius(sq, gi, forced(SolveMethod::dense)).value;
    const double iter = section_radius(sq, gi, forced(SolveMethod::iterative)).value;
    CHECK(iter == doctest::Approx(dense).epsilon(1e-8));
    CHECK(dense >= sq.sigma(n + 1) * (1 - 1e-12));
    CHECK(dense <= sq.sigma(1) * (1 + 1e-12));
  }
}

TEST_CASE("section radius invariants") {
  const auto seq = SemiAxes::polynomial(0.75, 0.0, 60);
  SUBCASE("monotone in n on nested rows") {
    double prev = seq.sigma(1);
    for (int n = 0; n < 60; n += 3) {
      const double r = section_radius(seq, GaussianInfo(9, n, 60)).value;
      CHECK(r <= prev + 1e-10);
      CHECK(r >= seq.sigma(n + 1) - 1e-10);
      prev = r;
    }
  }
  SUBCASE("homogeneous in the scale") {
    const auto g = sample(10, 7, 60);
    const double base = section_radius(seq, g).value;
    CHECK(section_radius(seq.scaled(3.5), g).value == doctest::Approx(3.5 * base).epsilon(1e-10));
    CHECK(section_radius(seq.scaled(3.5), g, forced(SolveMethod::iterative)).value ==
          doctest::Approx(3.5 * base).epsilon(1e-9));
  }
  SUBCASE("permutation equivariance") {
    const auto g = sample(11, 5, 12);
    const Eigen::MatrixXd gm = g.block(0, 5, 0, 12);
    Eigen::VectorXd sig = as_vector(SemiAxes::polynomial(1.0, 0.0, 12));
    std::vector<int> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin() + 2, perm.end());
    Eigen::MatrixXd gp(5, 12);
    Eigen::VectorXd sp(12);
    for (int j = 0; j < 12; ++j) {
      gp.col(j) = gm.col(perm[j]);
      sp(j) = sig(perm[j]);
    }
    CHECK(oracle::section_radius(gp, sp) == doctest::Approx(section_radius(SemiAxes::polynomial(1.0, 0.0, 12), g).value).epsilon(1e-10));
  }
  SUBCASE("zero semi-axes are removed") {
    std::vector<double> v = {1.0, 0.7, 0.4, 0.2, 0.0, 0.0, 0.0};
    const auto padded = SemiAxes::from_values(v);
    const auto g = sample(12, 2, 7);
    const double want = oracle::section_radius(g.block(0, 2, 0, 4), as_vector(SemiAxes::from_values({1.0, 0.7, 0.4, 0.2})));
    CHECK(section_radius(padded, g).value == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("coordinate radius") {
  const auto seq = SemiAxes::polynomial(0.5, 0.0, 6);
  const auto g = sample(77, 2, 6);
  for (int k = 1; k <= 6; ++k) {
    const double want = oracle::coordinate_radius(g.block(0, 2, 0, 6), as_vector(seq), k);
    CHECK(coordinate_radius(seq, g, k) == doctest::Approx(want).epsilon(1e-6));
    CHECK(coordinate_radius(seq, g, k) <= section_radius(seq, g).value + 1e-12);
  }
  CHECK(coordinate_radius(seq, GaussianInfo(1, 0, 6), 3) == seq.sigma(3));
  const auto spike = SemiAxes::from_values({1.0, 0.5, 0.0, 0.0});
  CHECK(coordinate_radius(spike, sample(2, 1, 4), 3) == 0.0);
  CHECK_THROWS(coordinate_radius(seq, g, 7));
}

TEST_CASE("ball coordinate") {
  CHECK(ball_coordinate_sq(GaussianInfo(1, 0, 10)) == 1.0);
  double sum = 0.0, sum2 = 0.0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    const double v = ball_coordinate_sq(sample(derive_seed(5, t), 4, 10));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum2 / trials - mean * mean) / (trials - 1));
  CHECK(std::abs(mean - 0.6) <= 3 * se);

  sum = sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double v = ball_coordinate_sq(sample(derive_seed(6, t), 1, 2));
    sum += v;
    sum2 += v * v;
  }
  const double m2 = sum / trials;
  CHECK(std::abs(m2 - 0.5) <= 3 * std::sqrt((sum2 / trials - m2 * m2) / (trials - 1)));
  CHECK_THROWS(ball_coordinate_sq(sample(1, 3, 3)));
}
