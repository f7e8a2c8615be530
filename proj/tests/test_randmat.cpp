#include "ellrad/errors.hpp"
#include "ellrad/philox.hpp"
#include "ellrad/randmat.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ellrad;

TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("sample is deterministic and nested") {
  const auto a = sample(7, 3, 5);
  const auto b = sample(7, 3, 5);
  const Eigen::MatrixXd ma = a.block(0, 3, 0, 5);
  CHECK(ma == b.block(0, 3, 0, 5));
  CHECK(sample(7, 2, 5).block(0, 2, 0, 5) == ma.topRows(2));
  CHECK(sample(7, 3, 9).block(0, 3, 0, 5) == ma);
  CHECK(sample(8, 3, 5).block(0, 3, 0, 5) != ma);
  CHECK(a.materialized().block(1, 2, 2, 3) == ma.block(1, 2, 2, 3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) CHECK(a.entry(i, j) == ma(i, j));
  CHECK_THROWS_AS(sample(1, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(sample(1, 100000, 100000, 1 << 20), ResourceError);
}

TEST_CASE("entries look standard normal") {
  const Eigen::MatrixXd g = sample(11, 200, 200).block(0, 200, 0, 200);
  const double count = static_cast<double>(g.size());
  const double mean = g.mean();
  const double var = (g.array() - mean).square().sum() / (count - 1.0);
  // mean has standard error 1/200; sample variance has standard error sqrt(2/N) ~ 0.007
  CHECK(std::abs(mean) < 3.0 / 200.0);
  CHECK(var > 0.9);
  CHECK(var < 1.1);
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / count));
  // fourth moment 3
  const double kurt = (g.array() - mean).pow(4).mean() / (var * var);
  CHECK(kurt == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("weighted blocks") {
  const auto g = sample(5, 4, 6);
  const std::vector<double> w = {2.0, 0.5, 3.0};
  const Eigen::MatrixXd s = g.block(1, 3, 2, 3, w);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(s(i, j) == w[j] * g.entry(i + 1, j + 2));
  const StructuredMatrix sm{g, {1, 4}, {2, 5}, w};
  CHECK(sm.materialize() == s);
}

TEST_CASE("singular values") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  const auto sv = singular_values(id, SvMode::all_dense);
  REQUIRE(sv.size() == 3);
  for (double v : sv) CHECK(v == doctest::Approx(1.0));

  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 0, 1;
  const auto s2 = singular_values(a, SvMode::all_dense);
  CHECK(s2[0] == doctest::Approx(std::sqrt((3 + std::sqrt(5.0)) / 2)).epsilon(1e-14));
  CHECK(s2[1] == doctest::Approx(std::sqrt((3 - std::sqrt(5.0)) / 2)).epsilon(1e-14));
  const auto s2i = singular_values(a, SvMode::extreme_iterative);
  CHECK(s2i[0] == doctest::Approx(s2[0]).epsilon(1e-10));
  CHECK(s2i[1] == doctest::Approx(s2[1]).epsilon(1e-10));

  const Eigen::MatrixXd r = sample(3, 30, 70).block(0, 30, 0, 70);
  const auto d = singular_values(r, SvMode::all_dense);
  const auto dt = singular_values(Eigen::MatrixXd(r.transpose()), SvMode::all_dense);
  const auto it = singular_values(r, SvMode::extreme_iterative);
  CHECK(d.front() == doctest::Approx(dt.front()).epsilon(1e-13));
  CHECK(it[0] == doctest::Approx(d.front()).epsilon(1e-10));
  CHECK(it[1] == doctest::Approx(d.back()).epsilon(1e-10));
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] <= d[i - 1]);

  const StructuredMatrix sm{sample(3, 30, 70), {0, 30}, {0, 70}, {}};
  CHECK(singular_values(sm, SvMode::all_dense) == d);
}

TEST_CASE("kernel projector") {
  Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(1, 4);
  e1(0, 0) = 1.0;
  CHECK(kernel_projector_apply(e1, Eigen::VectorXd::Unit(4, 0)).norm() < 1e-15);
  CHECK((kernel_projector_apply(e1, Eigen::VectorXd::Unit(4, 1)) - Eigen::VectorXd::Unit(4, 1)).norm() < 1e-15);

  const Eigen::MatrixXd s = sample(21, 3, 8).block(0, 3, 0, 8);
  const KernelProjector p(s);
  CHECK(p.rank() == 3);
  CHECK(p.kernel_dim() == 5);
  CHECK_FALSE(p.rank_deficient());
  Eigen::MatrixXd pm(8, 8);
  for (int j = 0; j < 8; ++j) pm.col(j) = p.apply(Eigen::VectorXd::Unit(8, j));
  CHECK((s * pm).norm() < 1e-12);
  CHECK((pm * pm - pm).norm() < 1e-12);
  CHECK((pm - pm.transpose()).norm() < 1e-12);
  CHECK(pm.trace() == doctest::Approx(5.0).epsilon(1e-12));
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd v = sample(100 + t, 1, 8).block(0, 1, 0, 8).transpose();
    const Eigen::VectorXd pv = p.apply(v);
    CHECK((s * pv).norm() < 1e-10);
    CHECK((p.apply(pv) - pv).norm() < 1e-10);
  }

  Eigen::MatrixXd dup(2, 5);
  dup.row(0) = sample(4, 1, 5).block(0, 1, 0, 5);
  dup.row(1) = 2.0 * dup.row(0);
  const KernelProjector pd(dup);
  CHECK(pd.rank() == 1);
  CHECK(pd.rank_deficient());
}

TEST_CASE("top singular value of a projected diagonal") {
  const Eigen::MatrixXd s = sample(31, 4, 12).block(0, 4, 0, 12);
  std::vector<double> flat(12, 2.5);
  CHECK(top_sv_of_projected_diag(s, flat).value == doctest::Approx(2.5).epsilon(1e-12));

  std::vector<double> w(12);
  for (int j = 0; j < 12; ++j) w[j] = 1.0 / (1.0 + j);
  const Eigen::MatrixXd none(0, 12);
  CHECK(top_sv_of_projected_diag(none, w).value == 1.0);

  // Dense oracle: top eigenvalue of P D^2 P.
  const KernelProjector p(s);
  Eigen::MatrixXd pm(12, 12);
  for (int j = 0; j < 12; ++j) pm.col(j) = p.apply(Eigen::VectorXd::Unit(12, j));
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(w.data(), 12);
  const Eigen::MatrixXd op = pm * d.cwiseAbs2().asDiagonal() * pm;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op, Eigen::EigenvaluesOnly);
  const auto res = top_sv_of_projected_diag(s, w);
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(std::sqrt(eig.eigenvalues().maxCoeff())).epsilon(1e-8));

  // Nesting: more rows, smaller kernel.
  double prev = 2.0;
  for (int n = 1; n <= 11; ++n) {
    const double v = top_sv_of_projected_diag(sample(31, n, 12).block(0, n, 0, 12), w).value;
    CHECK(v <= prev + 1e-10);
    prev = v;
  }
}
