#include <catch2/catch_amalgamated.hpp>

#include "hktl/flat_models.hpp"
#include "support.hpp"

using namespace hktl;
using namespace testutil;

namespace {

Quaternion random_quaternion(Rng& rng, double scale = 1.5) {
  return {rng.uniform(-scale, scale), rng.uniform(-scale, scale), rng.uniform(-scale, scale),
          rng.uniform(-scale, scale)};
}

}  // namespace

TEST_CASE("quaternion arithmetic") {
  CHECK((Quaternion::unit_i() * Quaternion::unit_j()).z == 1.0);  // ij = k
  CHECK((Quaternion::unit_j() * Quaternion::unit_i()).z == -1.0);
  Rng rng(61);
  for (int t = 0; t < 100; ++t) {
    const Quaternion a = random_quaternion(rng), b = random_quaternion(rng);
    CHECK((a * b).norm() == Catch::Approx(a.norm() * b.norm()).epsilon(1e-12));
  }
}

TEST_CASE("flat moment map") {
  SECTION("mu(1) = i/2 and mu(j) = -i/2") {
    const auto m1 = flat_moment(Quaternion{1, 0, 0, 0});
    CHECK(m1[0] == Catch::Approx(0.5));
    CHECK(m1[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(m1[2] == Catch::Approx(0.0).margin(1e-15));
    const auto mj = flat_moment(Quaternion::unit_j());
    CHECK(mj[0] == Catch::Approx(-0.5));
    CHECK(mj[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(mj[2] == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("|mu(q)| = |q|^2 / 2") {
    Rng rng(62);
    for (int t = 0; t < 100; ++t) {
      const Quaternion q = random_quaternion(rng);
      const auto m = flat_moment(q);
      const double n = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
      CHECK(std::abs(n - 0.5 * q.norm_sq()) < 1e-12);
    }
  }
  SECTION("equivariance under the circle action") {
    Rng rng(63);
    for (int t = 0; t < 100; ++t) {
      const Quaternion q = random_quaternion(rng);
      const double theta = rng.uniform(0, 2 * M_PI);
      const auto a = flat_moment(q), b = flat_moment(circle_act(theta, q));
      for (int i = 0; i < 3; ++i) CHECK(std::abs(a[static_cast<size_t>(i)] -
                                                 b[static_cast<size_t>(i)]) < 1e-12);
    }
  }
}

TEST_CASE("flat structure fields") {
  const auto f = build_flat_structure(FlatModel{1, {}});
  SampleSpec spec;
  spec.seed = 64;
  spec.count = 200;
  const auto pts = sample_points(f.chart, f.sample_box, spec, f.admissible);

  SECTION("field moment map matches the quaternion formula") {
    for (const auto& p : pts) {
      const auto mu = f.moment_at(p);
      const auto mq = flat_moment(quaternion_at(p, 0));
      for (int i = 0; i < 3; ++i)
        CHECK(mu[static_cast<size_t>(i)] ==
              Catch::Approx(mq[static_cast<size_t>(i)]).margin(1e-13));
    }
  }
  SECTION("|X|^2 = 2 |mu| on H") {
    for (const auto& p : pts) {
      const auto mu = f.moment_at(p);
      const double n = std::sqrt(mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2]);
      CHECK(std::abs(f.killing_norm_sq.value(p) - 2.0 * n) < 1e-12);
    }
  }
  SECTION("moment differentials: d(mu^A) = X into omega_A exactly") {
    for (int A = 0; A < 3; ++A) {
      auto dmu = ext_d(f.moment_map[static_cast<size_t>(A)]);
      for (int t = 0; t < 20; ++t) {
        const ChartPoint& p = pts[static_cast<size_t>(t)];
        CHECK(max_form_diff(dmu, f.moment_forms[static_cast<size_t>(A)], p) < 1e-12);
      }
    }
  }
  SECTION("constant triple is closed exactly") {
    for (int A = 0; A < 3; ++A) {
      auto d = ext_d(f.kahler[static_cast<size_t>(A)]);
      CHECK(d.sup_norm(pts[0]) == 0.0);
    }
  }
  SECTION("the symmetry is Killing and tri-holomorphic: d(X into omega_A) = 0 exactly") {
    for (int A = 0; A < 3; ++A) {
      auto d = ext_d(interior_product(f.killing, f.kahler[static_cast<size_t>(A)]));
      for (int t = 0; t < 20; ++t) CHECK(d.sup_norm(pts[static_cast<size_t>(t)]) == 0.0);
    }
  }
  SECTION("complex structure conventions") {
    const ChartPoint& p = pts[0];
    for (int A = 0; A < 3; ++A) {
      const SmallMat m = f.complex_structures[static_cast<size_t>(A)].values(p);
      const SmallMat mm = matmul(m, m);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          CHECK(mm(i, j) == Catch::Approx(i == j ? -1.0 : 0.0).margin(1e-14));
    }
    const SmallMat ij = matmul(f.complex_structures[0].values(p), f.complex_structures[1].values(p));
    const SmallMat k = f.complex_structures[2].values(p);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(ij(i, j) == Catch::Approx(k(i, j)).margin(1e-14));
    // omega_A = g(A.,.) for the euclidean metric
    for (int A = 0; A < 3; ++A) {
      const SmallMat wm = two_form_matrix(f.kahler[static_cast<size_t>(A)], p);
      const SmallMat am = f.complex_structures[static_cast<size_t>(A)].values(p);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          CHECK(wm(i, j) == Catch::Approx(am(j, i)).margin(1e-14));  // g(Ae_i, e_j) = A_{ji}
    }
  }
  SECTION("fixed point guard") {
    CHECK_THROWS_AS(flat_structure_at(f, make_point(f.chart, {0.0, 0.0, 0.0, 0.0})),
                    FixedPointError);
  }
}

TEST_CASE("weighted two-block model") {
  const auto f = build_flat_structure(FlatModel{2, {1, 1}});
  SECTION("moment map adds over blocks: mu(1, 1) = (1, 0, 0)") {
    const auto p = make_point(f.chart, {1, 0, 0, 0, 1, 0, 0, 0});
    const auto mu = f.moment_at(p);
    CHECK(mu[0] == Catch::Approx(1.0));
    CHECK(mu[1] == Catch::Approx(0.0).margin(1e-15));
    CHECK(mu[2] == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("at (1, j) the moment map vanishes but X does not") {
    const auto p = make_point(f.chart, {1, 0, 0, 0, 0, 0, 1, 0});
    const auto mu = f.moment_at(p);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(mu[static_cast<size_t>(i)]) < 1e-15);
    CHECK(f.killing_norm_sq.value(p) == Catch::Approx(2.0));
    // the strict feasibility criterion 2|mu| > |X|^2 fails here
    CHECK(2.0 * 0.0 < f.killing_norm_sq.value(p));
  }
  SECTION("moment identities persist with weights (2, 1)") {
    const auto g = build_flat_structure(FlatModel{2, {2, 1}});
    SampleSpec spec;
    spec.seed = 65;
    spec.count = 50;
    const auto pts = sample_points(g.chart, g.sample_box, spec, g.admissible);
    for (int A = 0; A < 3; ++A) {
      auto dmu = ext_d(g.moment_map[static_cast<size_t>(A)]);
      for (const auto& p : pts)
        CHECK(max_form_diff(dmu, g.moment_forms[static_cast<size_t>(A)], p) < 1e-12);
    }
  }
}

TEST_CASE("norm-moment scan") {
  SECTION("on H the gap 2|mu| - |X|^2 vanishes identically") {
    const auto f = build_flat_structure(FlatModel{1, {}});
    SampleSpec spec;
    spec.seed = 66;
    spec.count = 500;
    const auto report = check_norm_moment(f, spec);
    CHECK(report.checks[0].max <= 1e-12);
  }
  SECTION("a shifted moment map changes the sign of the gap along a line") {
    // mu(t j) = -(t^2/2) i; shifting by +c i gives the gap
    // 2|c - t^2/2| - t^2, positive for small t, negative for large t.
    const auto f = build_flat_structure(FlatModel{1, {}});
    const double c = 0.5;
    auto gap = [&](double t) {
      const auto p = make_point(f.chart, {0.0, 0.0, t, 0.0});
      const auto mu = f.moment_at(p);
      const double d0 = mu[0] + c;
      return 2.0 * std::sqrt(d0 * d0 + mu[1] * mu[1] + mu[2] * mu[2]) -
             f.killing_norm_sq.value(p);
    };
    CHECK(gap(0.2) > 0.0);
    CHECK(gap(2.0) < 0.0);
    bool crossed = false;
    double prev = gap(0.05);
    for (double t = 0.05; t <= 2.0; t += 0.01) {
      const double cur = gap(t);
      if (prev > 0.0 && cur <= 0.0) crossed = true;
      prev = cur;
    }
    CHECK(crossed);
  }
}
