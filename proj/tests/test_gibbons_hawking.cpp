#include <catch2/catch_amalgamated.hpp>

#include "hktl/gibbons_hawking.hpp"
#include "support.hpp"

using namespace hktl;
using namespace testutil;

namespace {

GHStructure flat_r4() {
  return build_gh_structure(HarmonicPotential(0.0, {PointSource{{0, 0, 0}, +1}}), Patch::North);
}

GHStructure taub_nut() {
  return build_gh_structure(HarmonicPotential(1.0, {PointSource{{0, 0, 0}, +1}}), Patch::North);
}

GHStructure flat_product(double c = 1.0) {
  return build_gh_structure(HarmonicPotential(c, {}), Patch::North);
}

GHStructure eguchi_hanson() {
  return build_gh_structure(
      HarmonicPotential(0.0, {PointSource{{0.7, 0, 0}, +1}, PointSource{{-0.7, 0, 0}, +1}}),
      Patch::North);
}

std::vector<ChartPoint> admissible_points(const GHStructure& s, int count, std::uint64_t seed) {
  SampleSpec spec;
  spec.seed = seed;
  spec.count = count;
  return sample_points(s.fields.chart, s.fields.sample_box, spec, s.fields.admissible);
}

}  // namespace

TEST_CASE("structure construction accepts the standard potentials") {
  CHECK_NOTHROW(flat_r4());
  CHECK_NOTHROW(taub_nut());
  CHECK_NOTHROW(flat_product());
  CHECK_NOTHROW(eguchi_hanson());
}

TEST_CASE("non-positive potentials are rejected with a witness point") {
  Polynomial3 lin;
  lin.add(0, 0, 1, 1.0);  // V = 0.1 + z
  try {
    build_gh_structure(HarmonicPotential(0.1, {}, lin), Patch::North);
    FAIL("expected positivity error");
  } catch (const PositivityError& e) {
    REQUIRE(e.point.size() == 3);
    CHECK(0.1 + e.point[2] <= 0.0);
  }
}

TEST_CASE("metric values") {
  SECTION("constant potential 1 gives the identity metric") {
    auto s = flat_product(1.0);
    Rng rng(41);
    const auto pts = admissible_points(s, 10, 41);
    for (const auto& p : pts) {
      const SmallMat g = metric_at(s, p);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(g(i, j) == Catch::Approx(i == j ? 1 : 0).margin(1e-14));
    }
  }
  SECTION("determinant equals V^2 and the metric stays positive") {
    auto s = taub_nut();
    const auto pts = admissible_points(s, 1000, 42);
    for (const auto& p : pts) {
      const SmallMat g = metric_at(s, p);
      const double V = 1.0 / s.fields.killing_norm_sq.value(p);
      CHECK(determinant(g) == Catch::Approx(V * V).epsilon(1e-10));
      CHECK(sym_eigenvalues(g)[0] > 0.0);
    }
  }
  SECTION("inadmissible points raise an exclusion error") {
    auto s = flat_r4();
    CHECK_THROWS_AS(metric_at(s, make_point(s.fields.chart, {0.0, 0.0, 0.0, 5e-3})),
                    ExclusionError);
  }
}

TEST_CASE("Kahler triple") {
  SECTION("flat product: omega_I = dt^dx + dy^dz") {
    auto s = flat_product(1.0);
    const auto pts = admissible_points(s, 5, 43);
    for (const auto& p : pts) {
      CHECK(s.fields.kahler[0].coefficient(p, {0, 1}) == Catch::Approx(1.0).margin(1e-14));
      CHECK(s.fields.kahler[0].coefficient(p, {2, 3}) == Catch::Approx(1.0).margin(1e-14));
      CHECK(std::abs(s.fields.kahler[0].coefficient(p, {0, 2})) < 1e-14);
    }
  }
  SECTION("equal volume forms: omega_I^2 = omega_J^2 = omega_K^2") {
    auto s = eguchi_hanson();
    const auto pts = admissible_points(s, 200, 44);
    auto vI = wedge(s.fields.kahler[0], s.fields.kahler[0]);
    auto vJ = wedge(s.fields.kahler[1], s.fields.kahler[1]);
    auto vK = wedge(s.fields.kahler[2], s.fields.kahler[2]);
    for (const auto& p : pts) {
      const double a = vI.coefficient(p, {0, 1, 2, 3});
      CHECK(vJ.coefficient(p, {0, 1, 2, 3}) == Catch::Approx(a).epsilon(1e-12));
      CHECK(vK.coefficient(p, {0, 1, 2, 3}) == Catch::Approx(a).epsilon(1e-12));
      // both equal 2 V (dt+omega)^dx^dy^dz whose top coefficient is 2V
      const double V = 1.0 / s.fields.killing_norm_sq.value(p);
      CHECK(a == Catch::Approx(2.0 * V).epsilon(1e-12));
    }
  }
  SECTION("moment map differentials: X into omega_I is exactly dx") {
    auto s = taub_nut();
    auto contraction = interior_product(s.fields.killing, s.fields.kahler[0]);
    const auto pts = admissible_points(s, 20, 45);
    for (const auto& p : pts) {
      CHECK(contraction.coefficient(p, {1}) == 1.0);  // exact
      CHECK(contraction.coefficient(p, {0}) == 0.0);
      CHECK(contraction.coefficient(p, {2}) == 0.0);
      CHECK(contraction.coefficient(p, {3}) == 0.0);
      // and equals d(mu^I) coefficient-exactly
      auto dmu = ext_d(s.fields.moment_map[0]);
      for (int i = 0; i < 4; ++i)
        CHECK(dmu.coefficient(p, {i}) == contraction.coefficient(p, {i}));
    }
  }
}

TEST_CASE("Killing data") {
  auto s = eguchi_hanson();
  const auto kd = killing_data(s);
  const auto pts = admissible_points(s, 200, 46);
  SECTION("|X|^2 V = 1 and alpha_0(X) = |X|^2") {
    for (const auto& p : pts) {
      const double n2 = kd.killing_norm_sq.value(p);
      const double V = s.potential_r3.value(make_point(r3_chart(), {p[1], p[2], p[3]}));
      CHECK(std::abs(n2 * V - 1.0) < 1e-12);
      const double a0x = pair_with(kd.killing, kd.killing_form).value(p);
      CHECK(a0x == Catch::Approx(n2).epsilon(1e-12));
      CHECK(a0x * a0x == Catch::Approx(n2 * n2).epsilon(1e-12));
      for (int A = 0; A < 3; ++A)
        CHECK(std::abs(pair_with(kd.killing, kd.moment_forms[static_cast<size_t>(A)]).value(p)) <
              1e-14);
    }
  }
  SECTION("quaternionic metric matches g_HX(X,X) = |X|^4") {
    for (const auto& p : pts) {
      const SmallMat q = kd.quaternionic_metric.values(p);
      const SmallVec x = kd.killing.values(p);
      const double n2 = kd.killing_norm_sq.value(p);
      CHECK(dot(x, matvec(q, x)) == Catch::Approx(n2 * n2).epsilon(1e-12));
    }
  }
}

TEST_CASE("orthonormal frame and complex structures") {
  auto s = eguchi_hanson();
  const auto pts = admissible_points(s, 100, 47);
  Rng rng(47);
  for (const auto& p : pts) {
    const auto fr = frame_at(s, p);
    const SmallMat g = metric_at(s, p);
    // frame orthonormality
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        CHECK(dot(fr.vectors[static_cast<size_t>(a)],
                  matvec(g, fr.vectors[static_cast<size_t>(b)])) ==
              Catch::Approx(a == b ? 1.0 : 0.0).margin(1e-11));
    // quaternion relations
    const SmallMat IJ = matmul(fr.I, fr.J);
    const SmallMat II = matmul(fr.I, fr.I);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        CHECK(IJ(i, j) == Catch::Approx(fr.K(i, j)).margin(1e-10));
        CHECK(II(i, j) == Catch::Approx(i == j ? -1.0 : 0.0).margin(1e-10));
      }
    // I e0 = e1, I e2 = e3
    const SmallVec ie0 = matvec(fr.I, fr.vectors[0]);
    const SmallVec ie2 = matvec(fr.I, fr.vectors[2]);
    for (int i = 0; i < 4; ++i) {
      CHECK(ie0[i] == Catch::Approx(fr.vectors[1][i]).margin(1e-11));
      CHECK(ie2[i] == Catch::Approx(fr.vectors[3][i]).margin(1e-11));
    }
    // metric compatibility and omega_I(u,v) = g(I u, v) on random vectors
    SmallVec u = SmallVec::zero(4), w = SmallVec::zero(4);
    for (int i = 0; i < 4; ++i) {
      u[i] = rng.uniform(-1, 1);
      w[i] = rng.uniform(-1, 1);
    }
    const SmallVec iu = matvec(fr.I, u), iw = matvec(fr.I, w);
    CHECK(dot(iu, matvec(g, iw)) == Catch::Approx(dot(u, matvec(g, w))).margin(1e-10));
    const SmallMat wI = two_form_matrix(s.fields.kahler[0], p);
    CHECK(dot(u, matvec(wI, w)) == Catch::Approx(dot(iu, matvec(g, w))).margin(1e-10));
  }
}

TEST_CASE("hodge star on the structure frame") {
  auto s = taub_nut();
  const auto& f = s.fields;
  auto dx = DifferentialForm::from_components(
      f.chart, 1, {{MultiIndex::of({1}), ScalarField::constant(f.chart, 1.0)}});
  auto star = hodge3(dx, f.hodge_frame);
  const auto pts = admissible_points(s, 20, 53);
  for (const auto& p : pts) {
    CHECK(star.coefficient(p, {2, 3}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(star.coefficient(p, {0, 2})) < 1e-12);
    // involution back to dx
    auto back = hodge3(star, f.hodge_frame);
    CHECK(max_form_diff(back, dx, p) < 1e-12);
  }
  // alpha_0 has a component transverse to the frame span
  CHECK_THROWS_AS(hodge3(f.killing_form, f.hodge_frame).sup_norm(pts.front()),
                  SpanViolationError);
}

TEST_CASE("empty admissible sample is a sampling error") {
  GHDomain dom;
  dom.box = {{{-5e-3, 5e-3}, {-5e-3, 5e-3}, {-5e-3, 5e-3}}};  // inside r_excl of the source
  auto s = build_gh_structure_with_gauge(
      HarmonicPotential(0.0, {PointSource{{0, 0, 0}, +1}}),
      potential_one_form(HarmonicPotential(0.0, {PointSource{{0, 0, 0}, +1}}), Patch::North),
      Patch::North, dom);
  SampleSpec spec;
  spec.seed = 54;
  spec.count = 10;
  CHECK_THROWS_AS(verify_hyperkahler(s, spec), SamplingError);
}

TEST_CASE("endomorphism sign convention against the contraction") {
  auto s = taub_nut();
  auto lhs = endo_action(s.fields.complex_structures[0], s.fields.killing_form);
  auto rhs = interior_product(s.fields.killing, s.fields.kahler[0]);
  const auto pts = admissible_points(s, 100, 48);
  for (const auto& p : pts) CHECK(max_form_diff(lhs, rhs, p) < 1e-10);
}

TEST_CASE("flat of the symmetry vector is alpha_0") {
  auto s = taub_nut();
  auto a = musical_flat(s.fields.metric, s.fields.killing);
  const auto pts = admissible_points(s, 50, 49);
  for (const auto& p : pts) CHECK(max_form_diff(a, s.fields.killing_form, p) < 1e-13);
}

TEST_CASE("verification sweeps") {
  SECTION("Eguchi-Hanson-type structure passes at 1e-6") {
    auto s = eguchi_hanson();
    SampleSpec spec;
    spec.seed = 50;
    spec.count = 1000;
    const auto report = verify_hyperkahler(s, spec);
    CHECK(report.all_pass());
    for (const auto& c : report.checks) CHECK(c.max < 1e-10);
  }
  SECTION("constant potential is flat to rounding") {
    auto s = flat_product(1.0);
    SampleSpec spec;
    spec.seed = 51;
    spec.count = 200;
    const auto report = verify_hyperkahler(s, spec);
    CHECK(report.all_pass());
    for (const auto& c : report.checks) CHECK(c.max < 1e-12);
  }
  SECTION("a planted gauge defect is detected at its own scale") {
    const HarmonicPotential V(0.0, {PointSource{{0, 0, 0}, +1}});
    auto good_gauge = potential_one_form(V, Patch::North);
    // corrupt: omega += 0.01 x dy
    auto x = ScalarField::coordinate(r3_chart(), 0);
    MultiIndex dy;
    dy.idx[dy.len++] = 1;
    auto defect = DifferentialForm::from_components(
        r3_chart(), 1, {{dy, 0.01 * x}});
    auto s = build_gh_structure_with_gauge(V, good_gauge + defect, Patch::North);
    SampleSpec spec;
    spec.seed = 52;
    spec.count = 300;
    const auto report = verify_hyperkahler(s, spec);
    CHECK_FALSE(report.all_pass());
    const auto* mono = report.find("monopole");
    REQUIRE(mono != nullptr);
    CHECK(mono->max == Catch::Approx(0.01).epsilon(0.05));
  }
}
