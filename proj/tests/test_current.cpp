#include <catch2/catch_amalgamated.hpp>

#include "conelab/current/battery.hpp"
#include "conelab/current/pushforward.hpp"
#include "conelab/current/restrict.hpp"
#include "conelab/current/slice.hpp"

using namespace conelab;
using namespace conelab::chart;
using namespace conelab::current;

namespace {

PatchCurrent unit_disk_current(int m = 4, double weight = 1.0, int axis = 0) {
  PatchCurrent T;
  T.ambient_dim = m;
  Vec u = Vec::Unit(m, 2 * axis), v = Vec::Unit(m, 2 * axis + 1);
  T.patches.push_back(make_flat_disk(Vec(Vec::Zero(m)), u, v, 1.0, weight));
  T.cycle_flag = false;
  return T;
}

TwoForm coord_form(int i, int j, int m) {
  Mat b = Mat::Zero(m, m);
  b(i, j) = 1.0;
  b(j, i) = -1.0;
  return TwoForm::constant(b);
}

}  // namespace

TEST_CASE("disk action on coordinate forms") {
  auto T = unit_disk_current();
  CHECK(action(T, coord_form(0, 1, 4)) == Catch::Approx(M_PI).margin(1e-8));
  CHECK(action(T, coord_form(2, 3, 4)) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("two-patch current matches high-order reference quadrature") {
  PatchCurrent T;
  T.ambient_dim = 4;
  auto X1 = ProjectiveChartPoint{Vec(Vec::Zero(2)), 0.1};
  Vec z2(2);
  z2 << 0.4, -0.3;
  auto X2 = ProjectiveChartPoint{z2, 0.1};
  T.patches.push_back(make_cone_ray(X1, 0.5));
  T.patches.push_back(make_cone_ray(X2, 0.5));
  T.quad_order = 16;

  auto battery = TestFormBattery::make(4, 6, 0, 2, 1.2, 42);
  PatchCurrent Tref = T;
  Tref.quad_order = 64;
  for (const auto& beta : battery.two_forms)
    CHECK(action(T, beta) == Catch::Approx(action(Tref, beta)).margin(1e-6));
}

TEST_CASE("action is linear in the form") {
  auto T = unit_disk_current();
  auto battery = TestFormBattery::make(4, 4, 0, 2, 1.2, 7);
  Rng rng(9);
  for (int k = 0; k + 1 < static_cast<int>(battery.two_forms.size()); k += 2) {
    const auto& b1 = battery.two_forms[k];
    const auto& b2 = battery.two_forms[k + 1];
    double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    TwoForm combo([&b1, &b2, a, b](const Vec& x) {
      return Mat(a * b1.matrix(x) + b * b2.matrix(x));
    }, 4);
    CHECK(action(T, combo) ==
          Catch::Approx(a * action(T, b1) + b * action(T, b2)).margin(1e-12));
  }
}

TEST_CASE("mass-comass duality bound") {
  auto T = unit_disk_current(4, 0.7);
  auto triple = standard_triple(4);
  auto battery = TestFormBattery::make(4, 8, 0, 2, 1.2, 21);
  double bound = mass_upper_bound(T, triple);
  Rng rng(5);
  for (const auto& beta : battery.two_forms) {
    // sup comass over the support, sampled
    double cm = 0.0;
    for (int s = 0; s < 64; ++s) {
      Vec x(4);
      for (int i = 0; i < 4; ++i) x(i) = rng.uniform(-1.2, 1.2);
      cm = std::max(cm, comass(beta.matrix(x), Mat(Mat::Identity(4, 4))));
    }
    CHECK(std::abs(action(T, beta)) <= bound * cm + 1e-6);
  }
}

TEST_CASE("positive mass of disks and the identity M = T(omega)") {
  auto triple = standard_triple(4);
  auto T = unit_disk_current();
  CHECK(positive_mass(T, triple, ball(Vec(Vec::Zero(4)), 1.0)) ==
        Catch::Approx(M_PI).margin(1e-8));
  auto T2 = unit_disk_current(4, 2.5);
  CHECK(positive_mass(T2, triple, ball(Vec(Vec::Zero(4)), 1.0)) ==
        Catch::Approx(2.5 * M_PI).margin(1e-7));
}

TEST_CASE("positive mass rejects non-positive currents") {
  // totally real plane e0 ^ e2
  PatchCurrent T;
  T.ambient_dim = 4;
  T.patches.push_back(make_flat_disk(Vec(Vec::Zero(4)), Vec(Vec::Unit(4, 0)),
                                     Vec(Vec::Unit(4, 2)), 1.0, 1.0));
  auto triple = standard_triple(4);
  CHECK_THROWS_AS(positive_mass(T, triple), NotPositiveError);
  auto rep = positivity_check(T, triple);
  CHECK_FALSE(rep.passed);
  CHECK(std::abs(rep.min_pairing) < 1e-12);
  CHECK(std::abs(rep.mean_pairing) < 1e-12);
}

TEST_CASE("positivity of the flat disk is exact") {
  auto rep = positivity_check(unit_disk_current(), standard_triple(4));
  CHECK(rep.passed);
  CHECK(rep.min_pairing == Catch::Approx(1.0).margin(1e-13));
  CHECK(rep.mean_pairing == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("boundary action via Stokes") {
  auto T = unit_disk_current();
  // alpha = x1 dy1: d alpha = dx1 ^ dy1, disk integral = pi
  OneForm alpha([](const Vec& x) {
    Vec c = Vec::Zero(4);
    c(1) = x(0);
    return c;
  }, [](const Vec&) {
    Mat d = Mat::Zero(4, 4);
    d(1, 0) = 1.0;  // d c_1 / d x_0
    return d;
  }, 4);
  CHECK(boundary_action(T, alpha) == Catch::Approx(M_PI).margin(1e-8));
  // closed form alpha = dx1 has boundary action 0
  OneForm closed = OneForm::constant(Vec(Vec::Unit(4, 0)));
  CHECK(boundary_action(T, closed) == Catch::Approx(0.0).margin(1e-9));
  // missing derivative is an error
  OneForm noder([](const Vec& x) { return Vec(x); }, 4);
  CHECK_THROWS(boundary_action(T, noder));
}

TEST_CASE("Stokes consistency of the two boundary routes") {
  auto T = unit_disk_current();
  auto battery = TestFormBattery::make(4, 0, 5, 2, 1.4, 33);
  for (const auto& alpha : battery.one_forms) {
    double via_d = boundary_action(T, alpha);
    double via_line = boundary_line_integral(T, alpha);
    CHECK(via_d == Catch::Approx(via_line).margin(1e-6));
  }
}

TEST_CASE("restriction of the unit disk to a half ball") {
  auto triple = standard_triple(4);
  auto T = unit_disk_current();
  auto r = restrict_current(T, ball(Vec(Vec::Zero(4)), 0.5));
  CHECK(r.error_bound == Catch::Approx(0.0).margin(1e-12));  // aligned cut
  CHECK(action(r.current, triple.omega) == Catch::Approx(M_PI / 4).margin(1e-4));

  // restriction to a region containing the patch images is a no-op
  auto r2 = restrict_current(T, ball(Vec(Vec::Zero(4)), 3.0));
  auto battery = TestFormBattery::make(4, 5, 0, 2, 1.2, 11);
  for (const auto& beta : battery.two_forms)
    CHECK(action(r2.current, beta) == Catch::Approx(action(T, beta)).margin(1e-12));
}

TEST_CASE("restriction to an off-axis ball reports a small error bound") {
  auto triple = standard_triple(4);
  auto T = unit_disk_current();
  Vec c(4);
  c << 0.3, 0.1, 0.0, 0.0;
  auto r = restrict_current(T, ball(c, 0.4));
  // exact: disk cap area; the ball meets the disk plane in a 2-ball of
  // radius 0.4 centered at (0.3, 0.1) inside the unit disk
  CHECK(action(r.current, triple.omega) ==
        Catch::Approx(M_PI * 0.16).margin(2e-3));
  CHECK(r.error_bound < 2e-3);
  CHECK(r.error_bound > 0.0);
}

TEST_CASE("annulus restriction of a two-ray cone") {
  auto triple = standard_triple(4);
  PatchCurrent T;
  T.ambient_dim = 4;
  Vec z(2);
  z << 0.2, 0.5;
  T.patches.push_back(make_cone_ray(ProjectiveChartPoint{Vec(Vec::Zero(2)), 0.1}, 0.6));
  T.patches.push_back(make_cone_ray(ProjectiveChartPoint{z, 0.1}, 0.4));
  auto r = restrict_current(T, annulus(Vec(Vec::Zero(4)), 0.25, 0.75));
  CHECK(action(r.current, triple.omega) ==
        Catch::Approx(M_PI * (0.75 * 0.75 - 0.25 * 0.25)).margin(1e-4));
  CHECK(r.error_bound < 1e-9);
}

TEST_CASE("open-domain flag controls the cycle marker") {
  auto T = unit_disk_current();
  T.cycle_flag = true;
  auto closed_view = restrict_current(T, ball(Vec(Vec::Zero(4)), 0.5));
  CHECK_FALSE(closed_view.current.cycle_flag);
  auto open_view =
      restrict_current(T, ball(Vec(Vec::Zero(4)), 0.5), {12, true});
  CHECK(open_view.current.cycle_flag);
}

TEST_CASE("sphere slice of the flat disk") {
  auto triple = standard_triple(4);
  auto T = unit_disk_current();
  auto slice = slice_sphere(T, triple, Vec(Vec::Zero(4)), 0.5);
  CHECK(slice.mass == Catch::Approx(M_PI).margin(1e-6));  // circle length 2 pi r

  // disk not meeting the sphere
  PatchCurrent far = unit_disk_current();
  Vec shift(4);
  shift << 5.0, 0.0, 0.0, 0.0;
  far = pushforward_affine_exact(far, Mat(Mat::Identity(4, 4)), shift);
  auto empty = slice_sphere(far, triple, Vec(Vec::Zero(4)), 0.5);
  CHECK(empty.segments.empty());
  CHECK(empty.mass == 0.0);
}

TEST_CASE("slice identity against restricted boundary") {
  // <T,|z|=r>(alpha) = d(T |_ B_r)(alpha) for the boundaryless disk piece
  auto triple = standard_triple(4);
  auto T = unit_disk_current();
  auto battery = TestFormBattery::make(4, 0, 6, 2, 1.4, 55);
  for (double r : {0.5, 0.62}) {
    auto slice = slice_sphere(T, triple, Vec(Vec::Zero(4)), r);
    auto inner = restrict_current(T, ball(Vec(Vec::Zero(4)), r), {20, true});
    for (const auto& alpha : battery.one_forms) {
      double lhs = slice.action(alpha, 16);
      double rhs = boundary_action(inner.current, alpha);
      CHECK(lhs == Catch::Approx(rhs).margin(1e-5));
    }
  }
}

TEST_CASE("pushforward by the identity and by complex-linear maps") {
  auto T = unit_disk_current();
  auto triple = standard_triple(4);
  auto battery = TestFormBattery::make(4, 6, 0, 2, 1.2, 77);

  auto id = affine_map(Mat(Mat::Identity(4, 4)), Vec(Vec::Zero(4)));
  auto res = pushforward(T, id, triple, triple, {true, 1e-10});
  for (const auto& beta : battery.two_forms)
    CHECK(action(res.current, beta) == Catch::Approx(action(T, beta)).margin(1e-12));

  // complex-linear map z -> A z on C^2 is J0-holomorphic
  Mat a = Mat::Zero(4, 4);
  // A = [[1, 0.3+0.2i],[-0.1i, 0.8]] acting on (z0, z1), realified blocks
  auto put = [&](int bi, int bj, double re, double im) {
    a(2 * bi, 2 * bj) = re;
    a(2 * bi, 2 * bj + 1) = -im;
    a(2 * bi + 1, 2 * bj) = im;
    a(2 * bi + 1, 2 * bj + 1) = re;
  };
  put(0, 0, 1.0, 0.0);
  put(0, 1, 0.3, 0.2);
  put(1, 0, 0.0, -0.1);
  put(1, 1, 0.8, 0.0);
  auto cl = affine_map(a, Vec(Vec::Zero(4)));
  auto res2 = pushforward(T, cl, triple, triple, {true, 1e-10});
  auto rep = positivity_check(res2.current, triple);
  CHECK(rep.passed);

  // a non-holomorphic map trips the pseudoholomorphy gate
  Mat bad = Mat::Identity(4, 4);
  bad(0, 0) = 2.0;  // real scaling of one coordinate only
  CHECK_THROWS_AS(
      pushforward(T, affine_map(bad, Vec(Vec::Zero(4))), triple, triple,
                  {true, 1e-10}),
      PseudoholomorphyError);
}

TEST_CASE("pushforward functoriality on battery actions") {
  auto T = unit_disk_current();
  auto triple = standard_triple(4);
  Rng rng(3);
  Mat a = Mat::Identity(4, 4), b = Mat::Identity(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a(i, j) += 0.1 * rng.normal();
      b(i, j) += 0.1 * rng.normal();
    }
  Vec va(4), vb(4);
  for (int i = 0; i < 4; ++i) {
    va(i) = 0.1 * rng.normal();
    vb(i) = 0.1 * rng.normal();
  }
  auto f = affine_map(a, va);
  auto h = affine_map(b, vb);
  auto fh = affine_map(Mat(b * a), Vec(b * va + vb));

  auto step = pushforward(pushforward(T, f, triple, triple).current, h, triple,
                          triple).current;
  auto direct = pushforward(T, fh, triple, triple).current;
  auto battery = TestFormBattery::make(4, 6, 0, 2, 2.0, 13);
  for (const auto& beta : battery.two_forms)
    CHECK(action(step, beta) == Catch::Approx(action(direct, beta)).margin(1e-9));
}

TEST_CASE("cycle verification flags the open disk but passes a sphere pair") {
  // The unit disk has boundary: verify_cycle must fail against 1-forms
  // supported across the rim; a full round sphere of disk boundary pairs is
  // exercised in the scenario tests.
  auto T = unit_disk_current();
  auto battery = TestFormBattery::make(4, 0, 12, 2, 1.4, 99);
  auto rep = verify_cycle(T, battery, 1e-3);
  CHECK_FALSE(rep.passed);
}

TEST_CASE("node-backed parts integrate and restrict") {
  // a crude node representation of the unit disk: radial grid of simple
  // tangent nodes; checks the node code paths against the patch ones
  PatchCurrent T;
  T.ambient_dim = 4;
  NodeGroup g;
  g.spec.generator = "test_nodes";
  const int nr = 160, nt = 160;
  Vec e0 = Vec::Unit(4, 0), e1 = Vec::Unit(4, 1);
  TwoVector plane = TwoVector::wedge(e0, e1);
  for (int i = 0; i < nr; ++i) {
    double r = (i + 0.5) / nr;
    for (int j = 0; j < nt; ++j) {
      double th = 2 * M_PI * (j + 0.5) / nt;
      DensityNode nd;
      nd.point = Vec(r * std::cos(th) * e0 + r * std::sin(th) * e1);
      nd.xi = plane.coeffs();
      nd.weight = r * (1.0 / nr) * (2 * M_PI / nt);
      g.nodes.push_back(std::move(nd));
    }
  }
  g.cell_diameter = 1.0 / nr;
  T.groups.push_back(std::move(g));

  auto triple = standard_triple(4);
  CHECK(action(T, triple.omega) == Catch::Approx(M_PI).margin(1e-3));
  auto rep = positivity_check(T, triple);
  CHECK(rep.passed);

  auto r = restrict_current(T, ball(Vec(Vec::Zero(4)), 0.5));
  CHECK(action(r.current, triple.omega) == Catch::Approx(M_PI / 4).margin(2e-3));
  CHECK(r.error_bound > 0.0);

  CHECK_THROWS(slice_sphere(T, triple, Vec(Vec::Zero(4)), 0.5));
}
