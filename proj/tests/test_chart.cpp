#include <catch2/catch_amalgamated.hpp>

#include "conelab/chart/comass.hpp"
#include "conelab/chart/projective.hpp"
#include "conelab/chart/triple.hpp"

using namespace conelab;
using namespace conelab::chart;

namespace {

// Brute-force comass oracle: maximize beta(u,v) over orthonormal pairs by
// random restarts plus stochastic hill climbing. Independent of the skew
// normal form route.
double comass_sampling_oracle(const Mat& beta, int restarts = 40,
                              std::uint64_t seed = 99) {
  const int m = static_cast<int>(beta.rows());
  Rng rng(seed);
  auto value = [&](const Vec& u, const Vec& v) { return u.dot(beta * v); };
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Vec u(m), v(m);
    for (int i = 0; i < m; ++i) u(i) = rng.normal();
    u.normalize();
    for (int i = 0; i < m; ++i) v(i) = rng.normal();
    v -= u.dot(v) * u;
    v.normalize();
    double cur = std::abs(value(u, v));
    double step = 0.5;
    while (step > 1e-9) {
      bool improved = false;
      for (int trial = 0; trial < 60; ++trial) {
        Vec du(m), dv(m);
        for (int i = 0; i < m; ++i) du(i) = rng.normal();
        for (int i = 0; i < m; ++i) dv(i) = rng.normal();
        Vec nu = (u + step * du).normalized();
        Vec nv = v + step * dv;
        nv -= nu.dot(nv) * nu;
        nv.normalize();
        double val = std::abs(value(nu, nv));
        if (val > cur) {
          cur = val;
          u = nu;
          v = nv;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::max(best, cur);
  }
  return best;
}

Mat flat(int m) { return Mat::Identity(m, m); }

}  // namespace

TEST_CASE("comass of the standard form is 1") {
  Mat om = standard_omega(4);
  CHECK(comass(om, flat(4)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(comass(standard_omega(8), flat(8)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("comass scales simple forms") {
  // 3 dx1 ^ dx2 (coordinates x1,y1,x2,y2 -> indices 0,1,2,3; dx1^dx2 pairs 0,2)
  Mat b = Mat::Zero(4, 4);
  b(0, 2) = 3.0;
  b(2, 0) = -3.0;
  CHECK(comass(b, flat(4)) == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("comass of a mixed form matches the sampling oracle") {
  // dx1^dx2 + dx1^dx3 + dx2^dx4 on R^4 (plain indices 1..4 -> 0..3)
  Mat b = Mat::Zero(4, 4);
  auto put = [&](int i, int j) { b(i, j) += 1.0; b(j, i) -= 1.0; };
  put(0, 1);
  put(0, 2);
  put(1, 3);
  double exact = comass(b, flat(4));
  // frozen value: golden ratio, from the skew normal form blocks
  CHECK(exact == Catch::Approx(1.6180339887498949).margin(1e-9));
  double oracle = comass_sampling_oracle(b);
  CHECK(std::abs(exact - oracle) < 1e-6);
}

TEST_CASE("degenerate metric is rejected") {
  Mat g = flat(4);
  g(3, 3) = -1.0;
  CHECK_THROWS_AS(comass(standard_omega(4), g), DegenerateMetricError);
}

TEST_CASE("mass norm on simple, composite and zero vectors") {
  Vec e1 = Vec::Unit(4, 0), e2 = Vec::Unit(4, 1), e3 = Vec::Unit(4, 2),
      e4 = Vec::Unit(4, 3);
  CHECK(mass_norm(TwoVector::wedge(e1, e2), flat(4)) ==
        Catch::Approx(1.0).margin(1e-12));
  TwoVector xi = TwoVector::wedge(e1, e2) + TwoVector::wedge(e3, e4);
  CHECK(mass_norm(xi, flat(4)) == Catch::Approx(2.0).margin(1e-12));
  CHECK(mass_norm(TwoVector::zero(4), flat(4)) == Catch::Approx(0.0).margin(1e-15));
  // net-based dual evaluation oracle converges to the same value
  double est = mass_norm_estimate(xi, flat(4), 1e-4);
  CHECK(std::abs(est - 2.0) < 1e-3);
}

TEST_CASE("mass norm is a norm and dual to comass") {
  Rng rng(7);
  const int m = 4;
  auto random_two_vector = [&]() {
    Vec c(pair_count(m));
    for (int i = 0; i < c.size(); ++i) c(i) = rng.normal();
    return TwoVector(c, m);
  };
  for (int t = 0; t < 50; ++t) {
    TwoVector a = random_two_vector();
    TwoVector b = random_two_vector();
    double ma = mass_norm(a, flat(m));
    double mb = mass_norm(b, flat(m));
    double mab = mass_norm(a + b, flat(m));
    CHECK(mab <= ma + mb + 1e-9);
    // duality: <beta, xi> <= comass(beta) mass(xi)
    Mat beta = skew_from_pairs(random_two_vector().coeffs(), m);
    double pairing = a.pair_with(beta);
    CHECK(pairing <= comass(beta, flat(m)) * ma + 1e-6);
  }
  // unit simple vectors have mass 1
  for (int t = 0; t < 20; ++t) {
    Vec u(m), v(m);
    for (int i = 0; i < m; ++i) u(i) = rng.normal();
    u.normalize();
    for (int i = 0; i < m; ++i) v(i) = rng.normal();
    v -= u.dot(v) * u;
    v.normalize();
    CHECK(mass_norm(TwoVector::wedge(u, v), flat(m)) ==
          Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("comass homogeneity") {
  Rng rng(11);
  const int m = 6;
  for (int t = 0; t < 100; ++t) {
    Vec c(pair_count(m));
    for (int i = 0; i < c.size(); ++i) c(i) = rng.normal();
    Mat b = skew_from_pairs(c, m);
    double lam = rng.uniform(-3.0, 3.0);
    CHECK(comass(Mat(lam * b), flat(m)) ==
          Catch::Approx(std::abs(lam) * comass(b, flat(m))).margin(1e-10));
  }
}

TEST_CASE("calibrated planes are the J-invariant ones") {
  auto t = standard_triple(4);
  Vec zero = Vec::Zero(4);
  Mat j = t.J_at(zero), g = t.g_at(zero), om = t.omega_at(zero);

  Vec e1 = Vec::Unit(4, 0);
  auto chk = is_calibrated_plane(j, g, om, TwoVector::wedge(e1, Vec(j * e1)));
  CHECK(chk.calibrated);
  CHECK(chk.residual == Catch::Approx(0.0).margin(1e-12));
  CHECK(chk.omega_pairing == Catch::Approx(1.0).margin(1e-12));

  // totally real plane e1 ^ e3
  Vec e3 = Vec::Unit(4, 2);
  auto chk2 = is_calibrated_plane(j, g, om, TwoVector::wedge(e1, e3));
  CHECK_FALSE(chk2.calibrated);
  CHECK(std::abs(chk2.omega_pairing) < 1e-12);

  // non-simple input is a domain error
  TwoVector ns = TwoVector::wedge(e1, Vec(j * e1)) + TwoVector::wedge(e3, Vec(j * e3));
  CHECK_THROWS_AS(is_calibrated_plane(j, g, om, ns), NonSimpleError);
}

TEST_CASE("perturbed triple keeps small calibration residual") {
  // |J - J0| <= Q |x| with Q = 0.05; at |x| = 0.1 a plane calibrated for J0
  // has residual <= Q|x| and omega-pairing within 2 Q |x| of 1.
  const int m = 4;
  const double q = 0.05;
  auto J = [m, q](const Vec& x) {
    // J = R J0 R^T for a small rotation R built from Givens factors keeps
    // J^2 = -I exact; the angle scale keeps |J - J0| <= q |x|.
    double th = 0.25 * q * x.norm();
    Mat r = Mat::Identity(m, m);
    auto givens = [&](int i, int j, double ang) {
      Mat gm = Mat::Identity(m, m);
      gm(i, i) = std::cos(ang);
      gm(j, j) = std::cos(ang);
      gm(i, j) = -std::sin(ang);
      gm(j, i) = std::sin(ang);
      r = gm * r;
    };
    givens(0, 2, th);
    givens(1, 3, -0.5 * th);
    return Mat(r * standard_J(m) * r.transpose());
  };
  auto t = triple_from_J(m, J, 2.0 * q, q, {TripleDomain::Kind::Sector, 1.1, 0.1});
  auto rep = verify_triple(t, 128, 1e-8);
  INFO(rep.failure);
  CHECK(rep.passed);

  Vec x(4);
  x << 0.1, 0.0, 0.0, 0.0;
  x *= 0.1 / x.norm();
  Vec e1 = Vec::Unit(4, 0);
  Mat j0 = standard_J(4);
  auto chk = is_calibrated_plane(t.J_at(x), t.g_at(x), t.omega_at(x),
                                 TwoVector::wedge(e1, Vec(j0 * e1)), 1.0);
  CHECK(chk.residual <= 0.005 + 1e-9);
  CHECK(std::abs(chk.omega_pairing - 1.0) <= 0.01);
}

TEST_CASE("sampled unit simple pairings never exceed 1 and match calibration") {
  auto t = standard_triple(4);
  Vec zero = Vec::Zero(4);
  Mat j = t.J_at(zero), g = t.g_at(zero), om = t.omega_at(zero);
  Rng rng(5);
  for (int s = 0; s < 200; ++s) {
    Vec u(4), v(4);
    for (int i = 0; i < 4; ++i) u(i) = rng.normal();
    u.normalize();
    for (int i = 0; i < 4; ++i) v(i) = rng.normal();
    v -= u.dot(v) * u;
    v.normalize();
    TwoVector xi = TwoVector::wedge(u, v);
    double val = xi.pair_with(om);
    CHECK(val <= 1.0 + 1e-9);
    bool eq = std::abs(val - 1.0) <= 1e-6;
    auto chk = is_calibrated_plane(j, g, om, xi, 2e-3);
    CHECK(eq == chk.calibrated);
  }
}

TEST_CASE("Fubini-Study metric from the potential") {
  // closed form at 0 equals flat; oracle: finite differences of
  // f = (1/2) log(1+|Z|^2) confirm the second derivatives.
  ProjectiveChartPoint p0{Vec::Zero(2), 0.1};
  auto fs0 = fubini_study(p0);
  CHECK((fs0.metric - Mat::Identity(2, 2)).norm() < 1e-12);

  auto potential = [](const Vec& z) { return 0.5 * std::log(1.0 + z.squaredNorm()); };
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    Vec z(4);
    for (int i = 0; i < 4; ++i) z(i) = rng.uniform(-0.6, 0.6);
    ProjectiveChartPoint p{z, 0.1};
    auto fs = fubini_study(p);
    // FD Hessian of the potential: g_FS = Hess f restricted suitably.
    // For a Kaehler potential in real coordinates, g = (H + J0^T H J0)/2.
    const double h = 1e-5;
    Mat hess(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Vec zpp = z, zpm = z, zmp = z, zmm = z;
        zpp(i) += h; zpp(j) += h;
        zpm(i) += h; zpm(j) -= h;
        zmp(i) -= h; zmp(j) += h;
        zmm(i) -= h; zmm(j) -= h;
        hess(i, j) = (potential(zpp) - potential(zpm) - potential(zmp) +
                      potential(zmm)) / (4.0 * h * h);
      }
    Mat j0 = standard_J(4);
    Mat g_fd = 0.5 * (hess + j0.transpose() * hess * j0);
    CHECK((fs.metric - g_fd).norm() < 1e-5);
    // compatibility: theta(u,v) = g(I0 u, v)
    CHECK((fs.theta - j0.transpose() * fs.metric).norm() < 1e-12);
  }
}

TEST_CASE("Fubini-Study two-sided bounds on the chart") {
  Rng rng(17);
  for (int t = 0; t < 1000; ++t) {
    Vec z(4);
    for (int i = 0; i < 4; ++i) z(i) = rng.normal();
    z *= rng.uniform() / z.norm();  // |Z| < 1
    auto fs = fubini_study(ProjectiveChartPoint{z, 0.1});
    Eigen::SelfAdjointEigenSolver<Mat> lo(Mat(fs.metric - 0.25 * Mat::Identity(4, 4)));
    Eigen::SelfAdjointEigenSolver<Mat> hi(Mat(4.0 * Mat::Identity(4, 4) - fs.metric));
    CHECK(lo.eigenvalues().minCoeff() >= -1e-12);
    CHECK(hi.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("theta_CP compatibility at random chart points") {
  Rng rng(23);
  for (int t = 0; t < 10; ++t) {
    Vec z(4);
    for (int i = 0; i < 4; ++i) z(i) = rng.uniform(-0.7, 0.7);
    auto fs = fubini_study(ProjectiveChartPoint{z, 0.1});
    Mat j0 = standard_J(4);
    for (int s = 0; s < 5; ++s) {
      Vec u(4), v(4);
      for (int i = 0; i < 4; ++i) { u(i) = rng.normal(); v(i) = rng.normal(); }
      double lhs = u.dot(fs.theta * v);
      double rhs = (j0 * u).dot(fs.metric * v);
      CHECK(lhs == Catch::Approx(rhs).margin(1e-9));
    }
  }
}

TEST_CASE("Hopf projection basics") {
  Vec e(4);
  e << 1.0, 0.0, 0.0, 0.0;
  auto p = hopf_project(e);
  CHECK(p.Z.norm() == Catch::Approx(0.0).margin(1e-15));

  // scale invariance: (2i, 2i w) -> w
  Vec x(4);
  x << 0.0, 2.0, -0.6, 0.8;  // z0 = 2i, z1 = -0.3*2i* ... direct check below
  auto pw = hopf_project(x);
  // z1/z0 = (-0.6 + 0.8i)/(2i) = (0.4 + 0.3i)
  CHECK(pw.Z(0) == Catch::Approx(0.4).margin(1e-15));
  CHECK(pw.Z(1) == Catch::Approx(0.3).margin(1e-15));

  Vec bad(4);
  bad << 0.0, 0.0, 1.0, 0.0;
  CHECK_THROWS_AS(hopf_project(bad), OutOfChartError);
  CHECK_THROWS_AS(hopf_project(Vec(Vec::Zero(4))), UndefinedPointError);
}

TEST_CASE("constant-direction sequences accumulate at one chart point") {
  // x_m = (t_m, 0.1 t_m) with t_m -> 0 all map to Z = 0.1.
  for (double t : {1.0, 0.1, 1e-3, 1e-8, 1e-200}) {
    Vec x(4);
    x << t, 0.0, 0.1 * t, 0.0;
    auto p = hopf_project(x);
    CHECK(p.Z(0) == Catch::Approx(0.1).margin(1e-14));
    CHECK(p.Z(1) == Catch::Approx(0.0).margin(1e-14));
  }
}
