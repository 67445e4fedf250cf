#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conelab/chart/comass.hpp"
#include "conelab/chart/two_vector.hpp"
#include "conelab/core/rng.hpp"

namespace conelab::chart {

/// Standard complex structure J0 on R^{2k}: e_{2j} -> e_{2j+1} -> -e_{2j}.
inline Mat standard_J(int m) {
  Mat j = Mat::Zero(m, m);
  for (int k = 0; k + 1 < m; k += 2) {
    j(k + 1, k) = 1.0;
    j(k, k + 1) = -1.0;
  }
  return j;
}

/// Standard symplectic matrix: omega0(u,v) = <J0 u, v> = u^T J0^T v.
inline Mat standard_omega(int m) { return standard_J(m).transpose(); }

/// Domain descriptor for a triple: a ball, or the sector S_eps.
struct TripleDomain {
  enum class Kind { Ball, Sector } kind = Kind::Ball;
  double radius = 2.0;  // ball radius, or 1+eps for a sector
  double eps = 0.0;     // sector parameter
};

/// Chart-local compatible triple (J, omega, g). Point-dependent fields are
/// callable maps supplied with closed-form coefficients by the scenario
/// generators; values are immutable after construction.
struct CompatibleTriple {
  using MatFn = std::function<Mat(const Vec&)>;

  int ambient_dim = 4;
  MatFn J;
  TwoForm omega;
  MatFn g;
  double lipschitz_Q = 0.0;  // sector bound |J - J0| <= Q r
  double lipschitz_L = 0.0;  // Lipschitz constant of (g, omega)
  TripleDomain domain;

  Mat J_at(const Vec& x) const { return J(x); }
  Mat g_at(const Vec& x) const { return g(x); }
  Mat omega_at(const Vec& x) const { return omega.matrix(x); }
};

/// The flat triple (J0, omega0, g0) on R^m.
inline CompatibleTriple standard_triple(int m) {
  CompatibleTriple t;
  t.ambient_dim = m;
  Mat j0 = standard_J(m);
  Mat om = standard_omega(m);
  Mat id = Mat::Identity(m, m);
  t.J = [j0](const Vec&) { return j0; };
  t.g = [id](const Vec&) { return id; };
  t.omega = TwoForm::constant(om);
  t.lipschitz_Q = 0.0;
  t.lipschitz_L = 0.0;
  return t;
}

/// Build the compatible (omega, g) pair from a point-dependent J by
/// averaging the flat metric: g = (h + h(J.,J.))/2, omega = g(J.,.).
/// The resulting omega has unit comass for g, and J-invariant planes are
/// exactly the calibrated ones.
inline CompatibleTriple triple_from_J(int m, CompatibleTriple::MatFn J,
                                      double lipschitz_Q, double lipschitz_L,
                                      TripleDomain domain = {}) {
  CompatibleTriple t;
  t.ambient_dim = m;
  t.J = J;
  auto gfn = [J](const Vec& x) {
    Mat j = J(x);
    Mat g = 0.5 * (Mat::Identity(j.rows(), j.cols()) + j.transpose() * j);
    return Mat(0.5 * (g + g.transpose()));
  };
  t.g = gfn;
  t.omega = TwoForm([J, gfn](const Vec& x) {
    Mat j = J(x);
    Mat g = gfn(x);
    // omega(u,v) = g(Ju, v) => matrix J^T G
    return Mat(j.transpose() * g);
  }, m);
  t.lipschitz_Q = lipschitz_Q;
  t.lipschitz_L = lipschitz_L;
  t.domain = domain;
  return t;
}

struct TripleVerification {
  bool passed = true;
  double max_J_square_residual = 0.0;   // |J^2 + I|
  double max_compat_residual = 0.0;     // |g(u,v) - omega(u, Jv)|
  double max_comass_deviation = 0.0;    // |comass_g(omega) - 1|
  double max_sector_ratio = 0.0;        // sup |J - J0| / (Q r) on a sector
  std::string failure;
};

/// Sampled verification of the CompatibleTriple invariants. Sample points
/// are drawn inside the domain with the given seed.
inline TripleVerification verify_triple(const CompatibleTriple& t,
                                        int n_samples = 64,
                                        double tol = 1e-8,
                                        std::uint64_t seed = 2024) {
  TripleVerification rep;
  const int m = t.ambient_dim;
  Rng rng(seed);
  Mat j0 = standard_J(m);
  for (int s = 0; s < n_samples; ++s) {
    Vec x(m);
    for (int i = 0; i < m; ++i) x(i) = rng.uniform(-1.0, 1.0);
    double r = t.domain.radius > 0 ? t.domain.radius : 1.0;
    x *= 0.9 * r * rng.uniform() / std::max(1.0, x.norm());
    if (t.domain.kind == TripleDomain::Kind::Sector) {
      // fold into the sector: make |tail| < (1+eps)|head|
      double head = std::sqrt(x(0) * x(0) + x(1) * x(1));
      double tail = x.size() > 2 ? x.tail(m - 2).norm() : 0.0;
      if (tail >= (1.0 + t.domain.eps) * head) {
        if (head < 1e-12) { x(0) = 0.5 * r; head = 0.5 * r; }
        x.tail(m - 2) *= 0.5 * (1.0 + t.domain.eps) * head /
                         std::max(tail, 1e-300);
      }
    }
    Mat j = t.J_at(x);
    Mat g = t.g_at(x);
    Mat om = t.omega_at(x);
    rep.max_J_square_residual = std::max(
        rep.max_J_square_residual,
        (j * j + Mat::Identity(m, m)).norm());
    // g(u,v) = omega(u, Jv): matrices G vs (Omega J) ... omega(u,Jv) = u^T Om J v
    rep.max_compat_residual = std::max(
        rep.max_compat_residual, (g - om * j).norm());
    rep.max_comass_deviation = std::max(
        rep.max_comass_deviation, std::abs(comass(om, g) - 1.0));
    if (t.domain.kind == TripleDomain::Kind::Sector && t.lipschitz_Q > 0) {
      double rr = x.norm();
      if (rr > 1e-9) {
        double ratio = op_norm(j - j0) / (t.lipschitz_Q * rr);
        rep.max_sector_ratio = std::max(rep.max_sector_ratio, ratio);
      }
    }
  }
  if (rep.max_J_square_residual > tol) {
    rep.passed = false;
    rep.failure = "J*J != -I";
  } else if (rep.max_compat_residual > tol) {
    rep.passed = false;
    rep.failure = "g != omega(., J.)";
  } else if (rep.max_comass_deviation > 1e-6) {
    rep.passed = false;
    rep.failure = "comass(omega) != 1";
  } else if (t.domain.kind == TripleDomain::Kind::Sector &&
             t.lipschitz_Q > 0 && rep.max_sector_ratio > 1.0 + 1e-6) {
    rep.passed = false;
    rep.failure = "|J - J0| > Q r on sector";
  }
  return rep;
}

}  // namespace conelab::chart
