#pragma once

#include "conelab/current/pushforward.hpp"
#include "conelab/current/restrict.hpp"

namespace conelab::blowup {

using chart::CompatibleTriple;
using current::PatchCurrent;
using current::RestrictOptions;

struct DilationResult {
  PatchCurrent current;       // ((x - x0)/r)_* (T |_ B_r(x0))
  CompatibleTriple triple;    // rescaled (J_{x0,r}, omega_{x0,r}, g_{x0,r})
  double clip_error = 0.0;
};

/// Rescaled triple of Eq. (3): the structures sampled at x0 + r x. The
/// sector Lipschitz budget rescales as Q r (and L r for g, omega).
inline CompatibleTriple rescale_triple(const CompatibleTriple& t, const Vec& x0,
                                       double r) {
  CompatibleTriple out = t;
  auto J = t.J;
  auto g = t.g;
  chart::TwoForm om = t.omega;
  out.J = [J, x0, r](const Vec& x) { return J(Vec(x0 + r * x)); };
  out.g = [g, x0, r](const Vec& x) { return g(Vec(x0 + r * x)); };
  out.omega = chart::TwoForm(
      [om, x0, r](const Vec& x) { return om.matrix(Vec(x0 + r * x)); },
      t.ambient_dim);
  out.lipschitz_Q = t.lipschitz_Q * r;
  out.lipschitz_L = t.lipschitz_L * r;
  return out;
}

/// Dilation blow-up step: push T |_ B_r(x0) forward under (x - x0)/r and
/// rescale the structures. The ball is taken with respect to g at x0.
/// M(dilated |_ B_1) = M(T |_ B_r(x0)) / r^2 holds with the masses taken
/// for the rescaled and original metrics respectively.
inline DilationResult dilate(const PatchCurrent& T, const Vec& x0, double r,
                             const CompatibleTriple& triple,
                             RestrictOptions opt = {}) {
  if (!(r > 0.0)) throw std::domain_error("dilate: scale must be positive");
  opt.open_domain = true;
  auto restricted = current::restrict_current(
      T, current::metric_ball(x0, r, triple.g_at(x0)), opt);
  DilationResult out;
  const int m = T.ambient_dim;
  out.current = current::pushforward_affine_exact(
      restricted.current, Mat(Mat::Identity(m, m) / r), Vec(-x0 / r));
  out.triple = rescale_triple(triple, x0, r);
  out.clip_error = restricted.error_bound;
  return out;
}

}  // namespace conelab::blowup
