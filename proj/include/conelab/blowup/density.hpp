#pragma once

#include <vector>

#include "conelab/blowup/dilate.hpp"

namespace conelab::blowup {

/// Density estimate as an interval, never a bare number: the almost
/// monotonicity bound only controls the profile up to C L r.
struct DensityEstimate {
  double value = 0.0;
  double uncertainty = 0.0;  // |last - previous| profile step + clip errors
  double lower() const { return value - uncertainty; }
  double upper() const { return value + uncertainty; }
};

struct ProfilePoint {
  double r = 0.0;
  double mass = 0.0;
  double ratio = 0.0;  // mass / (pi r^2)
};

struct DensityProfile {
  Vec center;
  std::vector<ProfilePoint> points;  // radii decreasing
  DensityEstimate density;
  double clip_error = 0.0;
};

/// Mass-ratio profile r -> M(T |_ B_r(x0)) / (pi r^2) over a decreasing
/// radius grid, with a Richardson-style linear extrapolation to r -> 0.
/// Positivity failures propagate (the Eq.-(1) mass identity is invalid).
inline DensityProfile density_profile(const current::PatchCurrent& T,
                                      const chart::CompatibleTriple& triple,
                                      const Vec& x0,
                                      const std::vector<double>& radii,
                                      double tol_pos = 1e-6,
                                      current::RestrictOptions opt = {}) {
  DensityProfile out;
  out.center = x0;
  Mat g0 = triple.g_at(x0);
  for (double r : radii) {
    if (!(r > 0.0)) throw std::domain_error("density_profile: radius <= 0");
    opt.open_domain = true;
    auto rr = current::restrict_current(T, current::metric_ball(x0, r, g0), opt);
    auto rep = current::positivity_check(rr.current, triple, tol_pos);
    if (!rep.passed && rep.nodes > 0)
      throw current::NotPositiveError(
          "density_profile: current not positive near the center");
    double mass = current::action(rr.current, triple.omega);
    out.points.push_back({r, mass, mass / (M_PI * r * r)});
    out.clip_error += rr.error_bound / (M_PI * r * r);
  }
  const auto& pts = out.points;
  if (pts.size() >= 2) {
    const auto& a = pts[pts.size() - 2];
    const auto& b = pts[pts.size() - 1];  // smallest radius
    double slope = (a.ratio - b.ratio) / (a.r - b.r);
    out.density.value = b.ratio - slope * b.r;
    out.density.uncertainty = std::abs(a.ratio - b.ratio) + out.clip_error;
  } else if (pts.size() == 1) {
    out.density.value = pts[0].ratio;
    out.density.uncertainty = out.clip_error;
  }
  return out;
}

}  // namespace conelab::blowup
