#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "conelab/core/linalg.hpp"

namespace conelab::current {

/// One smooth scalar inequality phi(x) <= 0. dist, when present, returns a
/// signed estimate of the distance to the boundary {phi = 0} (negative
/// inside), used for node-quadrature clipping error bounds.
struct Constraint {
  std::function<double(const Vec&)> phi;
  std::function<double(const Vec&)> dist;  // optional
};

/// Intersection of smooth inequalities; boundaries stay smooth piecewise.
struct Region {
  std::vector<Constraint> constraints;
  std::string desc;

  bool contains(const Vec& x) const {
    for (const auto& c : constraints)
      if (c.phi(x) > 0.0) return false;
    return true;
  }

  /// Signed distance estimate to the region boundary (negative inside);
  /// +inf when no constraint supplies one.
  double boundary_distance(const Vec& x) const {
    double d = -std::numeric_limits<double>::infinity();
    bool have = false;
    for (const auto& c : constraints) {
      if (!c.dist) continue;
      have = true;
      d = std::max(d, c.dist(x));
    }
    return have ? d : std::numeric_limits<double>::infinity();
  }

  Region intersect(const Region& o) const {
    Region r = *this;
    r.constraints.insert(r.constraints.end(), o.constraints.begin(),
                         o.constraints.end());
    r.desc = desc + " & " + o.desc;
    return r;
  }
};

/// Euclidean ball |x - c| <= r.
inline Region ball(const Vec& center, double r) {
  Region reg;
  reg.desc = "ball(r=" + std::to_string(r) + ")";
  reg.constraints.push_back(
      {[center, r](const Vec& x) { return (x - center).squaredNorm() - r * r; },
       [center, r](const Vec& x) { return (x - center).norm() - r; }});
  return reg;
}

/// Ball in the metric g0 at the center: (x-c)^T G (x-c) <= r^2.
inline Region metric_ball(const Vec& center, double r, const Mat& g) {
  Region reg;
  reg.desc = "metric_ball(r=" + std::to_string(r) + ")";
  reg.constraints.push_back(
      {[center, r, g](const Vec& x) {
         Vec d = x - center;
         return d.dot(g * d) - r * r;
       },
       [center, r, g](const Vec& x) {
         Vec d = x - center;
         return std::sqrt(std::max(0.0, d.dot(g * d))) - r;
       }});
  return reg;
}

/// Annulus s <= |x - c| <= r.
inline Region annulus(const Vec& center, double s, double r) {
  Region reg = ball(center, r);
  reg.desc = "annulus(" + std::to_string(s) + "," + std::to_string(r) + ")";
  reg.constraints.push_back(
      {[center, s](const Vec& x) { return s * s - (x - center).squaredNorm(); },
       [center, s](const Vec& x) { return s - (x - center).norm(); }});
  return reg;
}

/// Complement of a ball: |x - c| >= r.
inline Region ball_complement(const Vec& center, double r) {
  Region reg;
  reg.desc = "outside_ball(r=" + std::to_string(r) + ")";
  reg.constraints.push_back(
      {[center, r](const Vec& x) { return r * r - (x - center).squaredNorm(); },
       [center, r](const Vec& x) { return r - (x - center).norm(); }});
  return reg;
}

/// Sector of Eq. (5): |(z_1..z_n)| < (1+eps)|z_0|, inside B_{1+eps}.
/// Implemented with the squared (smooth) forms.
inline Region sector_region(int ambient_dim, double eps) {
  const double c = (1.0 + eps);
  Region reg;
  reg.desc = "sector(eps=" + std::to_string(eps) + ")";
  reg.constraints.push_back({[ambient_dim, c](const Vec& x) {
    double head = x(0) * x(0) + x(1) * x(1);
    double tail = x.tail(ambient_dim - 2).squaredNorm();
    return tail - c * c * head;
  }, nullptr});
  reg.constraints.push_back(
      {[c](const Vec& x) { return x.squaredNorm() - c * c; },
       [c](const Vec& x) { return x.norm() - c; }});
  return reg;
}

/// Cone over a chart box: the set of z with Z(z) = z_tail/z0 inside the
/// rectangle [lo, hi] (componentwise, real chart coordinates). Each face
/// is the smooth inequality Re/Im(z_j conj(z_0)) <= c |z0|^2.
inline Region cone_over_chart_box(int ambient_dim, const Vec& lo, const Vec& hi) {
  Region reg;
  reg.desc = "chart_box";
  const int n2 = ambient_dim - 2;  // 2n real chart coordinates
  for (int k = 0; k < n2; ++k) {
    // chart coordinate k belongs to complex component j = k/2 + 1;
    // real part if k even, imaginary if odd.
    int j = k / 2 + 1;
    bool re = (k % 2 == 0);
    auto coord = [j, re](const Vec& x) {
      double a = x(2 * j), b = x(2 * j + 1);   // z_j
      double c0 = x(0), d0 = x(1);            // z_0
      // z_j / z_0 = (a + ib)(c0 - id0)/|z0|^2
      return re ? (a * c0 + b * d0) : (b * c0 - a * d0);
    };
    double l = lo(k), h = hi(k);
    reg.constraints.push_back({[coord, h](const Vec& x) {
      double z0sq = x(0) * x(0) + x(1) * x(1);
      return coord(x) - h * z0sq;
    }, nullptr});
    reg.constraints.push_back({[coord, l](const Vec& x) {
      double z0sq = x(0) * x(0) + x(1) * x(1);
      return l * z0sq - coord(x);
    }, nullptr});
  }
  return reg;
}

}  // namespace conelab::current
