#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "conelab/current/patch_current.hpp"

namespace conelab::current {

struct DegenerateSliceError : std::runtime_error {
  DegenerateSliceError(const std::string& what, int patch)
      : std::runtime_error(what), patch_index(patch) {}
  int patch_index = -1;
};

/// Oriented parameter-space segment of a slice curve on one patch.
struct SliceSegment {
  Surface surf;
  double weight = 1.0;
  int orientation = 1;
  std::function<double(double, double)> density;
  Eigen::Vector2d a, b;  // (s,t) endpoints, oriented with {phi<0} on the left
  int patch_index = 0;
};

/// The 1-current cut from T by a sphere: a weighted curve family with a
/// mass estimate. Satisfies <T,|z|=r> = d(T |_ B_r) - (dT) |_ B_r as an
/// action identity on test 1-forms at regular radii.
struct SphereSlice {
  std::vector<SliceSegment> segments;
  double mass = 0.0;

  double action(const OneForm& alpha, int q1d = 8) const {
    const GaussRule& rule = gauss_rule(q1d);
    double total = 0.0;
    for (const auto& seg : segments) {
      Eigen::Vector2d d = seg.b - seg.a;
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double u = rule.nodes[i];
        double s = seg.a(0) + d(0) * u, t = seg.a(1) + d(1) * u;
        Vec tangent = d(0) * seg.surf.du(s, t) + d(1) * seg.surf.dv(s, t);
        double rho = seg.density ? seg.density(s, t) : 1.0;
        acc += rule.weights[i] * rho * alpha(seg.surf.value(s, t), tangent);
      }
      total += seg.weight * seg.orientation * acc;
    }
    return total;
  }
};

namespace detail {

/// Root of phi along the straight parameter segment a->b by bisection,
/// assuming a sign change.
inline double edge_root(const std::function<double(double, double)>& phi,
                        Eigen::Vector2d a, Eigen::Vector2d b) {
  double fa = phi(a(0), a(1));
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    Eigen::Vector2d p = a + mid * (b - a);
    double fm = phi(p(0), p(1));
    if ((fm > 0) == (fa > 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Slice of T with the sphere |x - center| = r (metric given by g0 at the
/// center; pass identity for euclidean spheres). Crossing curves are
/// extracted per patch by marching squares on the cell grid with bisection
/// refinement; tangencies raise DegenerateSliceError with the patch index.
/// Node-backed parts do not slice.
inline SphereSlice slice_sphere(const PatchCurrent& T, const CompatibleTriple& triple,
                                const Vec& center, double r,
                                int grid = 96, double tangency_tol = 1e-7) {
  if (!T.groups.empty())
    throw std::runtime_error(
        "slice_sphere: node-backed current parts do not support slicing");
  SphereSlice out;
  for (std::size_t pi = 0; pi < T.patches.size(); ++pi) {
    const Patch& p = T.patches[pi];
    // near-zero values are snapped to a consistent positive sign so level
    // sets landing exactly on grid nodes are counted once
    const double snap = 1e-12 * r * r;
    auto phi = [&, snap](double s, double t) {
      double v = (p.surf.value(s, t) - center).squaredNorm() - r * r;
      return std::abs(v) < snap ? snap : v;
    };
    for (const Cell& cell : p.effective_cells()) {
      int ns = std::max(2, static_cast<int>(std::ceil(grid * (cell.s1 - cell.s0))));
      int nt = std::max(2, static_cast<int>(std::ceil(grid * (cell.t1 - cell.t0))));
      double hs = (cell.s1 - cell.s0) / ns, ht = (cell.t1 - cell.t0) / nt;
      // cache one row of phi values
      std::vector<double> row0(nt + 1), row1(nt + 1);
      for (int j = 0; j <= nt; ++j)
        row0[j] = phi(cell.s0, cell.t0 + ht * j);
      for (int i = 0; i < ns; ++i) {
        double s_lo = cell.s0 + hs * i, s_hi = s_lo + hs;
        for (int j = 0; j <= nt; ++j) row1[j] = phi(s_hi, cell.t0 + ht * j);
        for (int j = 0; j < nt; ++j) {
          double t_lo = cell.t0 + ht * j, t_hi = t_lo + ht;
          std::array<double, 4> f = {row0[j], row1[j], row1[j + 1], row0[j + 1]};
          std::array<Eigen::Vector2d, 4> corner = {
              Eigen::Vector2d(s_lo, t_lo), Eigen::Vector2d(s_hi, t_lo),
              Eigen::Vector2d(s_hi, t_hi), Eigen::Vector2d(s_lo, t_hi)};
          int mask = 0;
          for (int k = 0; k < 4; ++k)
            if (f[k] < 0.0) mask |= (1 << k);
          if (mask == 0 || mask == 15) continue;
          // collect edge crossings
          std::vector<Eigen::Vector2d> cross;
          for (int k = 0; k < 4; ++k) {
            int k2 = (k + 1) % 4;
            if ((f[k] < 0.0) != (f[k2] < 0.0)) {
              double u = detail::edge_root(phi, corner[k], corner[k2]);
              cross.push_back(corner[k] + u * (corner[k2] - corner[k]));
            }
          }
          auto emit = [&](Eigen::Vector2d a, Eigen::Vector2d b) {
            // orient with the {phi<0} side on the left: the tangent tau
            // must satisfy det[grad phi, tau] > 0.
            Eigen::Vector2d mid = 0.5 * (a + b);
            double eps = 1e-6;
            Eigen::Vector2d grad(
                (phi(mid(0) + eps, mid(1)) - phi(mid(0) - eps, mid(1))) / (2 * eps),
                (phi(mid(0), mid(1) + eps) - phi(mid(0), mid(1) - eps)) / (2 * eps));
            // degenerate slice: vanishing surface gradient at a crossing
            Vec du = p.surf.du(mid(0), mid(1)), dv = p.surf.dv(mid(0), mid(1));
            double scale = (p.surf.value(mid(0), mid(1)) - center).norm() *
                               (du.norm() + dv.norm()) + 1e-30;
            if (grad.norm() < tangency_tol * scale)
              throw DegenerateSliceError(
                  "slice_sphere: tangency at r=" + std::to_string(r), (int)pi);
            Eigen::Vector2d tau = b - a;
            if (grad(0) * tau(1) - grad(1) * tau(0) < 0.0) std::swap(a, b);
            SliceSegment seg;
            seg.surf = p.surf;
            seg.weight = p.weight;
            seg.orientation = p.orientation;
            seg.density = p.density;
            seg.a = a;
            seg.b = b;
            seg.patch_index = static_cast<int>(pi);
            out.segments.push_back(std::move(seg));
          };
          if (cross.size() == 2) {
            emit(cross[0], cross[1]);
          } else if (cross.size() == 4) {
            // saddle: split by the center sign
            double fc = phi(0.5 * (s_lo + s_hi), 0.5 * (t_lo + t_hi));
            // pair crossings along edges sharing the sign of the center
            if ((fc < 0.0) == (f[0] < 0.0)) {
              emit(cross[0], cross[3]);
              emit(cross[2], cross[1]);
            } else {
              emit(cross[0], cross[1]);
              emit(cross[2], cross[3]);
            }
          }
        }
        std::swap(row0, row1);
      }
    }
  }
  // mass: weighted g-length of the image segments
  const GaussRule& rule = gauss_rule(4);
  double mass = 0.0;
  for (const auto& seg : out.segments) {
    Eigen::Vector2d d = seg.b - seg.a;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      double u = rule.nodes[i];
      double s = seg.a(0) + d(0) * u, t = seg.a(1) + d(1) * u;
      Vec tangent = d(0) * seg.surf.du(s, t) + d(1) * seg.surf.dv(s, t);
      Mat g = triple.g_at(seg.surf.value(s, t));
      double rho = seg.density ? seg.density(s, t) : 1.0;
      acc += rule.weights[i] * rho * std::sqrt(std::max(0.0, tangent.dot(g * tangent)));
    }
    mass += std::abs(seg.weight) * acc;
  }
  out.mass = mass;
  return out;
}

}  // namespace conelab::current
