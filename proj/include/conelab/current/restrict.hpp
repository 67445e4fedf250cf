#pragma once

#include <vector>

#include "conelab/current/patch_current.hpp"

namespace conelab::current {

struct RestrictOptions {
  int max_depth = 12;        // per-axis dyadic depth of the subdivision
  bool open_domain = false;  // view the result as boundaryless in the open
                             // region (Remark 3.4 alternative); keeps the
                             // cycle flag instead of clearing it
};

struct RestrictResult {
  PatchCurrent current;
  double error_bound = 0.0;     // leftover straddle-cell mass bound
  bool depth_limited = false;   // some cells hit the depth limit
};

namespace detail {

enum class CellClass { Inside, Outside, Straddle };

/// Classify a cell by a probe grid. "Inside" means every constraint is
/// <= 0 at every probe; "Outside" means some single constraint is >= 0 at
/// every probe. Boundary-aligned cells classify exactly. The probe count
/// grows along the long axis of stretched cells so thin-wide cells are not
/// misjudged between probes.
inline CellClass classify_cell(const Patch& p, const Cell& c, const Region& r) {
  const double ws = c.s1 - c.s0, wt = c.t1 - c.t0;
  auto probes_for = [](double ratio) {
    int n = 3;
    while (ratio > 2.0 && n < 33) {
      n += 2;
      ratio *= 0.5;
    }
    return n;
  };
  const int ns = probes_for(wt > 0 ? ws / wt : 1.0);
  const int nt = probes_for(ws > 0 ? wt / ws : 1.0);
  std::vector<Vec> pts;
  pts.reserve(ns * nt);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j)
      pts.push_back(p.surf.value(c.s0 + ws * i / (ns - 1.0),
                                 c.t0 + wt * j / (nt - 1.0)));
  bool all_inside = true;
  for (const auto& con : r.constraints) {
    bool con_all_out = true;
    for (const Vec& x : pts) {
      double v = con.phi(x);
      if (v > 0.0) all_inside = false;
      if (v < 0.0) con_all_out = false;
    }
    if (con_all_out) return CellClass::Outside;
  }
  return all_inside ? CellClass::Inside : CellClass::Straddle;
}

inline double cell_mass_estimate(const Patch& p, const Cell& c) {
  double s = 0.5 * (c.s0 + c.s1), t = 0.5 * (c.t0 + c.t1);
  Vec a = p.surf.du(s, t);
  Vec b = p.surf.dv(s, t);
  double area = std::sqrt(std::max(
      0.0, a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2)));
  return std::abs(p.weight) * p.density_at(s, t) * area * c.area();
}

/// Adaptive binary subdivision of one straddling cell. The split axis is
/// chosen to minimize the number of straddling children, so boundaries
/// aligned with a parameter line resolve with one cell per level.
struct CellSplitter {
  const Patch& patch;
  const Region& region;
  int max_depth;
  std::vector<Cell>* kept;
  double error_bound = 0.0;
  bool depth_limited = false;

  void handle(const Cell& c, CellClass cls, int sd, int td) {
    if (cls == CellClass::Outside) return;
    if (cls == CellClass::Inside) {
      kept->push_back(c);
      return;
    }
    const bool s_ok = sd < max_depth, t_ok = td < max_depth;
    if (!s_ok && !t_ok) {
      depth_limited = true;
      error_bound += cell_mass_estimate(patch, c);
      Vec center = patch.surf.value(0.5 * (c.s0 + c.s1), 0.5 * (c.t0 + c.t1));
      if (region.contains(center)) kept->push_back(c);
      return;
    }
    double sm = 0.5 * (c.s0 + c.s1), tm = 0.5 * (c.t0 + c.t1);
    Cell sa{c.s0, sm, c.t0, c.t1}, sb{sm, c.s1, c.t0, c.t1};
    Cell ta{c.s0, c.s1, c.t0, tm}, tb{c.s0, c.s1, tm, c.t1};
    int s_straddle = 2, t_straddle = 2;
    CellClass csa{}, csb{}, cta{}, ctb{};
    if (s_ok) {
      csa = classify_cell(patch, sa, region);
      csb = classify_cell(patch, sb, region);
      s_straddle = (csa == CellClass::Straddle) + (csb == CellClass::Straddle);
    }
    if (t_ok) {
      cta = classify_cell(patch, ta, region);
      ctb = classify_cell(patch, tb, region);
      t_straddle = (cta == CellClass::Straddle) + (ctb == CellClass::Straddle);
    }
    bool split_s;
    if (!s_ok) split_s = false;
    else if (!t_ok) split_s = true;
    else if (s_straddle != t_straddle) split_s = s_straddle < t_straddle;
    else split_s = (c.s1 - c.s0) >= (c.t1 - c.t0);
    if (split_s) {
      handle(sa, csa, sd + 1, td);
      handle(sb, csb, sd + 1, td);
    } else {
      handle(ta, cta, sd, td + 1);
      handle(tb, ctb, sd, td + 1);
    }
  }
};

}  // namespace detail

/// Restriction T |_ region by adaptive dyadic subdivision of the reference
/// square; straddling cells are subdivided to the per-axis depth limit,
/// then clipped by their center point. The reported error bound sums the
/// mass estimates of the clipped cells; boundary alignment makes it zero
/// for polar patches against centered balls. Node parts are filtered by
/// their node points with a resolution-band error estimate.
inline RestrictResult restrict_current(const PatchCurrent& T, const Region& region,
                                       RestrictOptions opt = {}) {
  RestrictResult out;
  out.current = T;
  out.current.patches.clear();
  out.current.groups.clear();
  for (const Patch& p : T.patches) {
    Patch q = p;
    q.cells.clear();
    detail::CellSplitter splitter{p, region, opt.max_depth, &q.cells};
    for (const Cell& c : p.effective_cells())
      splitter.handle(c, detail::classify_cell(p, c, region), 0, 0);
    out.error_bound += splitter.error_bound;
    out.depth_limited = out.depth_limited || splitter.depth_limited;
    if (!q.cells.empty()) out.current.patches.push_back(std::move(q));
  }
  for (const NodeGroup& g : T.groups) {
    NodeGroup ng;
    ng.spec = g.spec;
    ng.cell_diameter = g.cell_diameter;
    for (const DensityNode& nd : g.nodes) {
      bool in = region.contains(nd.point);
      if (g.cell_diameter > 0.0) {
        double d = region.boundary_distance(nd.point);
        if (std::abs(d) <= 0.5 * g.cell_diameter)
          out.error_bound +=
              std::abs(nd.weight) * chart::mass_norm_flat(TwoVector(
                                        nd.xi, T.ambient_dim));
      }
      if (in) ng.nodes.push_back(nd);
    }
    if (!ng.nodes.empty()) out.current.groups.push_back(std::move(ng));
  }
  out.current.clip_error = T.clip_error + out.error_bound;
  if (!opt.open_domain) out.current.cycle_flag = false;
  return out;
}

/// Mass of a positive current on a region through the Eq.-(1) identity
/// M(T |_ R) = (T |_ R)(omega). The positivity precondition is checked and
/// violations beyond tolerance are an error (the identity is invalid then).
inline double positive_mass(const PatchCurrent& T, const CompatibleTriple& triple,
                            const Region& region, double tol_pos = 1e-6,
                            RestrictOptions opt = {}) {
  opt.open_domain = true;
  RestrictResult r = restrict_current(T, region, opt);
  auto rep = positivity_check(r.current, triple, tol_pos);
  if (!rep.passed && rep.nodes > 0)
    throw NotPositiveError("positive_mass: current is not omega-positive on " +
                           region.desc + " (min pairing " +
                           std::to_string(rep.min_pairing) + ")");
  return action(r.current, triple.omega);
}

inline double positive_mass(const PatchCurrent& T, const CompatibleTriple& triple,
                            double tol_pos = 1e-6) {
  auto rep = positivity_check(T, triple, tol_pos);
  if (!rep.passed && rep.nodes > 0)
    throw NotPositiveError("positive_mass: current is not omega-positive");
  return action(T, triple.omega);
}

}  // namespace conelab::current
