#pragma once

#include <limits>
#include <string>
#include <vector>

#include "conelab/chart/comass.hpp"
#include "conelab/core/gauss.hpp"
#include "conelab/current/patch.hpp"
#include "conelab/current/region.hpp"

namespace conelab::current {

using chart::CompatibleTriple;
using chart::OneForm;
using chart::TwoForm;
using chart::TwoVector;

/// Quadrature node of a density-backed current part: a point, the local
/// (mass-scaled) tangent 2-vector, and the cell weight of the node. This is
/// the representation-by-integration pair (||C||, C_vec) discretized.
struct DensityNode {
  Vec point;
  Vec xi;  // pair coefficients, scaled by the local density
  double weight = 0.0;
};

struct NodeSpec {
  std::string generator;  // "potential_ddc", "contact_sphere", ...
  std::vector<double> params;
};

struct NodeGroup {
  std::vector<DensityNode> nodes;
  NodeSpec spec;
  double cell_diameter = 0.0;  // spatial resolution hint for clip errors
};

struct NotPositiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A 2-current as a finite weighted family of parametrized patches plus
/// optional quadrature-node parts. Values are immutable in use: operations
/// return new currents.
struct PatchCurrent {
  int ambient_dim = 4;
  std::vector<Patch> patches;
  std::vector<NodeGroup> groups;
  int quad_order = 16;
  bool cycle_flag = false;
  double clip_error = 0.0;  // accumulated restriction error bound

  bool has_nodes() const { return !groups.empty(); }
};

namespace detail {

template <class F>
void for_each_quad_node(const Patch& p, int q, F&& f) {
  const GaussRule& rule = gauss_rule(q);
  for (const Cell& c : p.effective_cells()) {
    const double ds = c.s1 - c.s0, dt = c.t1 - c.t0;
    const double jac = ds * dt;
    if (jac <= 0.0) continue;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        double s = c.s0 + ds * rule.nodes[i];
        double t = c.t0 + dt * rule.nodes[j];
        f(s, t, rule.weights[i] * rule.weights[j] * jac);
      }
  }
}

}  // namespace detail

/// Action of the current on a 2-form: sum over patches of
/// weight * int beta(d1 p, d2 p) rho ds dt by tensor Gauss quadrature,
/// plus the node-part pairings. Deterministic for fixed (T, beta, q).
inline double action(const PatchCurrent& T, const TwoForm& beta) {
  double total = 0.0;
  for (const Patch& p : T.patches) {
    double acc = 0.0;
    detail::for_each_quad_node(p, T.quad_order, [&](double s, double t, double w) {
      Vec x = p.surf.value(s, t);
      Vec a = p.surf.du(s, t);
      Vec b = p.surf.dv(s, t);
      acc += w * p.density_at(s, t) * beta(x, a, b);
    });
    total += p.weight * p.orientation * acc;
  }
  for (const NodeGroup& g : T.groups)
    for (const DensityNode& nd : g.nodes)
      total += nd.weight * TwoVector(nd.xi, T.ambient_dim).pair_with(
                               beta.matrix(nd.point));
  return total;
}

/// Boundary action (dC)(alpha) := C(d alpha); requires a closed-form
/// exterior derivative on alpha (or supply d alpha directly as a TwoForm).
inline double boundary_action(const PatchCurrent& T, const OneForm& alpha) {
  return action(T, alpha.exterior_derivative());
}

inline double boundary_action(const PatchCurrent& T, const TwoForm& dalpha) {
  return action(T, dalpha);
}

/// Line-integral route for the boundary action: the weighted sum of
/// oriented cell-boundary loop integrals of alpha. Interior cell edges
/// cancel pairwise, leaving the patch (restriction) boundary. Exact
/// cross-check of the d-alpha route for density-free patches.
inline double boundary_line_integral(const PatchCurrent& T, const OneForm& alpha,
                                     int q1d = 32) {
  double total = 0.0;
  const GaussRule& rule = gauss_rule(q1d);
  for (const Patch& p : T.patches) {
    if (p.density)
      throw std::runtime_error(
          "boundary_line_integral: density patches are not Stokes loops");
    double acc = 0.0;
    auto edge = [&](double sa, double ta, double sb, double tb) {
      // straight parameter segment (sa,ta) -> (sb,tb)
      double val = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double u = rule.nodes[i];
        double s = sa + (sb - sa) * u, t = ta + (tb - ta) * u;
        Vec x = p.surf.value(s, t);
        Vec tangent = (sb - sa) * p.surf.du(s, t) + (tb - ta) * p.surf.dv(s, t);
        val += rule.weights[i] * alpha(x, tangent);
      }
      acc += val;
    };
    for (const Cell& c : p.effective_cells()) {
      edge(c.s0, c.t0, c.s1, c.t0);
      edge(c.s1, c.t0, c.s1, c.t1);
      edge(c.s1, c.t1, c.s0, c.t1);
      edge(c.s0, c.t1, c.s0, c.t0);
    }
    total += p.weight * p.orientation * acc;
  }
  if (!T.groups.empty())
    throw std::runtime_error(
        "boundary_line_integral: node-backed parts have no boundary loops");
  return total;
}

/// Positivity report: distribution of <omega, unit tangent> over the mass
/// quadrature nodes. Passes iff min >= 1 - tol.
struct PositivityReport {
  double min_pairing = std::numeric_limits<double>::infinity();
  double mean_pairing = 0.0;
  double mass_checked = 0.0;
  long nodes = 0;
  bool passed = false;
  double tol = 1e-6;
};

inline PositivityReport positivity_check(const PatchCurrent& T,
                                         const CompatibleTriple& triple,
                                         double tol = 1e-6) {
  PositivityReport rep;
  rep.tol = tol;
  double weighted_sum = 0.0;
  for (const Patch& p : T.patches) {
    detail::for_each_quad_node(p, T.quad_order, [&](double s, double t, double w) {
      Vec x = p.surf.value(s, t);
      Vec a = p.surf.du(s, t);
      Vec b = p.surf.dv(s, t);
      Mat g = triple.g_at(x);
      double gaa = a.dot(g * a), gbb = b.dot(g * b), gab = a.dot(g * b);
      double area = std::sqrt(std::max(0.0, gaa * gbb - gab * gab));
      if (area < 1e-300) return;
      TwoVector xi = TwoVector::wedge(a, b) * (p.orientation / area);
      double val = xi.pair_with(triple.omega_at(x));
      double mass = std::abs(p.weight) * p.density_at(s, t) * area * w;
      rep.min_pairing = std::min(rep.min_pairing, val);
      weighted_sum += val * mass;
      rep.mass_checked += mass;
      ++rep.nodes;
    });
  }
  for (const NodeGroup& g : T.groups) {
    for (const DensityNode& nd : g.nodes) {
      TwoVector xi(nd.xi, T.ambient_dim);
      double mn = chart::mass_norm(xi, triple.g_at(nd.point));
      if (mn < 1e-300) continue;
      double val = xi.pair_with(triple.omega_at(nd.point)) / mn;
      double mass = std::abs(nd.weight) * mn;
      rep.min_pairing = std::min(rep.min_pairing, val);
      weighted_sum += val * mass;
      rep.mass_checked += mass;
      ++rep.nodes;
    }
  }
  rep.mean_pairing = rep.mass_checked > 0 ? weighted_sum / rep.mass_checked : 0.0;
  if (rep.nodes == 0) {
    rep.min_pairing = 1.0;
    rep.mean_pairing = 1.0;
  }
  rep.passed = rep.min_pairing >= 1.0 - tol;
  return rep;
}

/// Total unweighted mass upper bound sum_p |w_p| area_g(p): used in the
/// mass-comass duality bound.
inline double mass_upper_bound(const PatchCurrent& T, const CompatibleTriple& triple) {
  double total = 0.0;
  for (const Patch& p : T.patches) {
    double acc = 0.0;
    detail::for_each_quad_node(p, T.quad_order, [&](double s, double t, double w) {
      Vec x = p.surf.value(s, t);
      Vec a = p.surf.du(s, t);
      Vec b = p.surf.dv(s, t);
      Mat g = triple.g_at(x);
      double gaa = a.dot(g * a), gbb = b.dot(g * b), gab = a.dot(g * b);
      acc += w * p.density_at(s, t) *
             std::sqrt(std::max(0.0, gaa * gbb - gab * gab));
    });
    total += std::abs(p.weight) * acc;
  }
  for (const NodeGroup& g : T.groups)
    for (const DensityNode& nd : g.nodes)
      total += std::abs(nd.weight) *
               chart::mass_norm(TwoVector(nd.xi, T.ambient_dim),
                                triple.g_at(nd.point));
  return total;
}

}  // namespace conelab::current
