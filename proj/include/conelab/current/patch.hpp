#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conelab/chart/projective.hpp"
#include "conelab/chart/triple.hpp"
#include "conelab/polar/perturbation.hpp"

namespace conelab::current {

/// Smooth map [0,1]^2 -> R^m with closed-form partial derivatives.
struct Surface {
  std::function<Vec(double, double)> value;
  std::function<Vec(double, double)> du;
  std::function<Vec(double, double)> dv;
};

/// Diffeomorphism with closed-form differential, used for push-forwards
/// and for composition onto patch parametrizations.
struct DiffMap {
  int dom_dim = 0;
  int codom_dim = 0;
  std::function<Vec(const Vec&)> value;
  std::function<Mat(const Vec&)> jacobian;
  std::string name;              // registry key; empty = not serializable
  std::vector<double> params;
};

inline Surface compose(const DiffMap& f, const Surface& s) {
  auto val = s.value;
  auto du = s.du;
  auto dv = s.dv;
  auto fv = f.value;
  auto fj = f.jacobian;
  Surface out;
  out.value = [fv, val](double a, double b) { return fv(val(a, b)); };
  out.du = [fj, val, du](double a, double b) {
    return Vec(fj(val(a, b)) * du(a, b));
  };
  out.dv = [fj, val, dv](double a, double b) {
    return Vec(fj(val(a, b)) * dv(a, b));
  };
  return out;
}

/// Axis-aligned sub-rectangle of the reference square.
struct Cell {
  double s0 = 0.0, s1 = 1.0, t0 = 0.0, t1 = 1.0;
  double area() const { return (s1 - s0) * (t1 - t0); }
};

struct MapSpec {
  std::string name;
  std::vector<double> params;
};

/// Serialization record: named base template + numeric parameters +
/// transform stack. Base "" marks an ad-hoc patch that cannot round-trip.
struct PatchSpec {
  std::string base;
  std::vector<double> params;
  std::vector<MapSpec> stack;
};

/// Oriented weighted parametrized patch over [0,1]^2; restriction state is
/// carried by the cell list (empty list = the whole square).
struct Patch {
  Surface surf;
  double weight = 1.0;
  int orientation = 1;
  std::vector<Cell> cells;
  std::function<double(double, double)> density;  // optional node factor
  PatchSpec spec;

  const std::vector<Cell>& effective_cells() const {
    static const std::vector<Cell> whole{Cell{}};
    return cells.empty() ? whole : cells;
  }
  double density_at(double s, double t) const {
    return density ? density(s, t) : 1.0;
  }
};

// ---------------------------------------------------------------------------
// Patch template registry
// ---------------------------------------------------------------------------

/// flat_disk: polar-parametrized disk of the given radius around `center`
/// in the oriented plane (u, v): p(s,t) = center + R s (cos(2 pi t) u +
/// sin(2 pi t) v). |p - center| = R s, so euclidean balls around the center
/// restrict along cell edges exactly.
inline Surface flat_disk_surface(const Vec& center, const Vec& axis_u,
                                 const Vec& axis_v, double radius,
                                 double r_inner = 0.0) {
  Surface s;
  const double two_pi = 2.0 * M_PI;
  s.value = [=](double a, double b) {
    double r = r_inner + (radius - r_inner) * a;
    return Vec(center + r * (std::cos(two_pi * b) * axis_u +
                             std::sin(two_pi * b) * axis_v));
  };
  s.du = [=](double a, double b) {
    (void)a;
    return Vec((radius - r_inner) * (std::cos(two_pi * b) * axis_u +
                                     std::sin(two_pi * b) * axis_v));
  };
  s.dv = [=](double a, double b) {
    double r = r_inner + (radius - r_inner) * a;
    return Vec(r * two_pi * (-std::sin(two_pi * b) * axis_u +
                             std::cos(two_pi * b) * axis_v));
  };
  return s;
}

inline Patch make_flat_disk(const Vec& center, const Vec& axis_u,
                            const Vec& axis_v, double radius, double weight) {
  Patch p;
  p.surf = flat_disk_surface(center, axis_u, axis_v, radius);
  p.weight = weight;
  p.spec.base = "flat_disk";
  p.spec.params.push_back(static_cast<double>(center.size()));
  p.spec.params.push_back(radius);
  for (int i = 0; i < center.size(); ++i) p.spec.params.push_back(center(i));
  for (int i = 0; i < axis_u.size(); ++i) p.spec.params.push_back(axis_u(i));
  for (int i = 0; i < axis_v.size(); ++i) p.spec.params.push_back(axis_v(i));
  return p;
}

/// cone_ray_family: the disk D^X (radial range [r_in, r_out]) of the cone
/// direction X given in chart coordinates; axes are the complex line
/// through (1, Z) and its J0-rotation.
inline Patch make_cone_ray(const chart::ProjectiveChartPoint& X, double weight,
                           double r_out = 1.0, double r_in = 0.0) {
  Vec dir = chart::chart_direction(X);
  const int m = static_cast<int>(dir.size());
  Vec jdir = chart::standard_J(m) * dir;
  Patch p;
  p.surf = flat_disk_surface(Vec(Vec::Zero(m)), dir, jdir, r_out, r_in);
  p.weight = weight;
  p.spec.base = "cone_ray_family";
  p.spec.params.push_back(static_cast<double>((m - 2) / 2));  // n
  p.spec.params.push_back(r_in);
  p.spec.params.push_back(r_out);
  for (int i = 0; i < X.Z.size(); ++i) p.spec.params.push_back(X.Z(i));
  return p;
}

/// graph_over_disk: flat disk moved by the graph map Id + perturbation.
inline Patch make_graph_over_disk(const Vec& center, const Vec& axis_u,
                                  const Vec& axis_v, double radius,
                                  double weight,
                                  const polar::Perturbation& pert) {
  Patch p = make_flat_disk(center, axis_u, axis_v, radius, weight);
  const int m = static_cast<int>(center.size());
  DiffMap psi;
  psi.dom_dim = psi.codom_dim = m;
  psi.name = "psi";
  psi.value = [pert](const Vec& x) { return Vec(x + pert.value(x)); };
  psi.jacobian = [pert, m](const Vec& x) {
    return Mat(Mat::Identity(m, m) + pert.jacobian(x));
  };
  p.surf = compose(psi, p.surf);
  p.spec.base = "graph_over_disk";
  // params: as flat_disk, then perturbation id + magnitude
  double pid = 0.0;
  const auto& reg = polar::perturbation_registry();
  for (std::size_t i = 0; i < reg.size(); ++i)
    if (reg[i] == pert.name) pid = static_cast<double>(i);
  p.spec.params.push_back(pid);
  p.spec.params.push_back(pert.magnitude);
  return p;
}

/// Affine map x -> A x + b as a registry DiffMap.
inline DiffMap affine_map(const Mat& a, const Vec& b) {
  DiffMap f;
  f.dom_dim = static_cast<int>(a.cols());
  f.codom_dim = static_cast<int>(a.rows());
  f.value = [a, b](const Vec& x) { return Vec(a * x + b); };
  f.jacobian = [a](const Vec&) { return a; };
  f.name = "affine";
  f.params.push_back(static_cast<double>(a.rows()));
  f.params.push_back(static_cast<double>(a.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) f.params.push_back(a(i, j));
  for (int i = 0; i < b.size(); ++i) f.params.push_back(b(i));
  return f;
}

/// Dilation (x - x0)/r.
inline DiffMap dilation_map(const Vec& x0, double r) {
  const int m = static_cast<int>(x0.size());
  return affine_map(Mat(Mat::Identity(m, m) / r), Vec(-x0 / r));
}

}  // namespace conelab::current
