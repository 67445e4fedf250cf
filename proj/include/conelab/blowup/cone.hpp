#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "conelab/blowup/density.hpp"
#include "conelab/current/battery.hpp"

namespace conelab::blowup {

using current::PatchCurrent;
using current::TestFormBattery;

/// Positive measure on the CP^n chart representing a positive-(1,1) cone
/// (Eq. 4): atoms plus a binned diffuse part. Total mass equals the vertex
/// density of the reconstructed cone current.
struct ConeMeasure {
  struct Atom {
    Vec Z;          // chart coordinates, real dimension 2n
    double weight;  // > 0 for atoms, >= 0 for diffuse samples
  };
  std::vector<Atom> atoms;
  std::vector<Atom> diffuse;
  std::string sampling_rule = "explicit";
  double radius = 1.0;       // radius of the representing ball
  double out_of_chart = 0.0; // mass outside the z0 != 0 chart window

  double atom_total() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
  double diffuse_total() const {
    double s = 0.0;
    for (const auto& a : diffuse) s += a.weight;
    return s;
  }
  double total() const { return atom_total() + diffuse_total() + out_of_chart; }
};

/// Reconstruction of the Eq.-(4) cone current: the weighted family of
/// disks D^X over the measure (atoms exactly, diffuse part by its samples).
/// The triple at the vertex must be constant on the cone's ball.
inline PatchCurrent cone_current(const ConeMeasure& tau,
                                 const chart::CompatibleTriple& triple,
                                 int quad_order = 16) {
  const int m = triple.ambient_dim;
  // constancy probe: a cone lives in the tangent space with J_{x0}
  {
    Vec a = Vec::Zero(m), b = Vec::Constant(m, 0.31 * tau.radius);
    if ((triple.J_at(a) - triple.J_at(b)).norm() > 1e-10)
      throw std::invalid_argument("cone_current: triple is not constant");
  }
  PatchCurrent T;
  T.ambient_dim = m;
  T.quad_order = quad_order;
  T.cycle_flag = true;  // boundaryless in the open ball
  auto add = [&](const ConeMeasure::Atom& a) {
    if (a.weight < 0.0)
      throw std::invalid_argument("cone_current: negative weight");
    if (a.weight == 0.0) return;
    chart::ProjectiveChartPoint X{a.Z, 0.1};
    T.patches.push_back(current::make_cone_ray(X, a.weight, tau.radius));
  };
  for (const auto& a : tau.atoms) add(a);
  for (const auto& a : tau.diffuse) add(a);
  return T;
}

/// Uniform diffuse measure over a chart cap |Z| <= cap_radius with the
/// given total mass, sampled on a deterministic grid.
inline ConeMeasure uniform_cap_measure(int n, double cap_radius, double total,
                                       int grid_per_axis = 12) {
  ConeMeasure tau;
  tau.sampling_rule = "uniform_cap_grid(" + std::to_string(grid_per_axis) + ")";
  const int d = 2 * n;
  std::vector<ConeMeasure::Atom> pts;
  std::vector<int> idx(d, 0);
  const double h = 2.0 * cap_radius / grid_per_axis;
  while (true) {
    Vec z(d);
    for (int k = 0; k < d; ++k) z(k) = -cap_radius + h * (idx[k] + 0.5);
    if (z.norm() <= cap_radius) pts.push_back({z, 1.0});
    int k = 0;
    while (k < d && ++idx[k] == grid_per_axis) idx[k++] = 0;
    if (k == d) break;
  }
  for (auto& p : pts) p.weight = total / pts.size();
  tau.diffuse = std::move(pts);
  return tau;
}

/// Transport-style distance between two cone measures: greedy atom
/// matching cost (weight differences, location gaps scaled by weight,
/// unmatched atoms) plus the diffuse-total difference.
inline double measure_distance(const ConeMeasure& a, const ConeMeasure& b) {
  std::vector<bool> used(b.atoms.size(), false);
  double cost = 0.0;
  for (const auto& x : a.atoms) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.atoms.size(); ++j) {
      if (used[j]) continue;
      double d = (x.Z - b.atoms[j].Z).norm();
      if (d < bd) {
        bd = d;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) {
      cost += x.weight;
      continue;
    }
    used[best] = true;
    const auto& y = b.atoms[best];
    cost += std::abs(x.weight - y.weight) + std::min(x.weight, y.weight) * bd;
  }
  for (std::size_t j = 0; j < b.atoms.size(); ++j)
    if (!used[j]) cost += b.atoms[j].weight;
  cost += std::abs(a.diffuse_total() - b.diffuse_total());
  cost += std::abs(a.out_of_chart - b.out_of_chart);
  return cost;
}

struct ExtractConfig {
  std::vector<double> radii;  // decreasing sequence r_n
  double bin_width = 0.05;
  double atom_threshold = 0.02;
  double tol_conv = 1e-3;
  double chart_eps = 0.1;
  double tol_pos = 1e-5;
  int refine_factor = 4;
  current::RestrictOptions restrict_opt{};
};

/// Radius-sequence record of a blow-up run: per-radius battery actions,
/// mass-ratio profile, convergence diagnostics and the extracted measure.
struct BlowupTrace {
  Vec center;
  std::vector<double> radii;
  std::vector<std::vector<double>> battery_actions;
  std::vector<double> mass_ratio;
  std::vector<double> cauchy;  // successive battery distances
  bool converged = false;
  ConeMeasure extracted;
  DensityEstimate density;
  double clip_error = 0.0;
};

namespace detail {

struct BinKey {
  std::vector<int> idx;
  bool operator<(const BinKey& o) const { return idx < o.idx; }
};

/// Scatter the mass measure of a positive current through the chart
/// projection: every quadrature node deposits its omega-pairing mass at
/// its chart location.
template <class F>
void scatter_mass(const PatchCurrent& T, const chart::CompatibleTriple& triple,
                  double chart_eps, F&& deposit) {
  double overflow = 0.0;
  auto place = [&](const Vec& x, double mass) {
    try {
      auto Z = chart::hopf_project(x, chart_eps);
      if (Z.valid())
        deposit(Z.Z, mass);
      else
        overflow += mass;
    } catch (const chart::OutOfChartError&) {
      overflow += mass;
    } catch (const chart::UndefinedPointError&) {
      overflow += mass;
    }
  };
  for (const auto& p : T.patches) {
    current::detail::for_each_quad_node(
        p, T.quad_order, [&](double s, double t, double w) {
          Vec x = p.surf.value(s, t);
          Vec a = p.surf.du(s, t);
          Vec b = p.surf.dv(s, t);
          double mass = p.weight * p.orientation * p.density_at(s, t) * w *
                        triple.omega(x, a, b);
          place(x, mass);
        });
  }
  for (const auto& g : T.groups)
    for (const auto& nd : g.nodes)
      place(nd.point,
            nd.weight * chart::TwoVector(nd.xi, T.ambient_dim)
                            .pair_with(triple.omega_at(nd.point)));
  deposit(Vec(), overflow);  // empty location = out of chart
}

}  // namespace detail

/// tau-hat estimation by mass binning over the CP^n chart: stage-1 bins of
/// the configured width locate candidates, a refined histogram (factor
/// refine_factor) isolates atom clusters; the remainder stays diffuse.
inline ConeMeasure bin_cone_measure(const PatchCurrent& dilated,
                                    const chart::CompatibleTriple& rescaled,
                                    const ExtractConfig& cfg) {
  const int d = dilated.ambient_dim - 2;
  const double span = 1.0 + cfg.chart_eps;
  ConeMeasure tau;
  tau.sampling_rule = "chart_bins(w=" + std::to_string(cfg.bin_width) + ")";

  std::vector<std::pair<Vec, double>> samples;
  double overflow = 0.0;
  detail::scatter_mass(dilated, rescaled, cfg.chart_eps,
                       [&](const Vec& z, double mass) {
                         if (z.size() == 0)
                           overflow += mass;
                         else
                           samples.emplace_back(z, mass);
                       });
  tau.out_of_chart = overflow / M_PI;

  auto key_of = [&](const Vec& z, double width) {
    detail::BinKey k;
    k.idx.resize(d);
    for (int i = 0; i < d; ++i)
      k.idx[i] = static_cast<int>(std::floor((z(i) + span) / width));
    return k;
  };

  std::map<detail::BinKey, double> coarse;
  for (const auto& [z, m] : samples) coarse[key_of(z, cfg.bin_width)] += m;

  std::set<detail::BinKey> candidates;
  for (const auto& [k, m] : coarse)
    if (m / M_PI >= cfg.atom_threshold) candidates.insert(k);

  // refined histogram restricted to candidate neighborhoods
  const double fine_w = cfg.bin_width / cfg.refine_factor;
  std::map<detail::BinKey, std::pair<double, Vec>> fine;  // mass, centroid acc
  std::set<detail::BinKey> atom_coarse_keys;
  for (const auto& [z, m] : samples) {
    auto ck = key_of(z, cfg.bin_width);
    bool near = false;
    for (const auto& cand : candidates) {
      bool close = true;
      for (int i = 0; i < d && close; ++i)
        close = std::abs(ck.idx[i] - cand.idx[i]) <= 1;
      if (close) {
        near = true;
        break;
      }
    }
    if (!near) continue;
    auto fk = key_of(z, fine_w);
    auto& cellv = fine[fk];
    if (cellv.second.size() == 0) cellv.second = Vec::Zero(d);
    cellv.first += m;
    cellv.second += m * z;
  }

  // cluster contiguous fine bins above threshold into atoms
  std::set<detail::BinKey> hot;
  for (const auto& [k, v] : fine)
    if (v.first / M_PI >= cfg.atom_threshold) hot.insert(k);
  std::set<detail::BinKey> visited;
  for (const auto& seed : hot) {
    if (visited.count(seed)) continue;
    std::vector<detail::BinKey> stack{seed}, cluster;
    visited.insert(seed);
    while (!stack.empty()) {
      auto k = stack.back();
      stack.pop_back();
      cluster.push_back(k);
      for (const auto& other : hot) {
        if (visited.count(other)) continue;
        bool adj = true;
        for (int i = 0; i < d && adj; ++i)
          adj = std::abs(k.idx[i] - other.idx[i]) <= 1;
        if (adj) {
          visited.insert(other);
          stack.push_back(other);
        }
      }
    }
    double mass = 0.0;
    Vec centroid = Vec::Zero(d);
    for (const auto& k : cluster) {
      mass += fine.at(k).first;
      centroid += fine.at(k).second;
    }
    if (mass / M_PI >= cfg.atom_threshold) {
      tau.atoms.push_back({Vec(centroid / mass), mass / M_PI});
      for (const auto& k : cluster) {
        // remove the cluster mass from the coarse diffuse remainder
        detail::BinKey ck;
        ck.idx.resize(d);
        for (int i = 0; i < d; ++i)
          ck.idx[i] = static_cast<int>(std::floor(
              (fine.at(k).second(i) / fine.at(k).first + span) / cfg.bin_width));
        auto it = coarse.find(ck);
        if (it != coarse.end()) it->second -= fine.at(k).first;
      }
    }
  }
  std::sort(tau.atoms.begin(), tau.atoms.end(),
            [](const auto& a, const auto& b) { return a.weight > b.weight; });

  for (const auto& [k, m] : coarse) {
    if (m <= 1e-14) continue;
    Vec center(d);
    for (int i = 0; i < d; ++i)
      center(i) = (k.idx[i] + 0.5) * cfg.bin_width - span;
    tau.diffuse.push_back({center, m / M_PI});
  }
  return tau;
}

/// Full blow-up trace along a radius sequence: dilation, battery actions,
/// mass-ratio profile, Cauchy diagnostics and the extracted cone measure.
/// Non-convergence is a legitimate diagnostic outcome (flagged, never an
/// exception).
inline BlowupTrace extract_tangent_cone(const PatchCurrent& T,
                                        const chart::CompatibleTriple& triple,
                                        const Vec& x0, const ExtractConfig& cfg,
                                        const TestFormBattery& battery) {
  BlowupTrace trace;
  trace.center = x0;
  DilationResult last;
  for (double r : cfg.radii) {
    auto dil = dilate(T, x0, r, triple, cfg.restrict_opt);
    trace.radii.push_back(r);
    trace.battery_actions.push_back(
        current::battery_actions(dil.current, battery));
    double mass = current::action(dil.current, dil.triple.omega);
    trace.mass_ratio.push_back(mass / M_PI);
    trace.clip_error += dil.clip_error / (M_PI * r * r);
    if (trace.battery_actions.size() >= 2) {
      const auto& a = trace.battery_actions[trace.battery_actions.size() - 2];
      const auto& b = trace.battery_actions.back();
      trace.cauchy.push_back(current::battery_distance(a, b));
    }
    last = std::move(dil);
  }
  trace.converged = !trace.cauchy.empty() && trace.cauchy.back() < cfg.tol_conv;
  if (!trace.radii.empty())
    trace.extracted = bin_cone_measure(last.current, last.triple, cfg);
  if (trace.mass_ratio.size() >= 2) {
    std::size_t n = trace.mass_ratio.size();
    double rb = trace.radii[n - 1], ra = trace.radii[n - 2];
    double pb = trace.mass_ratio[n - 1], pa = trace.mass_ratio[n - 2];
    double slope = (pa - pb) / (ra - rb);
    trace.density.value = pb - slope * rb;
    trace.density.uncertainty = std::abs(pa - pb) + trace.clip_error;
  } else if (!trace.mass_ratio.empty()) {
    trace.density.value = trace.mass_ratio.back();
    trace.density.uncertainty = trace.clip_error;
  }
  return trace;
}

}  // namespace conelab::blowup
