#pragma once

#include <optional>

#include "conelab/core/rng.hpp"
#include "conelab/current/patch_current.hpp"

namespace conelab::current {

struct PushforwardOptions {
  bool assert_positive = false;  // require f pseudoholomorphic
  double pseudoholo_tol = 1e-8;
  int check_samples = 32;
  std::uint64_t seed = 404;
};

struct PseudoholomorphyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PushforwardResult {
  PatchCurrent current;
  double max_pseudoholo_residual = 0.0;  // |J2 Df - Df J1| over samples
  bool injectivity_warning = false;
};

namespace detail {

template <class F>
void sample_patch_points(const PatchCurrent& T, int samples, std::uint64_t seed,
                         F&& f) {
  Rng rng(seed);
  for (const Patch& p : T.patches) {
    const auto& cells = p.effective_cells();
    for (int k = 0; k < samples; ++k) {
      const Cell& c = cells[static_cast<std::size_t>(rng.uniform() * cells.size()) %
                           cells.size()];
      double s = rng.uniform(c.s0, c.s1), t = rng.uniform(c.t0, c.t1);
      f(p.surf.value(s, t));
    }
  }
  for (const NodeGroup& g : T.groups)
    for (int k = 0; k < samples; ++k)
      f(g.nodes[static_cast<std::size_t>(rng.uniform() * g.nodes.size()) %
                g.nodes.size()].point);
}

}  // namespace detail

/// Push-forward of the current under a diffeomorphism with closed-form
/// differential: parametrizations are composed exactly (no resampling),
/// node tangents transported by the differential. When positivity is
/// asserted, the pseudoholomorphy residual |J2(f(x)) Df(x) - Df(x) J1(x)|
/// is sampled first and violations are an error (Lemma-A.1 hypothesis).
inline PushforwardResult pushforward(const PatchCurrent& T, const DiffMap& f,
                                     const CompatibleTriple& source_triple,
                                     const CompatibleTriple& target_triple,
                                     PushforwardOptions opt = {}) {
  PushforwardResult out;
  // pseudoholomorphy residual on samples
  detail::sample_patch_points(T, opt.check_samples, opt.seed, [&](const Vec& x) {
    Mat df = f.jacobian(x);
    Mat res = target_triple.J_at(f.value(x)) * df - df * source_triple.J_at(x);
    out.max_pseudoholo_residual =
        std::max(out.max_pseudoholo_residual, res.norm());
  });
  if (opt.assert_positive && out.max_pseudoholo_residual > opt.pseudoholo_tol)
    throw PseudoholomorphyError(
        "pushforward: map is not pseudoholomorphic (residual " +
        std::to_string(out.max_pseudoholo_residual) + ")");

  // injectivity spot check on a coarse sample set (warning only)
  {
    std::vector<Vec> images;
    detail::sample_patch_points(T, 8, opt.seed + 1,
                                [&](const Vec& x) { images.push_back(f.value(x)); });
    for (std::size_t i = 0; i < images.size() && !out.injectivity_warning; ++i)
      for (std::size_t j = i + 1; j < images.size(); ++j)
        if ((images[i] - images[j]).norm() < 1e-12) {
          out.injectivity_warning = true;
          break;
        }
  }

  out.current = T;
  out.current.ambient_dim = f.codom_dim;
  for (Patch& p : out.current.patches) {
    p.surf = compose(f, p.surf);
    if (!f.name.empty() && !p.spec.base.empty())
      p.spec.stack.push_back({f.name, f.params});
    else
      p.spec.base.clear();
  }
  for (NodeGroup& g : out.current.groups) {
    for (DensityNode& nd : g.nodes) {
      Mat df = f.jacobian(nd.point);
      Mat x = skew_from_pairs(nd.xi, T.ambient_dim);
      nd.xi = pairs_from_skew(Mat(df * x * df.transpose()));
      nd.point = f.value(nd.point);
    }
    if (!f.name.empty() && !g.spec.generator.empty())
      g.spec.params.push_back(0.0);  // composed maps invalidate regeneration
    g.spec.generator.clear();
  }
  return out;
}

/// Push-forward that keeps the node-group regeneration spec when the map is
/// a pure dilation (the generators understand rescaling); used by dilate.
inline PatchCurrent pushforward_affine_exact(const PatchCurrent& T, const Mat& a,
                                             const Vec& b) {
  PatchCurrent out = T;
  DiffMap f;
  const int m = T.ambient_dim;
  f.dom_dim = f.codom_dim = m;
  f.value = [a, b](const Vec& x) { return Vec(a * x + b); };
  f.jacobian = [a](const Vec&) { return a; };
  for (Patch& p : out.patches) {
    p.surf = compose(f, p.surf);
    if (!p.spec.base.empty()) {
      MapSpec ms;
      ms.name = "affine";
      ms.params.push_back(static_cast<double>(m));
      ms.params.push_back(static_cast<double>(m));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) ms.params.push_back(a(i, j));
      for (int i = 0; i < m; ++i) ms.params.push_back(b(i));
      p.spec.stack.push_back(std::move(ms));
    }
  }
  for (NodeGroup& g : out.groups)
    for (DensityNode& nd : g.nodes) {
      Mat x = skew_from_pairs(nd.xi, m);
      nd.xi = pairs_from_skew(Mat(a * x * a.transpose()));
      nd.point = a * nd.point + b;
    }
  return out;
}

}  // namespace conelab::current
