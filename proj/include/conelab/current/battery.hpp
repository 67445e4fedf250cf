#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "conelab/core/rng.hpp"
#include "conelab/current/patch_current.hpp"

namespace conelab::current {

namespace detail {

/// Multivariate polynomial as a monomial list (closed-form gradient).
struct Poly {
  struct Term {
    double coef;
    std::vector<int> exps;
  };
  std::vector<Term> terms;

  double value(const Vec& x) const {
    double acc = 0.0;
    for (const auto& t : terms) {
      double v = t.coef;
      for (std::size_t i = 0; i < t.exps.size(); ++i)
        for (int e = 0; e < t.exps[i]; ++e) v *= x(i);
      acc += v;
    }
    return acc;
  }

  double partial(const Vec& x, int k) const {
    double acc = 0.0;
    for (const auto& t : terms) {
      if (t.exps[k] == 0) continue;
      double v = t.coef * t.exps[k];
      for (std::size_t i = 0; i < t.exps.size(); ++i) {
        int e = t.exps[i] - (static_cast<int>(i) == k ? 1 : 0);
        for (int j = 0; j < e; ++j) v *= x(i);
      }
      acc += v;
    }
    return acc;
  }

  static Poly random(int dim, int degree, Rng& rng) {
    Poly p;
    std::vector<int> e(dim, 0);
    // enumerate monomials of total degree <= degree
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
      if (pos == dim) {
        p.terms.push_back({rng.uniform(-1.0, 1.0), e});
        return;
      }
      for (int d = 0; d <= remaining; ++d) {
        e[pos] = d;
        rec(pos + 1, remaining - d);
      }
      e[pos] = 0;
    };
    rec(0, degree);
    return p;
  }
};

/// C^2 bump window ((1 - |x|^2/R^2)_+)^3 with closed-form gradient.
struct Bump {
  double radius = 1.2;
  double value(const Vec& x) const {
    double u = 1.0 - x.squaredNorm() / (radius * radius);
    return u > 0.0 ? u * u * u : 0.0;
  }
  Vec gradient(const Vec& x) const {
    double u = 1.0 - x.squaredNorm() / (radius * radius);
    if (u <= 0.0) return Vec::Zero(x.size());
    return Vec(-6.0 * u * u / (radius * radius) * x);
  }
};

}  // namespace detail

/// Seeded battery of compactly supported test forms: bump-windowed
/// monomial-coefficient 2-forms (the weak-convergence surrogate) and
/// 1-forms with closed-form exterior derivatives (for boundary decay).
struct TestFormBattery {
  std::vector<TwoForm> two_forms;
  std::vector<OneForm> one_forms;
  double support_radius = 1.2;
  std::uint64_t seed = 1;

  static TestFormBattery make(int ambient_dim, int n_two_forms, int n_one_forms,
                              int degree, double support_radius,
                              std::uint64_t seed) {
    TestFormBattery out;
    out.support_radius = support_radius;
    out.seed = seed;
    Rng rng(seed);
    detail::Bump bump{support_radius};
    const int npairs = pair_count(ambient_dim);
    for (int k = 0; k < n_two_forms; ++k) {
      std::vector<detail::Poly> coeffs;
      coeffs.reserve(npairs);
      for (int c = 0; c < npairs; ++c)
        coeffs.push_back(detail::Poly::random(ambient_dim, degree, rng));
      out.two_forms.emplace_back(
          [coeffs, bump, ambient_dim](const Vec& x) {
            double w = bump.value(x);
            Vec c(pair_count(ambient_dim));
            for (int i = 0; i < c.size(); ++i)
              c(i) = w != 0.0 ? w * coeffs[i].value(x) : 0.0;
            return skew_from_pairs(c, ambient_dim);
          },
          ambient_dim);
    }
    for (int k = 0; k < n_one_forms; ++k) {
      std::vector<detail::Poly> coeffs;
      coeffs.reserve(ambient_dim);
      for (int c = 0; c < ambient_dim; ++c)
        coeffs.push_back(detail::Poly::random(ambient_dim, degree, rng));
      auto value = [coeffs, bump, ambient_dim](const Vec& x) {
        double w = bump.value(x);
        Vec c(ambient_dim);
        for (int i = 0; i < ambient_dim; ++i)
          c(i) = w != 0.0 ? w * coeffs[i].value(x) : 0.0;
        return c;
      };
      auto jac = [coeffs, bump, ambient_dim](const Vec& x) {
        // D c_i / d x_j = W d_j P_i + P_i d_j W
        double w = bump.value(x);
        Mat d = Mat::Zero(ambient_dim, ambient_dim);
        if (w == 0.0) return d;
        Vec gw = bump.gradient(x);
        for (int i = 0; i < ambient_dim; ++i) {
          double pi = coeffs[i].value(x);
          for (int j = 0; j < ambient_dim; ++j)
            d(i, j) = w * coeffs[i].partial(x, j) + pi * gw(j);
        }
        return d;
      };
      out.one_forms.emplace_back(value, jac, ambient_dim);
    }
    return out;
  }
};

/// Battery actions of a current (the weak-* surrogate coordinates).
inline std::vector<double> battery_actions(const PatchCurrent& T,
                                           const TestFormBattery& battery) {
  std::vector<double> out;
  out.reserve(battery.two_forms.size());
  for (const auto& b : battery.two_forms) out.push_back(action(T, b));
  return out;
}

/// Weak-convergence surrogate distance: max absolute action difference
/// over the battery 2-forms.
inline double battery_distance(const std::vector<double>& a,
                               const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double battery_distance(const PatchCurrent& A, const PatchCurrent& B,
                               const TestFormBattery& battery) {
  return battery_distance(battery_actions(A, battery), battery_actions(B, battery));
}

/// Cycle verification: |T(d alpha)| <= tol * (1 + comass-scale of d alpha)
/// over the battery 1-forms.
struct CycleReport {
  double max_violation = 0.0;  // max |T(d alpha)| / (1 + |d alpha|)
  bool passed = false;
};

inline CycleReport verify_cycle(const PatchCurrent& T,
                                const TestFormBattery& battery,
                                double tol_cycle = 1e-3) {
  CycleReport rep;
  for (const auto& alpha : battery.one_forms) {
    TwoForm da = alpha.exterior_derivative();
    // crude comass scale of d alpha: max over support samples of |matrix|
    double scale = 0.0;
    Rng rng(battery.seed + 7);
    for (int s = 0; s < 32; ++s) {
      Vec x(alpha.ambient_dim());
      for (int i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
      x *= battery.support_radius * rng.uniform() / std::max(1.0, x.norm());
      scale = std::max(scale, op_norm(da.matrix(x)));
    }
    double v = std::abs(action(T, da)) / (1.0 + scale);
    rep.max_violation = std::max(rep.max_violation, v);
  }
  rep.passed = rep.max_violation <= tol_cycle;
  return rep;
}

}  // namespace conelab::current
