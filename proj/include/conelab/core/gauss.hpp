#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace conelab {

/// One-dimensional Gauss-Legendre rule on [0,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Legendre P_n and P_n' at x via the three-term recurrence.
inline void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = (n == 0) ? 1.0 : (n == 1 ? x : p1);
  if (n == 0) {
    dp = 0.0;
    return;
  }
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

inline GaussRule build_gauss(int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule: order must be >= 1");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, Newton refinement.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      double dx = -p / dp;
      x += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    // Map [-1,1] -> [0,1].
    r.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace detail

/// Cached Gauss-Legendre rule of order q on [0,1]. Thread-safe.
inline const GaussRule& gauss_rule(int q) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, detail::build_gauss(q)).first;
  return it->second;
}

/// Integrate f over [a,b] with a q-point rule.
template <class F>
double gauss_integrate(F&& f, double a, double b, int q) {
  const GaussRule& r = gauss_rule(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    acc += r.weights[i] * f(a + (b - a) * r.nodes[i]);
  return acc * (b - a);
}

}  // namespace conelab
