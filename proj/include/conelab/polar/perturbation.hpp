#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "conelab/core/linalg.hpp"

namespace conelab::polar {

/// Registry of perturbation vector fields used to synthesize foliations:
/// smooth V with V(0) = 0 and DV(0) = 0 (so Psi = Id + mag V fixes the
/// origin with DPsi(0) = Id), divergence-free, closed-form Jacobian.
struct Perturbation {
  std::string name;
  double magnitude = 0.0;
  int ambient_dim = 4;

  Vec value(const Vec& x) const {
    const int m = ambient_dim;
    Vec v = Vec::Zero(m);
    if (name == "none" || magnitude == 0.0) return v;
    if (name == "quadratic_swirl") {
      // V_i = x_{i+1}^2 (cyclic): div V = 0, purely quadratic.
      for (int i = 0; i < m; ++i) v(i) = x((i + 1) % m) * x((i + 1) % m);
    } else if (name == "quadratic_shear") {
      // V_i = x_{i+1} x_{i+2} (cyclic): div V = 0.
      for (int i = 0; i < m; ++i) v(i) = x((i + 1) % m) * x((i + 2) % m);
    } else if (name == "cubic_swirl") {
      for (int i = 0; i < m; ++i) {
        double y = x((i + 1) % m);
        v(i) = y * y * y;
      }
    } else {
      throw std::invalid_argument("unknown perturbation: " + name);
    }
    return magnitude * v;
  }

  Mat jacobian(const Vec& x) const {
    const int m = ambient_dim;
    Mat d = Mat::Zero(m, m);
    if (name == "none" || magnitude == 0.0) return d;
    if (name == "quadratic_swirl") {
      for (int i = 0; i < m; ++i) d(i, (i + 1) % m) = 2.0 * x((i + 1) % m);
    } else if (name == "quadratic_shear") {
      for (int i = 0; i < m; ++i) {
        d(i, (i + 1) % m) = x((i + 2) % m);
        d(i, (i + 2) % m) = x((i + 1) % m);
      }
    } else if (name == "cubic_swirl") {
      for (int i = 0; i < m; ++i) {
        double y = x((i + 1) % m);
        d(i, (i + 1) % m) = 3.0 * y * y;
      }
    } else {
      throw std::invalid_argument("unknown perturbation: " + name);
    }
    return magnitude * d;
  }
};

inline const std::vector<std::string>& perturbation_registry() {
  static const std::vector<std::string> names = {
      "none", "quadratic_swirl", "quadratic_shear", "cubic_swirl"};
  return names;
}

}  // namespace conelab::polar
