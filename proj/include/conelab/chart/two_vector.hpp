#pragma once

#include <functional>
#include <utility>

#include "conelab/core/linalg.hpp"

namespace conelab::chart {

/// 2-vector on R^{2n+2}, stored as coefficients over ordered pairs (i<j).
/// A simple u ^ v has coefficients u_i v_j - u_j v_i.
class TwoVector {
 public:
  TwoVector() = default;
  TwoVector(Vec coeffs, int ambient_dim)
      : c_(std::move(coeffs)), m_(ambient_dim) {
    if (c_.size() != pair_count(m_))
      throw std::invalid_argument("TwoVector: coefficient size mismatch");
  }

  static TwoVector zero(int m) { return TwoVector(Vec::Zero(pair_count(m)), m); }

  static TwoVector wedge(const Vec& u, const Vec& v) {
    const int m = static_cast<int>(u.size());
    Vec c(pair_count(m));
    int k = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j, ++k) c(k) = u(i) * v(j) - u(j) * v(i);
    return TwoVector(std::move(c), m);
  }

  int ambient_dim() const { return m_; }
  const Vec& coeffs() const { return c_; }
  Mat skew() const { return skew_from_pairs(c_, m_); }

  TwoVector operator+(const TwoVector& o) const { return {c_ + o.c_, m_}; }
  TwoVector operator-(const TwoVector& o) const { return {c_ - o.c_, m_}; }
  TwoVector operator*(double a) const { return {Vec(a * c_), m_}; }

  /// Euclidean pairing with a skew coefficient matrix: sum_{i<j} b_ij xi_ij.
  double pair_with(const Mat& form_matrix) const {
    double acc = 0.0;
    int k = 0;
    const int m = m_;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j, ++k) acc += form_matrix(i, j) * c_(k);
    return acc;
  }

 private:
  Vec c_;
  int m_ = 0;
};

inline TwoVector operator*(double a, const TwoVector& x) { return x * a; }

/// 2-form as a map point -> skew coefficient matrix, with a
/// constant-coefficient fast path.
class TwoForm {
 public:
  using CoeffFn = std::function<Mat(const Vec&)>;

  TwoForm() = default;
  TwoForm(CoeffFn f, int ambient_dim)
      : fn_(std::move(f)), m_(ambient_dim), constant_(false) {}

  static TwoForm constant(const Mat& skew) {
    TwoForm b;
    b.m_ = static_cast<int>(skew.rows());
    b.constant_ = true;
    b.cached_ = 0.5 * (skew - skew.transpose());
    return b;
  }

  static TwoForm from_pairs(const Vec& c, int m) {
    return constant(skew_from_pairs(c, m));
  }

  int ambient_dim() const { return m_; }
  bool is_constant() const { return constant_; }

  Mat matrix(const Vec& x) const {
    if (constant_) return cached_;
    Mat b = fn_(x);
    return 0.5 * (b - b.transpose());  // enforce skew symmetry
  }

  double operator()(const Vec& x, const Vec& u, const Vec& v) const {
    return u.dot(matrix(x) * v);
  }

  double pair(const Vec& x, const TwoVector& xi) const {
    return xi.pair_with(matrix(x));
  }

  TwoForm scaled(double a) const {
    if (constant_) return constant(Mat(a * cached_));
    auto f = fn_;
    return TwoForm([f, a](const Vec& x) { return Mat(a * f(x)); }, m_);
  }

 private:
  CoeffFn fn_;
  int m_ = 0;
  bool constant_ = false;
  Mat cached_;
};

/// 1-form as a map point -> coefficient vector; optional closed-form
/// Jacobian of the coefficients provides the exterior derivative.
class OneForm {
 public:
  using CoeffFn = std::function<Vec(const Vec&)>;
  using JacFn = std::function<Mat(const Vec&)>;

  OneForm() = default;
  OneForm(CoeffFn f, int ambient_dim) : fn_(std::move(f)), m_(ambient_dim) {}
  OneForm(CoeffFn f, JacFn df, int ambient_dim)
      : fn_(std::move(f)), jac_(std::move(df)), m_(ambient_dim) {}

  static OneForm constant(const Vec& c) {
    const int m = static_cast<int>(c.size());
    OneForm a([c](const Vec&) { return c; },
              [m](const Vec&) { return Mat::Zero(m, m); }, m);
    return a;
  }

  int ambient_dim() const { return m_; }
  Vec coeffs(const Vec& x) const { return fn_(x); }
  double operator()(const Vec& x, const Vec& v) const { return fn_(x).dot(v); }

  bool has_derivative() const { return static_cast<bool>(jac_); }

  /// d(alpha) as a TwoForm; requires the coefficient Jacobian.
  /// (d alpha)_{ij} = d_i c_j - d_j c_i, so the skew matrix is Dc^T - Dc.
  TwoForm exterior_derivative() const {
    if (!jac_)
      throw std::runtime_error("OneForm: no closed-form derivative supplied");
    auto j = jac_;
    return TwoForm([j](const Vec& x) {
      Mat d = j(x);
      return Mat(d.transpose() - d);
    }, m_);
  }

 private:
  CoeffFn fn_;
  JacFn jac_;
  int m_ = 0;
};

}  // namespace conelab::chart
