#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>

#include "conelab/chart/two_vector.hpp"
#include "conelab/core/rng.hpp"

namespace conelab::chart {

/// Comass of a 2-form coefficient matrix at a point, with respect to the
/// metric g there: sup over g-orthonormal pairs (u,v) of beta(u,v).
///
/// With g = L L^T the map x -> L^T x takes (R^m, g) isometrically to the
/// flat metric, beta transforms to L^{-1} B L^{-T}, and the supremum over
/// orthonormal pairs of a skew matrix is its largest singular value (the
/// largest block coefficient of the skew normal form).
inline double comass(const Mat& beta, const Mat& g) {
  Mat l = cholesky_lower(g);  // throws DegenerateMetricError if not SPD
  Mat b = l.triangularView<Eigen::Lower>().solve(beta);
  Mat bt = l.triangularView<Eigen::Lower>().solve(b.transpose());
  return op_norm(bt.transpose());
}

inline double comass_flat(const Mat& beta) { return op_norm(beta); }

inline double comass(const TwoForm& beta, const Vec& x, const Mat& g) {
  return comass(beta.matrix(x), g);
}

/// Mass norm of a 2-vector with respect to g, computed exactly from the
/// skew normal form: the unit ball of the mass norm is the convex hull of
/// g-unit simple 2-vectors, whose gauge is the sum of the block
/// coefficients of L^T X L (half the nuclear norm).
inline double mass_norm(const TwoVector& xi, const Mat& g) {
  Mat l = cholesky_lower(g);
  Mat xg = l.transpose() * xi.skew() * l;
  auto blocks = skew_block_values(xg);
  return std::accumulate(blocks.begin(), blocks.end(), 0.0);
}

inline double mass_norm_flat(const TwoVector& xi) {
  auto blocks = skew_block_values(xi.skew());
  return std::accumulate(blocks.begin(), blocks.end(), 0.0);
}

/// Dual-evaluation estimate of the mass norm over a quasi-random net of
/// unit simple 2-vectors, refined until the relative improvement drops
/// below tol. Returns a lower bound converging to mass_norm from below.
/// Kept as the secondary route; the exact reduction above is the primary.
inline double mass_norm_estimate(const TwoVector& xi, const Mat& g,
                                 double tol = 1e-4, std::uint64_t seed = 12345,
                                 int max_rounds = 60) {
  const int m = xi.ambient_dim();
  Mat l = cholesky_lower(g);
  // Work in the flat frame: xi' = L^T-transported coefficients.
  Mat xg = l.transpose() * xi.skew() * l;
  TwoVector xf(pairs_from_skew(xg), m);

  Rng rng(seed);
  auto random_plane = [&](Vec& u, Vec& v) {
    u = Vec(m);
    v = Vec(m);
    for (int i = 0; i < m; ++i) u(i) = rng.normal();
    u.normalize();
    for (int i = 0; i < m; ++i) v(i) = rng.normal();
    v -= u.dot(v) * u;
    v.normalize();
  };

  // Decompose greedily: peel off the best simple direction of the
  // residual, accumulating |coefficients|; each round is a dual
  // evaluation against a comass-1 form built from sampled simples.
  double best = 0.0;
  for (int round = 0; round < max_rounds; ++round) {
    double acc = 0.0;
    TwoVector res = xf;
    for (int piece = 0; piece < m / 2; ++piece) {
      // sample simples, keep the best-aligned one, then locally refine
      Vec bu, bv;
      double bval = -1.0;
      const int samples = 200 * (round + 1);
      for (int s = 0; s < samples; ++s) {
        Vec u, v;
        random_plane(u, v);
        double val = std::abs(res.pair_with(skew_from_pairs(
            TwoVector::wedge(u, v).coeffs(), m)));
        if (val > bval) {
          bval = val;
          bu = u;
          bv = v;
        }
      }
      // power-iteration style refinement on the residual skew matrix
      Mat r = res.skew();
      for (int it = 0; it < 50; ++it) {
        Vec nu = r * bv;
        if (nu.norm() < 1e-15) break;
        nu.normalize();
        Vec nv = r.transpose() * nu;
        nv = -nv;  // r is skew: r^T = -r
        nv -= nu.dot(nv) * nu;
        if (nv.norm() < 1e-15) break;
        nv.normalize();
        bu = nu;
        bv = nv;
      }
      double coef = res.pair_with(skew_from_pairs(
          TwoVector::wedge(bu, bv).coeffs(), m));
      acc += std::abs(coef);
      res = res - TwoVector::wedge(bu, bv) * coef;
      if (res.coeffs().norm() < 1e-14) break;
    }
    if (acc > best) {
      double improvement = acc - best;
      best = acc;
      if (round > 0 && improvement < tol * std::max(1.0, best)) break;
    } else if (round > 2) {
      break;
    }
  }
  return best;
}

/// Result of a calibration test for a plane.
struct CalibrationCheck {
  bool calibrated = false;
  double residual = 0.0;      // |J w1 - w2|_g
  double omega_pairing = 0.0; // <omega_x, xi>
};

struct NonSimpleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Extract a g-orthonormal oriented basis (w1, w2) of the plane of a
/// simple 2-vector xi with xi = w1 ^ w2.
inline std::pair<Vec, Vec> simple_basis(const TwoVector& xi, const Mat& g,
                                        double simple_tol = 1e-8) {
  Mat l = cholesky_lower(g);
  Mat xg = l.transpose() * xi.skew() * l;  // flat-frame representative
  Eigen::JacobiSVD<Mat> svd(xg, Eigen::ComputeFullU);
  Vec sv = svd.singularValues();
  if (sv.size() > 2 && sv(2) > simple_tol * std::max(1.0, sv(0)))
    throw NonSimpleError("2-vector is not simple");
  double scale = 0.5 * (sv(0) + sv(1));
  Vec a = svd.matrixU().col(0);
  Vec b = svd.matrixU().col(1);
  TwoVector ab = TwoVector::wedge(a, b) * scale;
  if (ab.coeffs().dot(pairs_from_skew(xg)) < 0) std::swap(a, b);
  // back to the g-frame: w = L^{-T} a are g-orthonormal
  Mat lt = l.transpose();
  Vec w1 = lt.triangularView<Eigen::Upper>().solve(a);
  Vec w2 = lt.triangularView<Eigen::Upper>().solve(b);
  return {w1, w2};
}

/// Eq.-(2) test: the plane of a unit simple xi is calibrated by omega at x
/// iff it is J_x-invariant, i.e. J_x w1 = w2 for an oriented g-orthonormal
/// basis. Returns the residual and the <omega_x, xi> cross-check.
inline CalibrationCheck is_calibrated_plane(const Mat& j, const Mat& g,
                                            const Mat& omega_matrix,
                                            const TwoVector& xi,
                                            double tol = 1e-6) {
  auto [w1, w2] = simple_basis(xi, g);
  Vec diff = j * w1 - w2;
  CalibrationCheck out;
  out.residual = std::sqrt(diff.dot(g * diff));
  out.omega_pairing = xi.pair_with(omega_matrix);
  out.calibrated = out.residual <= tol;
  return out;
}

}  // namespace conelab::chart
