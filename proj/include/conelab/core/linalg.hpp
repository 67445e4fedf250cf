#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace conelab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct DegenerateMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Number of ordered pairs (i<j) in dimension m: binom(m,2).
inline int pair_count(int m) { return m * (m - 1) / 2; }

/// Flat index of the ordered pair (i<j) in lexicographic order.
inline int pair_index(int i, int j, int m) {
  // offset of row i is sum_{k<i} (m-1-k) = i*m - i(i+1)/2 - i ... kept explicit:
  return i * (2 * m - i - 1) / 2 + (j - i - 1);
}

/// Enumerate pairs (i<j) in the same order as pair_index.
inline std::vector<std::pair<int, int>> pair_list(int m) {
  std::vector<std::pair<int, int>> out;
  out.reserve(pair_count(m));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) out.emplace_back(i, j);
  return out;
}

/// Skew-symmetric matrix from pair coefficients (i<j entries).
inline Mat skew_from_pairs(const Vec& c, int m) {
  Mat s = Mat::Zero(m, m);
  int k = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, ++k) {
      s(i, j) = c(k);
      s(j, i) = -c(k);
    }
  return s;
}

inline Vec pairs_from_skew(const Mat& s) {
  const int m = static_cast<int>(s.rows());
  Vec c(pair_count(m));
  int k = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, ++k) c(k) = s(i, j);
  return c;
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
inline Mat cholesky_lower(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw DegenerateMetricError("metric is not positive definite");
  return llt.matrixL();
}

/// Singular values of an m x m matrix, descending.
inline Vec singular_values(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues();
}

/// Block coefficients lambda_1 >= lambda_2 >= ... >= 0 of the skew normal
/// form of a skew matrix (singular values collapse in equal pairs).
inline std::vector<double> skew_block_values(const Mat& s) {
  Vec sv = singular_values(s);
  std::vector<double> out;
  for (int i = 0; i + 1 < sv.size(); i += 2) out.push_back(0.5 * (sv(i) + sv(i + 1)));
  if (sv.size() % 2 == 1) out.push_back(0.0);
  return out;
}

/// Gram determinant of the columns of V with respect to metric g.
inline double gram_det(const Mat& v, const Mat& g) {
  Mat gram = v.transpose() * g * v;
  return gram.determinant();
}

/// Operator norm (largest singular value).
inline double op_norm(const Mat& a) { return singular_values(a)(0); }

}  // namespace conelab
