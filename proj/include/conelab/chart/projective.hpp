#pragma once

#include <complex>
#include <vector>

#include "conelab/chart/triple.hpp"

namespace conelab::chart {

using Cplx = std::complex<double>;

/// Real packing convention: z_j = x_{2j} + i x_{2j+1}.
inline std::vector<Cplx> to_complex(const Vec& x) {
  std::vector<Cplx> z(x.size() / 2);
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = Cplx(x(2 * j), x(2 * j + 1));
  return z;
}

inline Vec to_real(const std::vector<Cplx>& z) {
  Vec x(2 * z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    x(2 * j) = z[j].real();
    x(2 * j + 1) = z[j].imag();
  }
  return x;
}

struct OutOfChartError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UndefinedPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Point of the chart {z0 != 0} of CP^n: Z_j = z_j / z_0, stored as a real
/// 2n-vector with the same packing as the ambient space.
struct ProjectiveChartPoint {
  Vec Z;          // real dimension 2n
  double eps = 0.1;
  bool valid() const { return Z.norm() < 1.0 + eps; }
  int n() const { return static_cast<int>(Z.size()) / 2; }
};

/// Hopf/chart projection C^{n+1} \ {z0 = 0} -> chart coordinates.
/// Scale-invariant: lambda z maps to the same point for complex lambda != 0.
inline ProjectiveChartPoint hopf_project(const Vec& x, double eps = 0.1) {
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw UndefinedPointError("hopf_project: z = 0");
  auto z = to_complex(x);
  if (std::abs(z[0].real()) + std::abs(z[0].imag()) < 1e-14 * scale)
    throw OutOfChartError("hopf_project: z0 = 0 is outside the chart");
  std::vector<Cplx> w(z.size() - 1);
  for (std::size_t j = 1; j < z.size(); ++j) w[j - 1] = z[j] / z[0];
  return ProjectiveChartPoint{to_real(w), eps};
}

/// Unit vector in C^{n+1} along the complex line [1 : Z].
inline Vec chart_direction(const ProjectiveChartPoint& p) {
  const int n = p.n();
  Vec v(2 * (n + 1));
  v.setZero();
  v(0) = 1.0;
  for (int j = 0; j < 2 * n; ++j) v(2 + j) = p.Z(j);
  v /= v.norm();
  return v;
}

/// Fubini-Study data on the chart at Z, from the potential
/// f = (1/2) log(1 + |Z|^2), in closed form:
///  g_FS = [(1+|Z|^2) I - Z Z^T - (J0 Z)(J0 Z)^T] / (1+|Z|^2)^2,
///  theta_CP(u,v) = g_FS(I0 u, v).
/// g_FS(0) is the flat metric; (1/4) I <= g_FS <= 4 I for |Z| < 1.
struct FubiniStudy {
  Mat metric;
  Mat theta;  // skew matrix of the Kaehler form
};

inline FubiniStudy fubini_study(const ProjectiveChartPoint& p) {
  const Vec& z = p.Z;
  const int d = static_cast<int>(z.size());
  Mat j0 = standard_J(d);
  double s = 1.0 + z.squaredNorm();
  Vec jz = j0 * z;
  Mat g = (s * Mat::Identity(d, d) - z * z.transpose() - jz * jz.transpose()) /
          (s * s);
  FubiniStudy out;
  out.metric = g;
  out.theta = j0.transpose() * g;  // theta(u,v) = g(I0 u, v) = u^T J0^T G v
  return out;
}

}  // namespace conelab::chart
