#pragma once
// Reference implementations used only by the tests. None of them call into the
// library code they check.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Matrix = Eigen::MatrixXd;

inline double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<double>(std::llround(r));
}

inline double bernstein(int i, int mu, double t) {
  return choose(mu, i) * std::pow(t, i) * std::pow(1.0 - t, mu - i);
}

/// Homogeneous de Casteljau on a row-major (first index fastest) net.
inline Vec3 de_casteljau(int p, int q, const std::vector<Vec3>& pts, const std::vector<double>& w,
                         double u, double v) {
  std::vector<Vec4> rows(static_cast<std::size_t>(q) + 1);
  for (int j = 0; j <= q; ++j) {
    std::vector<Vec4> a(static_cast<std::size_t>(p) + 1);
    for (int i = 0; i <= p; ++i) {
      const auto k = static_cast<std::size_t>(j * (p + 1) + i);
      a[i] << w[k] * pts[k], w[k];
    }
    for (int r = 1; r <= p; ++r)
      for (int i = 0; i <= p - r; ++i) a[i] = (1 - u) * a[i] + u * a[i + 1];
    rows[j] = a[0];
  }
  for (int r = 1; r <= q; ++r)
    for (int j = 0; j <= q - r; ++j) rows[j] = (1 - v) * rows[j] + v * rows[j + 1];
  return rows[0].head<3>() / rows[0](3);
}

/// Cox-de Boor basis N_{i,p}(t) with the right end of the last span closed.
inline double cox_de_boor(int i, int p, const std::vector<double>& U, double t) {
  if (p == 0) {
    const bool last = t == U.back() && U[i] < U[i + 1] && U[i + 1] == U.back();
    return (U[i] <= t && t < U[i + 1]) || last ? 1.0 : 0.0;
  }
  double a = 0.0, b = 0.0;
  if (U[i + p] > U[i]) a = (t - U[i]) / (U[i + p] - U[i]) * cox_de_boor(i, p - 1, U, t);
  if (U[i + p + 1] > U[i + 1])
    b = (U[i + p + 1] - t) / (U[i + p + 1] - U[i + 1]) * cox_de_boor(i + 1, p - 1, U, t);
  return a + b;
}

/// Rational tensor B-spline point by direct basis summation.
inline Vec3 bspline_point(int p1, int p2, const std::vector<double>& U, const std::vector<double>& V,
                          int n1, int n2, const std::vector<Vec3>& pts,
                          const std::vector<double>& w, double u, double v) {
  Vec4 acc = Vec4::Zero();
  for (int j = 0; j < n2; ++j) {
    const double bj = cox_de_boor(j, p2, V, v);
    if (bj == 0.0) continue;
    for (int i = 0; i < n1; ++i) {
      const double bi = cox_de_boor(i, p1, U, u);
      if (bi == 0.0) continue;
      const auto k = static_cast<std::size_t>(j * n1 + i);
      Vec4 h;
      h << w[k] * pts[k], w[k];
      acc += bi * bj * h;
    }
  }
  return acc.head<3>() / acc(3);
}

/// Plain single knot insertion (textbook form) on polynomial control points.
inline void insert_knot(int p, std::vector<double>& U, std::vector<Vec3>& P, double t) {
  int k = 0;
  while (k + 1 < static_cast<int>(U.size()) && U[k + 1] <= t) ++k;
  std::vector<Vec3> Q(P.size() + 1);
  for (int i = 0; i < static_cast<int>(Q.size()); ++i) {
    if (i <= k - p) {
      Q[i] = P[i];
    } else if (i > k) {
      Q[i] = P[i - 1];
    } else {
      const double a = (t - U[i]) / (U[i + p] - U[i]);
      Q[i] = (1 - a) * P[i - 1] + a * P[i];
    }
  }
  U.insert(U.begin() + k + 1, t);
  P = std::move(Q);
}

/// Power-basis coefficients (index = exponent) of B_i^mu.
inline std::vector<double> bernstein_power(int i, int mu) {
  std::vector<double> c(static_cast<std::size_t>(mu) + 1, 0.0);
  for (int k = 0; k <= mu - i; ++k)
    c[i + k] = choose(mu, i) * choose(mu - i, k) * ((k % 2) ? -1.0 : 1.0);
  return c;
}

/// Bivariate power-basis polynomial, coef(a, b) multiplies u^a v^b.
using Poly2 = Matrix;

inline Poly2 poly_mul(const Poly2& a, const Poly2& b) {
  Poly2 r = Poly2::Zero(a.rows() + b.rows() - 1, a.cols() + b.cols() - 1);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) r(i + k, j + l) += a(i, j) * b(k, l);
  return r;
}

inline Poly2 tensor_bernstein(int i, int p, int j, int q) {
  const auto a = bernstein_power(i, p);
  const auto b = bernstein_power(j, q);
  Poly2 r(p + 1, q + 1);
  for (int x = 0; x <= p; ++x)
    for (int y = 0; y <= q; ++y) r(x, y) = a[x] * b[y];
  return r;
}

inline double support_max(const std::vector<Vec3>& pts, const Vec3& d) {
  double m = -INFINITY;
  for (const auto& x : pts) m = std::max(m, x.dot(d));
  return m;
}
inline double support_min(const std::vector<Vec3>& pts, const Vec3& d) {
  double m = INFINITY;
  for (const auto& x : pts) m = std::min(m, x.dot(d));
  return m;
}

/// Frank-Wolfe on min |z| over conv(A - B). Returns (upper bound, certified
/// lower bound) on the squared distance between the two hulls.
inline std::pair<double, double> hull_distance_sq(const std::vector<Vec3>& A,
                                                  const std::vector<Vec3>& B, int iters = 20000) {
  Vec3 z = A[0] - B[0];
  double lower = 0.0;
  for (int it = 0; it < iters; ++it) {
    // Linear minimisation oracle over the Minkowski difference.
    std::size_t ia = 0, ib = 0;
    double best = INFINITY;
    for (std::size_t i = 0; i < A.size(); ++i)
      if (A[i].dot(z) < best) best = A[i].dot(z), ia = i;
    best = -INFINITY;
    for (std::size_t j = 0; j < B.size(); ++j)
      if (B[j].dot(z) > best) best = B[j].dot(z), ib = j;
    const Vec3 s = A[ia] - B[ib];
    const double gap = 2.0 * z.dot(z - s);
    lower = std::max(lower, z.squaredNorm() - gap);
    if (gap <= 1e-15) break;
    const Vec3 d = s - z;
    const double gamma = std::clamp(-z.dot(d) / std::max(d.squaredNorm(), 1e-300), 0.0, 1.0);
    z += gamma * d;
  }
  return {z.squaredNorm(), lower};
}

/// Real roots of a t^2 + b t + c in [lo, hi], sorted.
inline std::vector<double> quadratic_roots(double a, double b, double c, double lo, double hi) {
  std::vector<double> r;
  if (std::abs(a) < 1e-300) {
    if (std::abs(b) > 0) r.push_back(-c / b);
  } else {
    const double disc = b * b - 4 * a * c;
    if (disc >= 0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      r.push_back(q / a);
      if (q != 0) r.push_back(c / q);
    }
  }
  std::vector<double> out;
  for (double t : r)
    if (t >= lo && t <= hi) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

/// Parameters where a line meets a sphere, inside [0, 1].
inline std::vector<double> sphere_line(const Vec3& c, double r, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const Vec3 f = a - c;
  return quadratic_roots(d.dot(d), 2 * f.dot(d), f.dot(f) - r * r, 0.0, 1.0);
}

/// Residual of the projection of each column of `basis` onto span(Q), Q orthonormalised.
inline double span_residual(const Matrix& Q, const Matrix& basis) {
  const Eigen::HouseholderQR<Matrix> qr(Q);
  const Matrix Qo = qr.householderQ() * Matrix::Identity(Q.rows(), Q.cols());
  double worst = 0.0;
  for (int c = 0; c < basis.cols(); ++c) {
    const Eigen::VectorXd v = basis.col(c);
    worst = std::max(worst, (v - Qo * (Qo.transpose() * v)).norm() / v.norm());
  }
  return worst;
}

}  // namespace oracle
