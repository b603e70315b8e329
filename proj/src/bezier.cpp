#include "lsk/bezier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lsk {

namespace {

using BinomialTable = std::array<std::array<double, kMaxBinomialDegree + 1>, kMaxBinomialDegree + 1>;

const BinomialTable& pascal_triangle() {
  static const BinomialTable table = [] {
    std::array<std::array<long long, kMaxBinomialDegree + 1>, kMaxBinomialDegree + 1> ints{};
    for (int n = 0; n <= kMaxBinomialDegree; ++n) {
      ints[n][0] = ints[n][n] = 1;
      for (int k = 1; k < n; ++k) ints[n][k] = ints[n - 1][k - 1] + ints[n - 1][k];
    }
    BinomialTable t{};
    for (int n = 0; n <= kMaxBinomialDegree; ++n)
      for (int k = 0; k <= n; ++k) t[n][k] = static_cast<double>(ints[n][k]);
    return t;
  }();
  return table;
}

double int_pow(double x, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

void check_degree(int mu) {
  if (mu < 0 || mu > kMaxBinomialDegree)
    throw std::invalid_argument("Bernstein degree out of supported range [0, 12]");
}

}  // namespace

int numerical_rank(const Vector& s, double eps, double floor) {
  const int n = static_cast<int>(s.size());
  if (n == 0 || !(s(0) > floor)) return 0;
  for (int k = 1; k < n; ++k) {
    if (!(s(k) > floor)) return k;
    if (s(k) / s(k - 1) < eps) return k;
  }
  return n;
}

double binomial(int n, int k) {
  check_degree(n);
  if (k < 0 || k > n) return 0.0;
  return pascal_triangle()[n][k];
}

double bernstein_eval(BernsteinIndex idx, double xi) {
  if (!idx.valid()) {
    std::ostringstream msg;
    msg << "Bernstein index i=" << idx.i << " invalid for degree " << idx.mu;
    throw std::invalid_argument(msg.str());
  }
  check_degree(idx.mu);
  return binomial(idx.mu, idx.i - 1) * int_pow(xi, idx.i - 1) * int_pow(1.0 - xi, idx.mu - idx.i + 1);
}

Vector bernstein_all(int mu, double xi) {
  check_degree(mu);
  // Triangle recurrence: stable and exact at the end points.
  Vector b = Vector::Zero(mu + 1);
  b(0) = 1.0;
  const double s = 1.0 - xi;
  for (int d = 1; d <= mu; ++d) {
    double saved = 0.0;
    for (int k = 0; k < d; ++k) {
      const double tmp = b(k);
      b(k) = saved + s * tmp;
      saved = xi * tmp;
    }
    b(d) = saved;
  }
  return b;
}

BernsteinProduct bernstein_product(BernsteinIndex a, BernsteinIndex b) {
  if (!a.valid() || !b.valid())
    throw std::invalid_argument("Bernstein product of invalid indices");
  const int degree = a.mu + b.mu;
  check_degree(degree);
  const double c = binomial(a.mu, a.i - 1) * binomial(b.mu, b.i - 1) /
                   binomial(degree, a.i + b.i - 2);
  return {BernsteinIndex{a.i + b.i - 1, degree}, c};
}

// --- RationalBezierPatch ----------------------------------------------------

RationalBezierPatch::RationalBezierPatch(std::array<int, 2> degree, std::vector<Vec3> points,
                                         std::vector<double> weights)
    : degree_(degree), points_(std::move(points)), weights_(std::move(weights)) {
  for (int d : degree_)
    if (d < 0 || d > kMaxPatchDegree)
      throw std::invalid_argument("patch degree must lie in [0, 10]");
  const std::size_t expected = static_cast<std::size_t>(degree_[0] + 1) * (degree_[1] + 1);
  if (points_.size() != expected || weights_.size() != expected) {
    std::ostringstream msg;
    msg << "patch of degree (" << degree_[0] << "," << degree_[1] << ") needs " << expected
        << " control points and weights, got " << points_.size() << " and " << weights_.size();
    throw std::invalid_argument(msg.str());
  }
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("patch weights must be finite and strictly positive");
  for (const Vec3& p : points_)
    if (!p.allFinite()) throw std::invalid_argument("patch control point is not finite");
}

RationalBezierPatch RationalBezierPatch::polynomial(std::array<int, 2> degree,
                                                    std::vector<Vec3> points) {
  std::vector<double> w(points.size(), 1.0);
  return RationalBezierPatch(degree, std::move(points), std::move(w));
}

Vec4 RationalBezierPatch::homogeneous(int i1, int i2) const {
  return homogeneous(flat_index(i1, i2));
}

Vec4 RationalBezierPatch::homogeneous(std::size_t k) const {
  const double w = weights_[k];
  return Vec4(w * points_[k].x(), w * points_[k].y(), w * points_[k].z(), w);
}

Vec3 RationalBezierPatch::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : points_) c += p;
  return points_.empty() ? c : Vec3(c / static_cast<double>(points_.size()));
}

double RationalBezierPatch::diameter() const {
  if (points_.empty()) return 0.0;
  Vec3 lo = points_.front(), hi = points_.front();
  for (const Vec3& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

Vec4 patch_eval_homogeneous(const RationalBezierPatch& patch, const Vec2& theta) {
  const auto [m1, m2] = patch.degree();
  const Vector b1 = bernstein_all(m1, theta(0));
  const Vector b2 = bernstein_all(m2, theta(1));
  Vec4 f = Vec4::Zero();
  for (int i2 = 0; i2 <= m2; ++i2) {
    Vec4 row = Vec4::Zero();
    for (int i1 = 0; i1 <= m1; ++i1) row += b1(i1) * patch.homogeneous(i1, i2);
    f += b2(i2) * row;
  }
  return f;
}

Vec3 patch_eval(const RationalBezierPatch& patch, const Vec2& theta) {
  const Vec4 f = patch_eval_homogeneous(patch, theta);
  if (std::abs(f(3)) <= std::numeric_limits<double>::min()) {
    std::ostringstream msg;
    msg << "base point at theta=(" << theta(0) << "," << theta(1) << ")";
    throw BasePointError(msg.str(), theta);
  }
  return f.head<3>() / f(3);
}

PatchDerivatives patch_derivatives(const RationalBezierPatch& patch, const Vec2& theta) {
  const auto [m1, m2] = patch.degree();
  const Vector b1 = bernstein_all(m1, theta(0));
  const Vector b2 = bernstein_all(m2, theta(1));
  const Vector db1 = m1 > 0 ? bernstein_all(m1 - 1, theta(0)) : Vector();
  const Vector db2 = m2 > 0 ? bernstein_all(m2 - 1, theta(1)) : Vector();

  Vec4 f = Vec4::Zero(), f1 = Vec4::Zero(), f2 = Vec4::Zero();
  for (int i2 = 0; i2 <= m2; ++i2)
    for (int i1 = 0; i1 <= m1; ++i1) f += b1(i1) * b2(i2) * patch.homogeneous(i1, i2);
  // Hodographs of the homogeneous net.
  for (int i2 = 0; i2 <= m2; ++i2)
    for (int i1 = 0; i1 < m1; ++i1)
      f1 += m1 * db1(i1) * b2(i2) * (patch.homogeneous(i1 + 1, i2) - patch.homogeneous(i1, i2));
  for (int i2 = 0; i2 < m2; ++i2)
    for (int i1 = 0; i1 <= m1; ++i1)
      f2 += m2 * b1(i1) * db2(i2) * (patch.homogeneous(i1, i2 + 1) - patch.homogeneous(i1, i2));

  if (std::abs(f(3)) <= std::numeric_limits<double>::min())
    throw BasePointError("base point in derivative evaluation", theta);
  PatchDerivatives out;
  out.point = f.head<3>() / f(3);
  out.d1 = (f1.head<3>() - out.point * f1(3)) / f(3);
  out.d2 = (f2.head<3>() - out.point * f2(3)) / f(3);
  return out;
}

Vec3 average_normal(const RationalBezierPatch& patch) {
  Vec3 sum = Vec3::Zero();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const PatchDerivatives d = patch_derivatives(patch, Vec2(0.5 * a, 0.5 * b));
      const Vec3 n = d.d1.cross(d.d2);
      const double len = n.norm();
      if (len > 0.0 && std::isfinite(len)) sum += n / len;
    }
  const double len = sum.norm();
  return len > 1e-12 ? Vec3(sum / len) : Vec3::Zero();
}

// --- BezierCurve --------------------------------------------------------------

BezierCurve::BezierCurve(int degree, std::vector<Vec3> points, std::vector<double> weights)
    : patch_({degree, 0}, std::move(points), std::move(weights)) {}

Vec3 curve_eval(const BezierCurve& curve, double theta) {
  return patch_eval(curve.as_patch(), Vec2(theta, 0.0));
}

}  // namespace lsk
