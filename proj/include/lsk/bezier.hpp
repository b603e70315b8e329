#pragma once

#include "lsk/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace lsk {

/// Largest degree the binomial table (and therefore every Bernstein
/// evaluation or product) supports.
inline constexpr int kMaxBinomialDegree = 12;
/// Largest per-direction degree accepted for patch evaluation.
inline constexpr int kMaxPatchDegree = 10;

/// Exact binomial coefficient from a cached Pascal triangle, 0 <= k <= n <= 12.
double binomial(int n, int k);

/// 1-based Bernstein index: B_i^mu with 1 <= i <= mu + 1.
struct BernsteinIndex {
  int i = 1;
  int mu = 0;

  bool valid() const noexcept { return mu >= 0 && i >= 1 && i <= mu + 1; }
  friend bool operator==(const BernsteinIndex&, const BernsteinIndex&) = default;
};

double bernstein_eval(BernsteinIndex idx, double xi);

/// All mu+1 Bernstein values of degree mu at xi (0-based storage).
Vector bernstein_all(int mu, double xi);

struct BernsteinProduct {
  BernsteinIndex index;
  double coefficient = 0.0;
};

/// B_i^lambda * B_j^mu = c * B_{i+j-1}^{lambda+mu}.
BernsteinProduct bernstein_product(BernsteinIndex a, BernsteinIndex b);

/// Rational tensor-product Bezier patch of bi-degree (mu1, mu2).
///
/// Control data is stored row-major by the first parametric index: the
/// 1-based multi-index (i1, i2) maps to flat position
/// k = (i2 - 1)(mu1 + 1) + i1, i.e. 0-based `i2 * (mu1 + 1) + i1`. The matrix
/// layouts built by the implicitisation code rely on this ordering.
///
/// A curve is the special case mu2 == 0.
class RationalBezierPatch {
 public:
  RationalBezierPatch() = default;
  RationalBezierPatch(std::array<int, 2> degree, std::vector<Vec3> points,
                      std::vector<double> weights);

  /// Unit weights.
  static RationalBezierPatch polynomial(std::array<int, 2> degree,
                                        std::vector<Vec3> points);

  const std::array<int, 2>& degree() const noexcept { return degree_; }
  int count(int dir) const noexcept { return degree_[dir] + 1; }
  std::size_t size() const noexcept { return points_.size(); }
  bool is_curve() const noexcept { return degree_[1] == 0; }

  std::size_t flat_index(int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i2) * static_cast<std::size_t>(degree_[0] + 1) +
           static_cast<std::size_t>(i1);
  }

  const Vec3& point(int i1, int i2) const { return points_[flat_index(i1, i2)]; }
  double weight(int i1, int i2) const { return weights_[flat_index(i1, i2)]; }
  Vec4 homogeneous(int i1, int i2) const;
  Vec4 homogeneous(std::size_t k) const;

  std::span<const Vec3> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Mean of the control points.
  Vec3 centroid() const;
  /// Diagonal of the axis-aligned box of the control net.
  double diameter() const;

 private:
  std::array<int, 2> degree_{0, 0};
  std::vector<Vec3> points_;
  std::vector<double> weights_;
};

/// Homogeneous point (w x, w) at theta.
Vec4 patch_eval_homogeneous(const RationalBezierPatch& patch, const Vec2& theta);

/// Cartesian point at theta. Parameters outside the unit square extrapolate;
/// a vanishing weight coordinate raises BasePointError.
Vec3 patch_eval(const RationalBezierPatch& patch, const Vec2& theta);

struct PatchDerivatives {
  Vec3 point;
  Vec3 d1;
  Vec3 d2;
};

PatchDerivatives patch_derivatives(const RationalBezierPatch& patch, const Vec2& theta);

/// Normalised sum of unit normals sampled on a 3x3 parameter grid; zero when
/// every sample is degenerate.
Vec3 average_normal(const RationalBezierPatch& patch);

/// Rational Bezier curve of degree mu. Stored as a (mu, 0) patch.
class BezierCurve {
 public:
  BezierCurve() = default;
  BezierCurve(int degree, std::vector<Vec3> points, std::vector<double> weights);

  int degree() const noexcept { return patch_.degree()[0]; }
  const RationalBezierPatch& as_patch() const noexcept { return patch_; }
  std::span<const Vec3> points() const noexcept { return patch_.points(); }
  std::span<const double> weights() const noexcept { return patch_.weights(); }

 private:
  RationalBezierPatch patch_;
};

Vec3 curve_eval(const BezierCurve& curve, double theta);

/// Tensor-product (rational) B-spline surface with clamped knot vectors.
/// The control net is stored like patches: first index fastest.
struct TensorBSplineSurface {
  std::array<int, 2> degree{0, 0};
  std::array<std::vector<double>, 2> knots;
  std::array<int, 2> net_size{0, 0};
  std::vector<Vec3> points;
  std::vector<double> weights;

  /// Throws std::invalid_argument on inconsistent sizes or decreasing knots.
  void validate() const;
};

/// Bezier extraction by knot insertion: one patch per non-empty knot span,
/// ordered with the first-direction span index fastest.
std::vector<RationalBezierPatch> bspline_to_bezier(const TensorBSplineSurface& surface);

}  // namespace lsk
