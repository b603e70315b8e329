#include "lsk/bezier.hpp"

#include <algorithm>
#include <sstream>

namespace lsk {

namespace {

// One pass of Boehm insertion of knot t on homogeneous control points.
void insert_knot(int p, std::vector<double>& knots, std::vector<Vec4>& ctrl, double t) {
  const int n = static_cast<int>(ctrl.size());
  const auto upper = std::upper_bound(knots.begin(), knots.end(), t);
  const int k = static_cast<int>(upper - knots.begin()) - 1;
  const int s = static_cast<int>(std::count(knots.begin(), knots.end(), t));

  std::vector<Vec4> out(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    if (i <= k - p) {
      out[i] = ctrl[i];
    } else if (i >= k - s + 1) {
      out[i] = ctrl[i - 1];
    } else {
      const double a = (t - knots[i]) / (knots[i + p] - knots[i]);
      out[i] = a * ctrl[i] + (1.0 - a) * ctrl[i - 1];
    }
  }
  knots.insert(knots.begin() + k + 1, t);
  ctrl = std::move(out);
}

bool is_clamped(int p, const std::vector<double>& knots) {
  const std::size_t m = knots.size();
  if (m < static_cast<std::size_t>(2 * (p + 1))) return false;
  for (int i = 1; i <= p; ++i) {
    if (knots[i] != knots[0]) return false;
    if (knots[m - 1 - i] != knots[m - 1]) return false;
  }
  return knots.front() < knots.back();
}

// Raise every interior knot to multiplicity p. Returns the number of spans.
int extract_curve(int p, std::vector<double> knots, std::vector<Vec4>& ctrl) {
  std::vector<double> distinct;
  for (std::size_t i = static_cast<std::size_t>(p) + 1; i + p + 1 < knots.size(); ++i)
    if (distinct.empty() || distinct.back() != knots[i]) distinct.push_back(knots[i]);
  for (double t : distinct) {
    if (t == knots.front() || t == knots.back()) continue;
    while (std::count(knots.begin(), knots.end(), t) < p) insert_knot(p, knots, ctrl, t);
  }
  return p == 0 ? static_cast<int>(ctrl.size()) : (static_cast<int>(ctrl.size()) - 1) / p;
}

}  // namespace

void TensorBSplineSurface::validate() const {
  for (int d = 0; d < 2; ++d) {
    if (degree[d] < 1 || degree[d] > kMaxPatchDegree)
      throw std::invalid_argument("B-spline degree must lie in [1, 10]");
    const auto& u = knots[d];
    if (!std::is_sorted(u.begin(), u.end()))
      throw std::invalid_argument("knot vector must be non-decreasing");
    const int expected = static_cast<int>(u.size()) - degree[d] - 1;
    if (net_size[d] != expected || expected < degree[d] + 1) {
      std::ostringstream msg;
      msg << "direction " << d + 1 << ": " << u.size() << " knots and degree " << degree[d]
          << " need " << expected << " control points, net has " << net_size[d];
      throw std::invalid_argument(msg.str());
    }
  }
  const std::size_t count = static_cast<std::size_t>(net_size[0]) * net_size[1];
  if (points.size() != count || weights.size() != count)
    throw std::invalid_argument("B-spline net size does not match point/weight count");
}

std::vector<RationalBezierPatch> bspline_to_bezier(const TensorBSplineSurface& surface) {
  surface.validate();
  for (int d = 0; d < 2; ++d)
    if (!is_clamped(surface.degree[d], surface.knots[d]))
      throw UnsupportedInput("Bezier extraction requires open (clamped) knot vectors");

  const auto [p1, p2] = surface.degree;
  const auto [n1, n2] = surface.net_size;

  std::vector<Vec4> hom(surface.points.size());
  for (std::size_t k = 0; k < hom.size(); ++k) {
    const double w = surface.weights[k];
    if (!(w > 0.0)) throw std::invalid_argument("B-spline weights must be positive");
    hom[k] << w * surface.points[k], w;
  }

  // Direction 1: refine each row of fixed second index.
  int spans1 = 0;
  int m1 = 0;
  std::vector<std::vector<Vec4>> rows(static_cast<std::size_t>(n2));
  for (int j = 0; j < n2; ++j) {
    std::vector<Vec4> row(hom.begin() + static_cast<std::ptrdiff_t>(j) * n1,
                          hom.begin() + static_cast<std::ptrdiff_t>(j + 1) * n1);
    spans1 = extract_curve(p1, surface.knots[0], row);
    m1 = static_cast<int>(row.size());
    rows[j] = std::move(row);
  }
  // Direction 2: refine each column of the row-refined net.
  int spans2 = 0;
  std::vector<std::vector<Vec4>> cols(static_cast<std::size_t>(m1));
  for (int i = 0; i < m1; ++i) {
    std::vector<Vec4> col(static_cast<std::size_t>(n2));
    for (int j = 0; j < n2; ++j) col[j] = rows[j][i];
    spans2 = extract_curve(p2, surface.knots[1], col);
    cols[i] = std::move(col);
  }

  std::vector<RationalBezierPatch> patches;
  patches.reserve(static_cast<std::size_t>(spans1) * spans2);
  for (int b = 0; b < spans2; ++b)
    for (int a = 0; a < spans1; ++a) {
      std::vector<Vec3> pts;
      std::vector<double> ws;
      for (int j = 0; j <= p2; ++j)
        for (int i = 0; i <= p1; ++i) {
          const Vec4& h = cols[a * p1 + i][b * p2 + j];
          pts.emplace_back(h.head<3>() / h(3));
          ws.push_back(h(3));
        }
      patches.emplace_back(std::array<int, 2>{p1, p2}, std::move(pts), std::move(ws));
    }
  return patches;
}

}  // namespace lsk
