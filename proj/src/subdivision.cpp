#include "lsk/subdivision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lsk {

namespace {

constexpr int kMaxDepth = 60;

RationalBezierPatch from_homogeneous(std::array<int, 2> degree, const std::vector<Vec4>& h) {
  std::vector<Vec3> pts;
  std::vector<double> ws;
  pts.reserve(h.size());
  ws.reserve(h.size());
  for (const Vec4& v : h) {
    pts.emplace_back(v.head<3>() / v(3));
    ws.push_back(v(3));
  }
  return RationalBezierPatch(degree, std::move(pts), std::move(ws));
}

struct Item {
  RationalBezierPatch patch;
  Vec2 lo;
  Vec2 hi;
  int depth;
};

DirectionSet segment_directions(const Vec3& d) {
  const Vec3 u = d.normalized();
  Vec3 e1 = u.cross(Vec3::UnitX());
  if (e1.norm() < 0.5) e1 = u.cross(Vec3::UnitY());
  e1.normalize();
  const Vec3 e2 = u.cross(e1).normalized();
  return DirectionSet({Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(), Vec3::UnitZ(),
                       -Vec3::UnitZ(), e1, -e1, e2, -e2});
}

// Moller-Trumbore; returns (xi, u, v) when the segment crosses the triangle.
std::optional<Vec3> hit_triangle(const ParametricLine& line, const Vec3& p0, const Vec3& p1,
                                 const Vec3& p2) {
  const double eps = 1e-12;
  const Vec3 e1 = p1 - p0;
  const Vec3 e2 = p2 - p0;
  const Vec3 pv = line.c1.cross(e2);
  const double det = e1.dot(pv);
  const double scale = line.c1.norm() * e1.norm() * e2.norm();
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 tv = line.c0 - p0;
  const double u = tv.dot(pv) * inv;
  if (u < -eps || u > 1.0 + eps) return std::nullopt;
  const Vec3 qv = tv.cross(e1);
  const double v = line.c1.dot(qv) * inv;
  if (v < -eps || u + v > 1.0 + eps) return std::nullopt;
  const double xi = e2.dot(qv) * inv;
  if (xi < line.domain[0] - eps || xi > line.domain[1] + eps) return std::nullopt;
  return Vec3(xi, u, v);
}

// Closest approach between the segment and a chord (curve leaves).
std::optional<Vec2> hit_chord(const ParametricLine& line, const Vec3& a, const Vec3& b,
                              double ftol) {
  const Vec3 d1 = line.c1;
  const Vec3 d2 = b - a;
  const Vec3 r = line.c0 - a;
  const double A = d1.dot(d1), B = d1.dot(d2), C = d2.dot(d2), D = d1.dot(r), E = d2.dot(r);
  const double den = A * C - B * B;
  if (den <= 1e-14 * A * C) return std::nullopt;
  const double s = (B * E - C * D) / den;
  const double t = (A * E - B * D) / den;
  if (t < -1e-12 || t > 1.0 + 1e-12) return std::nullopt;
  if (s < line.domain[0] - 1e-12 || s > line.domain[1] + 1e-12) return std::nullopt;
  if ((line(s) - (a + t * d2)).norm() > ftol) return std::nullopt;
  return Vec2(s, t);
}

}  // namespace

std::pair<RationalBezierPatch, RationalBezierPatch> split_patch(const RationalBezierPatch& patch,
                                                                int direction, double at) {
  if (direction != 1 && direction != 2) throw std::invalid_argument("split direction is 1 or 2");
  const int d = direction - 1;
  const auto deg = patch.degree();
  const int p = deg[d];
  const int q = deg[1 - d];
  std::vector<Vec4> left(patch.size());
  std::vector<Vec4> right(patch.size());
  std::vector<Vec4> work(static_cast<std::size_t>(p) + 1);
  for (int k = 0; k <= q; ++k) {
    for (int i = 0; i <= p; ++i) work[i] = d == 0 ? patch.homogeneous(i, k) : patch.homogeneous(k, i);
    const auto put = [&](std::vector<Vec4>& out, int i, const Vec4& v) {
      out[d == 0 ? patch.flat_index(i, k) : patch.flat_index(k, i)] = v;
    };
    put(left, 0, work[0]);
    put(right, p, work[p]);
    for (int r = 1; r <= p; ++r) {
      for (int i = 0; i <= p - r; ++i) work[i] = (1.0 - at) * work[i] + at * work[i + 1];
      put(left, r, work[0]);
      put(right, p - r, work[p - r]);
    }
  }
  return {from_homogeneous(deg, left), from_homogeneous(deg, right)};
}

double flatness_spread(const RationalBezierPatch& patch) {
  if (patch.is_curve()) {
    const auto pts = patch.points();
    const Vec3 a = pts.front();
    const Vec3 chord = pts.back() - a;
    const double len = chord.norm();
    double h = 0.0;
    for (const Vec3& x : pts)
      h = std::max(h, len > 0.0 ? (x - a).cross(chord).norm() / len : (x - a).norm());
    return h;
  }
  const Vec3 n = average_normal(patch);
  if (!(n.norm() > 0.5)) return patch.diameter();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec3& x : patch.points()) {
    const double h = x.dot(n);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return hi - lo;
}

bool is_flat(const RationalBezierPatch& patch, FlatnessTolerance ftol) {
  return flatness_spread(patch) <= ftol.tol;
}

std::vector<IntersectionRecord> subdivision_intersect(const RationalBezierPatch& patch,
                                                      const ParametricLine& line,
                                                      FlatnessTolerance ftol,
                                                      SubdivisionStats* stats, int patch_id) {
  const DirectionSet dirs = segment_directions(line.c1);
  const std::array<Vec3, 2> ends{line(line.domain[0]), line(line.domain[1])};
  const KDopBounds seg = support_heights(ends, dirs);
  const bool curve = patch.is_curve();
  const std::size_t item_bytes = sizeof(Item) + patch.size() * (sizeof(Vec3) + sizeof(double));

  SubdivisionStats local;
  std::vector<IntersectionRecord> hits;
  std::vector<Item> stack;
  stack.push_back({patch, Vec2(0.0, 0.0), Vec2(1.0, 1.0), 0});
  local.peak_patches = 1;

  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    ++local.visited;
    local.max_depth = std::max(local.max_depth, item.depth);
    const RationalBezierPatch& P = item.patch;

    if (!kdops_overlap(support_heights(P.points(), dirs), seg)) continue;

    if (is_flat(P, ftol)) {
      ++local.flat_leaves;
      const auto [p1, p2] = P.degree();
      if (curve) {
        if (auto h = hit_chord(line, P.point(0, 0), P.point(p1, 0), ftol.tol)) {
          IntersectionRecord rec;
          rec.xi = (*h)(0);
          rec.theta = Vec2(item.lo(0) + (*h)(1) * (item.hi(0) - item.lo(0)), 0.0);
          rec.point = line(rec.xi);
          rec.patch_id = patch_id;
          hits.push_back(rec);
        }
        continue;
      }
      const Vec3 q00 = P.point(0, 0), q10 = P.point(p1, 0), q11 = P.point(p1, p2),
                 q01 = P.point(0, p2);
      const Vec2 t00 = item.lo, t10(item.hi(0), item.lo(1)), t11 = item.hi,
                 t01(item.lo(0), item.hi(1));
      const std::array<std::array<Vec3, 3>, 2> tri{{{q00, q10, q11}, {q00, q11, q01}}};
      const std::array<std::array<Vec2, 3>, 2> par{{{t00, t10, t11}, {t00, t11, t01}}};
      for (int k = 0; k < 2; ++k) {
        if (auto h = hit_triangle(line, tri[k][0], tri[k][1], tri[k][2])) {
          IntersectionRecord rec;
          rec.xi = (*h)(0);
          rec.theta = par[k][0] + (*h)(1) * (par[k][1] - par[k][0]) +
                      (*h)(2) * (par[k][2] - par[k][0]);
          rec.point = line(rec.xi);
          rec.patch_id = patch_id;
          hits.push_back(rec);
        }
      }
      continue;
    }

    if (item.depth >= kMaxDepth)
      throw ToleranceUnreachable("subdivision exceeded depth 60 (near-tangential configuration)");

    const int axis = curve ? 0 : item.depth % 2;
    auto [a, b] = split_patch(P, axis + 1, 0.5);
    const double mid = 0.5 * (item.lo(axis) + item.hi(axis));
    Vec2 a_hi = item.hi;
    Vec2 b_lo = item.lo;
    a_hi(axis) = mid;
    b_lo(axis) = mid;
    stack.push_back({std::move(b), b_lo, item.hi, item.depth + 1});
    stack.push_back({std::move(a), item.lo, a_hi, item.depth + 1});
    local.peak_patches = std::max(local.peak_patches, stack.size());
  }

  std::sort(hits.begin(), hits.end(),
            [](const IntersectionRecord& x, const IntersectionRecord& y) { return x.xi < y.xi; });
  std::vector<IntersectionRecord> merged;
  for (const auto& h : hits)
    if (merged.empty() || (h.point - merged.back().point).norm() > ftol.tol) merged.push_back(h);

  local.peak_bytes = local.peak_patches * item_bytes;
  if (stats) *stats = local;
  return merged;
}

}  // namespace lsk
