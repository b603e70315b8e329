#include "lsk/kdop.hpp"

#include <cmath>
#include <limits>

namespace lsk {

DirectionSet::DirectionSet(std::vector<Vec3> directions) : dirs_(std::move(directions)) {
  if (dirs_.size() < 6) throw std::invalid_argument("a k-dop needs at least 6 directions");
  for (Vec3& d : dirs_) {
    const double n = d.norm();
    if (!(n > 1e-300) || !std::isfinite(n))
      throw std::invalid_argument("k-dop direction must be non-zero and finite");
    d /= n;
  }
}

DirectionSet DirectionSet::axis_aligned() {
  return DirectionSet({Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(),
                       Vec3::UnitZ(), -Vec3::UnitZ()});
}

DirectionSet DirectionSet::fourteen(const Vec3& average_normal,
                                    const Eigen::Matrix3d& lattice_axes) {
  Vec3 n = average_normal;
  if (!(n.norm() > 1e-12)) n = Vec3::Ones();
  std::vector<Vec3> d{Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitY(),
                      Vec3::UnitZ(), -Vec3::UnitZ(), n, -n};
  for (int c = 0; c < 3; ++c) {
    d.emplace_back(lattice_axes.col(c));
    d.emplace_back(-lattice_axes.col(c));
  }
  return DirectionSet(std::move(d));
}

KDopBounds KDopBounds::empty(std::size_t k) {
  KDopBounds b;
  b.h_min.assign(k, std::numeric_limits<double>::infinity());
  b.h_max.assign(k, -std::numeric_limits<double>::infinity());
  return b;
}

void KDopBounds::merge(const KDopBounds& other) {
  for (std::size_t j = 0; j < h_min.size(); ++j) {
    h_min[j] = std::min(h_min[j], other.h_min[j]);
    h_max[j] = std::max(h_max[j], other.h_max[j]);
  }
}

bool KDopBounds::contains(const KDopBounds& other, double slack) const {
  if (other.size() != size()) return false;
  for (std::size_t j = 0; j < h_min.size(); ++j)
    if (other.h_min[j] < h_min[j] - slack || other.h_max[j] > h_max[j] + slack) return false;
  return true;
}

KDopBounds support_heights(std::span<const Vec3> points, const DirectionSet& dirs) {
  if (points.empty()) throw std::invalid_argument("support heights of an empty point set");
  KDopBounds b = KDopBounds::empty(dirs.size());
  for (const Vec3& x : points)
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const double h = x.dot(dirs[j]);
      b.h_min[j] = std::min(b.h_min[j], h);
      b.h_max[j] = std::max(b.h_max[j], h);
    }
  return b;
}

bool kdops_overlap(const KDopBounds& a, const KDopBounds& b) {
  if (a.size() != b.size()) throw std::invalid_argument("k-dops with different k");
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a.h_max[j] < b.h_min[j] || b.h_max[j] < a.h_min[j]) return false;
  return true;
}

Vec3 surface_average_normal(std::span<const RationalBezierPatch> patches) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : patches)
    if (!p.is_curve()) sum += average_normal(p);
  const double len = sum.norm();
  if (len > 1e-6 * std::max<double>(1.0, static_cast<double>(patches.size())))
    return sum / len;
  return Vec3::Ones().normalized();
}

}  // namespace lsk
