#pragma once

#include "lsk/bezier.hpp"

#include <span>
#include <vector>

namespace lsk {

/// k fixed unit directions (k >= 6). Duplicates are allowed.
class DirectionSet {
 public:
  DirectionSet() = default;
  /// Normalises each direction. Throws std::invalid_argument when k < 6 or a
  /// direction is (numerically) zero.
  explicit DirectionSet(std::vector<Vec3> directions);

  /// +-x, +-y, +-z: the classic axis-aligned box.
  static DirectionSet axis_aligned();

  /// 14-dop: six axis directions, +-normal, and +- each column of
  /// `lattice_axes`.
  static DirectionSet fourteen(const Vec3& average_normal, const Eigen::Matrix3d& lattice_axes);

  std::size_t size() const noexcept { return dirs_.size(); }
  const Vec3& operator[](std::size_t j) const { return dirs_[j]; }
  std::span<const Vec3> directions() const noexcept { return dirs_; }

 private:
  std::vector<Vec3> dirs_;
};

/// Support heights of a point set along each direction.
struct KDopBounds {
  std::vector<double> h_min;
  std::vector<double> h_max;

  std::size_t size() const noexcept { return h_min.size(); }
  /// Bounds with +inf/-inf so that merging starts from nothing.
  static KDopBounds empty(std::size_t k);
  void merge(const KDopBounds& other);
  bool contains(const KDopBounds& other, double slack = 0.0) const;
};

KDopBounds support_heights(std::span<const Vec3> points, const DirectionSet& dirs);

/// Overlap test on support heights; throws std::invalid_argument when k differs.
bool kdops_overlap(const KDopBounds& a, const KDopBounds& b);

/// Average of per-patch sampled normals over a patch set (see average_normal).
/// Falls back to (1,1,1)/sqrt(3) when the normals cancel, as they do for
/// closed surfaces.
Vec3 surface_average_normal(std::span<const RationalBezierPatch> patches);

}  // namespace lsk
