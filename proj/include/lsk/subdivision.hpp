#pragma once

#include "lsk/intersect.hpp"
#include "lsk/kdop.hpp"

#include <utility>

namespace lsk {

struct FlatnessTolerance {
  double tol = 1e-6;

  FlatnessTolerance() = default;
  explicit FlatnessTolerance(double t) : tol(t) {
    if (!(t > 0.0)) throw std::invalid_argument("flatness tolerance must be positive");
  }
};

/// De Casteljau split of the homogeneous net at `at` along direction 1 or 2.
std::pair<RationalBezierPatch, RationalBezierPatch> split_patch(const RationalBezierPatch& patch,
                                                                int direction, double at = 0.5);

/// Support-height spread of the control net along the sampled average normal.
double flatness_spread(const RationalBezierPatch& patch);

bool is_flat(const RationalBezierPatch& patch, FlatnessTolerance ftol);

struct SubdivisionStats {
  int max_depth = 0;
  long long visited = 0;
  long long flat_leaves = 0;
  std::size_t peak_patches = 0;
  std::size_t peak_bytes = 0;
};

/// Recursive midpoint subdivision until flat, then two corner triangles per
/// leaf against the segment line(domain). Throws ToleranceUnreachable past
/// depth 60.
std::vector<IntersectionRecord> subdivision_intersect(const RationalBezierPatch& patch,
                                                      const ParametricLine& line,
                                                      FlatnessTolerance ftol,
                                                      SubdivisionStats* stats = nullptr,
                                                      int patch_id = 0);

}  // namespace lsk
