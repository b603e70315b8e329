#pragma once

#include "lsk/kdop.hpp"

#include <map>
#include <vector>

namespace lsk {

struct BvhNode {
  KDopBounds bounds;
  std::vector<int> children;   // indices into Bvh::nodes, empty for a leaf
  std::vector<int> patch_ids;  // leaf payload
  int depth = 0;

  bool is_leaf() const noexcept { return children.empty(); }
};

/// Flat k-dop tree over a patch list. nodes[0] is the root.
struct Bvh {
  DirectionSet dirs;
  std::vector<BvhNode> nodes;
  /// Control-net bounds of each input patch, in input order.
  std::vector<KDopBounds> patch_bounds;

  const BvhNode& root() const { return nodes.front(); }
};

/// Octant split about the per-axis median patch centroid until a node holds
/// at most max_leaf patches or a split no longer separates them.
Bvh build_bvh(std::span<const RationalBezierPatch> patches, const DirectionSet& dirs,
              int max_leaf = 4);

/// Ids (ascending) of every patch whose bounds overlap the k-dop of the
/// segment's endpoints.
std::vector<int> query_segment(const Bvh& bvh, const Vec3& a, const Vec3& b);

struct BvhStats {
  int nodes = 0;
  int leaves = 0;
  int depth = 0;
  std::map<int, int> leaf_occupancy;  // patches per leaf -> leaf count
};

BvhStats bvh_stats(const Bvh& bvh);

}  // namespace lsk
