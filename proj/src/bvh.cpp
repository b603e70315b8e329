#include "lsk/bvh.hpp"

#include <algorithm>

namespace lsk {

namespace {

struct Builder {
  const std::vector<Vec3>& centroids;
  Bvh& bvh;
  int max_leaf;

  int build(std::vector<int> ids, int depth) {
    const int index = static_cast<int>(bvh.nodes.size());
    bvh.nodes.emplace_back();
    bvh.nodes[index].depth = depth;

    KDopBounds bounds = KDopBounds::empty(bvh.dirs.size());
    for (int id : ids) bounds.merge(bvh.patch_bounds[id]);
    bvh.nodes[index].bounds = std::move(bounds);

    if (static_cast<int>(ids.size()) <= max_leaf) {
      bvh.nodes[index].patch_ids = std::move(ids);
      return index;
    }

    Vec3 median;
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<double> c;
      c.reserve(ids.size());
      for (int id : ids) c.push_back(centroids[id](axis));
      auto mid = c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2);
      std::nth_element(c.begin(), mid, c.end());
      median(axis) = *mid;
    }

    std::array<std::vector<int>, 8> octants;
    for (int id : ids) {
      int o = 0;
      for (int axis = 0; axis < 3; ++axis)
        if (centroids[id](axis) >= median(axis)) o |= 1 << axis;
      octants[o].push_back(id);
    }
    const auto largest = std::max_element(octants.begin(), octants.end(),
                                          [](const auto& a, const auto& b) { return a.size() < b.size(); });
    if (largest->size() == ids.size()) {
      bvh.nodes[index].patch_ids = std::move(ids);
      return index;
    }

    std::vector<int> children;
    for (auto& oct : octants)
      if (!oct.empty()) children.push_back(build(std::move(oct), depth + 1));
    bvh.nodes[index].children = std::move(children);
    return index;
  }
};

}  // namespace

Bvh build_bvh(std::span<const RationalBezierPatch> patches, const DirectionSet& dirs,
              int max_leaf) {
  if (patches.empty()) throw std::invalid_argument("cannot build a BVH over no patches");
  if (max_leaf < 1) throw std::invalid_argument("max_leaf must be positive");

  Bvh bvh;
  bvh.dirs = dirs;
  std::vector<Vec3> centroids;
  centroids.reserve(patches.size());
  bvh.patch_bounds.reserve(patches.size());
  for (const auto& p : patches) {
    bvh.patch_bounds.push_back(support_heights(p.points(), dirs));
    centroids.push_back(p.centroid());
  }

  std::vector<int> ids(patches.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  Builder{centroids, bvh, max_leaf}.build(std::move(ids), 0);
  return bvh;
}

std::vector<int> query_segment(const Bvh& bvh, const Vec3& a, const Vec3& b) {
  const std::array<Vec3, 2> ends{a, b};
  const KDopBounds seg = support_heights(ends, bvh.dirs);

  std::vector<int> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const BvhNode& node = bvh.nodes[stack.back()];
    stack.pop_back();
    if (!kdops_overlap(node.bounds, seg)) continue;
    if (node.is_leaf()) {
      for (int id : node.patch_ids)
        if (kdops_overlap(bvh.patch_bounds[id], seg)) out.push_back(id);
    } else {
      stack.insert(stack.end(), node.children.begin(), node.children.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BvhStats bvh_stats(const Bvh& bvh) {
  BvhStats s;
  s.nodes = static_cast<int>(bvh.nodes.size());
  for (const auto& n : bvh.nodes) {
    s.depth = std::max(s.depth, n.depth);
    if (n.is_leaf()) {
      ++s.leaves;
      ++s.leaf_occupancy[static_cast<int>(n.patch_ids.size())];
    }
  }
  return s;
}

}  // namespace lsk
