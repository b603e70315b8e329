#pragma once

#include "lsk/intersect.hpp"

#include <random>

namespace lsk {

/// Closed C0 surface of biquadratic patches approximating a sphere: every
/// face of the enclosing cube is split into n x n patches whose control
/// points are projected radially onto the sphere. 6 n^2 patches.
std::vector<RationalBezierPatch> cube_sphere(const Vec3& centre, double radius, int n);

/// Bicubic patch over [0,1]^2 in the xy-plane with perturbed control points
/// and weights in [0.5, 2].
RationalBezierPatch random_cubic_patch(std::mt19937_64& rng);

struct TransversalCase {
  RationalBezierPatch patch;
  ParametricLine line;
  Vec2 theta;  // parameter of the constructed crossing
};

/// Segment of length ~1 through patch_eval(theta), theta in [0.05, 0.95]^2,
/// roughly along the surface normal.
TransversalCase random_transversal_case(std::mt19937_64& rng);

}  // namespace lsk
