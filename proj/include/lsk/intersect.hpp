#pragma once

#include "lsk/implicitize.hpp"
#include "lsk/pencil.hpp"

#include <optional>

namespace lsk {

/// r(xi) = c0 + c1 xi on [lo, hi].
struct ParametricLine {
  Vec3 c0 = Vec3::Zero();
  Vec3 c1 = Vec3::UnitX();
  std::array<double, 2> domain{0.0, 1.0};

  ParametricLine() = default;
  ParametricLine(Vec3 origin, Vec3 direction, std::array<double, 2> dom = {0.0, 1.0});
  static ParametricLine through(const Vec3& a, const Vec3& b);

  Vec3 operator()(double xi) const { return c0 + c1 * xi; }
};

/// r(xi) = c0 + c1 xi + c2 xi^2 on [lo, hi].
struct ParametricQuadratic {
  Vec3 c0 = Vec3::Zero();
  Vec3 c1 = Vec3::UnitX();
  Vec3 c2 = Vec3::Zero();
  std::array<double, 2> domain{0.0, 1.0};

  ParametricQuadratic() = default;
  ParametricQuadratic(Vec3 a0, Vec3 a1, Vec3 a2, std::array<double, 2> dom = {0.0, 1.0});

  Vec3 operator()(double xi) const { return c0 + (c1 + c2 * xi) * xi; }
};

struct IntersectionRecord {
  double xi = 0.0;
  /// Patch parameters; the second entry is 0 for curves.
  Vec2 theta = Vec2::Zero();
  Vec3 point = Vec3::Zero();
  int patch_id = 0;
  int multiplicity_hint = 1;
  bool self_intersection = false;
};

struct IntersectOptions {
  PencilOptions pencil;
  /// Slack on the curve domain and on the unit parameter square.
  double domain_tol = 1e-8;
  /// Roots closer than dedup_tol (1 + |xi|) are merged.
  double dedup_tol = 1e-8;
  /// Accept a record when |patch_eval(theta) - r(xi)| <= roundtrip_tol * diameter.
  double roundtrip_tol = 1e-7;
};

MatrixPencil pencil_from_line(const MRep& m, const ParametricLine& line);

/// Companion linearisation [[0, I], [M0, M1]] - xi [[I, 0], [0, -M2]].
MatrixPencil pencil_from_quadratic(const MRep& m, const ParametricQuadratic& q);

struct ThetaCandidates {
  std::vector<Vec2> thetas;
  bool self_intersection = false;
};

/// Patch parameters of a point on the implicit surface, from the left null
/// space of M(x). Throws NotOnSurface when M(x) has no rank drop and
/// DegenerateParameterization when no usable ratio exists.
ThetaCandidates param_from_point(const MRep& m, const RationalBezierPatch& patch,
                                 const Vec3& x_star, RankTolerance tol = {});

std::vector<IntersectionRecord> intersect_patch_line(const RationalBezierPatch& patch,
                                                     const MRep& m,
                                                     const ParametricLine& line,
                                                     const IntersectOptions& opt = {},
                                                     int patch_id = 0);

std::vector<IntersectionRecord> intersect_patch_line(const RationalBezierPatch& patch,
                                                     const ParametricLine& line,
                                                     const IntersectOptions& opt = {},
                                                     int patch_id = 0);

std::vector<IntersectionRecord> intersect_patch_quadratic(const RationalBezierPatch& patch,
                                                          const MRep& m,
                                                          const ParametricQuadratic& q,
                                                          const IntersectOptions& opt = {},
                                                          int patch_id = 0);

std::vector<IntersectionRecord> intersect_curve_line(const BezierCurve& curve,
                                                     const ParametricLine& line,
                                                     const IntersectOptions& opt = {});

std::vector<IntersectionRecord> intersect_curve_line(const BezierCurve& curve,
                                                     const AuxBasisSpec& aux,
                                                     const ParametricLine& line,
                                                     const IntersectOptions& opt = {});

/// Merges records from several patches that describe the same crossing
/// (shared seams): same xi within dedup_tol and same point within point_tol.
std::vector<IntersectionRecord> dedup_records(std::vector<IntersectionRecord> records,
                                              double dedup_tol, double point_tol);

}  // namespace lsk
