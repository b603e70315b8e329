#pragma once

#include "lsk/bvh.hpp"
#include "lsk/intersect.hpp"
#include "lsk/truss.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace lsk {

enum class CellType { BCC, PYRAMIDAL, CUBIC_EDGES };

CellType parse_cell_type(const std::string& name);
std::string to_string(CellType t);

/// Rotation R = Rz(az) Ry(ay) Rx(ax), angles in degrees.
Eigen::Matrix3d rotation_from_degrees(double ax, double ay, double az);

struct LatticeSpec {
  Vec3 origin = Vec3::Zero();
  double cell_size = 1.0;
  std::array<int, 3> counts{1, 1, 1};
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  CellType cell_type = CellType::BCC;

  /// Throws std::invalid_argument on a bad cell size, counts or rotation.
  void validate() const;
  Vec3 centroid() const;
};

enum class VertexState { UNKNOWN, INSIDE, OUTSIDE, PROJECTED };
std::string to_string(VertexState s);

struct LatticeVertex {
  Vec3 x = Vec3::Zero();
  Vec3 grid = Vec3::Zero();  // position before projection
  std::array<int, 3> ijk{0, 0, 0};
  VertexState state = VertexState::UNKNOWN;
  bool inside = false;  // parity result, kept after projection
  bool alive = true;
  Vec2 theta = Vec2::Zero();
  int patch = -1;
};

struct LatticeEdge {
  int a = 0;
  int b = 0;
  int line = 0;
  bool alive = true;
};

struct LineHit {
  double s = 0.0;  // arc length from the line start
  Vec2 theta = Vec2::Zero();
  int patch = -1;
  Vec3 point = Vec3::Zero();
  int multiplicity = 1;
};

struct LatticeLine {
  int direction = 0;
  std::vector<int> vertices;  // ordered along the line
  std::vector<LineHit> hits;
  int candidates = 0;
  bool reliable = true;
  std::string error;
};

struct LatticeModel {
  LatticeSpec spec;
  std::vector<LatticeVertex> vertices;
  std::vector<LatticeEdge> edges;
  std::vector<LatticeLine> lines;
  std::vector<std::string> warnings;

  int vertex_index(int i, int j, int k) const;
  Vec3 start(const LatticeLine& l) const { return vertices[l.vertices.front()].grid; }
  Vec3 end(const LatticeLine& l) const { return vertices[l.vertices.back()].grid; }
};

LatticeModel generate_lattice(const LatticeSpec& spec);

/// Throws InputError if any control point of the surface lies outside the
/// (rotated) lattice box.
void check_containment(const LatticeSpec& spec, std::span<const RationalBezierPatch> patches);

/// 14-dop directions for a surface immersed in this lattice.
DirectionSet lattice_directions(const LatticeSpec& spec,
                                std::span<const RationalBezierPatch> patches);

struct LatticeIntersectOptions {
  IntersectOptions intersect;
  /// Seam merge distance, relative to the cell size.
  double seam_tol = 1e-6;
  int threads = 1;
};

/// Candidate patches per line through the BVH, exact hits through the implicit
/// representation. Failures mark the line unreliable instead of throwing.
void compute_intersections(LatticeModel& model, const Bvh& bvh,
                           std::span<const RationalBezierPatch> patches,
                           std::span<const MRep> mreps, const LatticeIntersectOptions& opt = {});

/// Builds one MRep per patch (in parallel).
std::vector<MRep> build_mreps(std::span<const RationalBezierPatch> patches, int threads = 1,
                              RankTolerance tol = {});

/// Parity classification, projection of the nearest vertices onto the hits and
/// removal of the remaining outside vertices. `tol` is the distance below
/// which a vertex counts as lying on a hit. Throws OpenSurfaceError when a
/// reliable line has an odd hit count.
void classify_and_project(LatticeModel& model, double tol = 1e-9);

TrussModel build_truss(const LatticeModel& lattice, CellType cell_type, double area);

struct HomogenisedProperties {
  double rho_bar = 0.0;
  double G_bar = 0.0;
};

/// Relative density and out-of-plane shear modulus of a pyramidal core.
HomogenisedProperties homogenised_pyramidal(double d, double l, double phi, double E);

LatticeSpec lattice_spec_from_json(const nlohmann::json& doc);
nlohmann::json lattice_spec_to_json(const LatticeSpec& spec);

}  // namespace lsk
