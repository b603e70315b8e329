#pragma once

#include "lsk/common.hpp"

#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lsk {

struct Joint {
  Vec3 x = Vec3::Zero();
  bool on_surface = false;
  Vec2 theta = Vec2::Zero();
  int patch = -1;
};

/// Pin-jointed bar from joint a (the "left" joint) to joint b.
struct Strut {
  int a = 0;
  int b = 0;
  double area = 1.0;
};

struct TrussModel {
  std::vector<Joint> joints;
  std::vector<Strut> struts;
  std::vector<std::string> warnings;

  double length(const Strut& s) const { return (joints[s.b].x - joints[s.a].x).norm(); }
  /// Unit vector from b to a, so that a stretch gives positive strain.
  Vec3 tangent(const Strut& s) const { return (joints[s.a].x - joints[s.b].x).normalized(); }
};

nlohmann::json truss_to_json(const TrussModel& truss);
TrussModel truss_from_json(const nlohmann::json& doc);

struct TrussProblem {
  TrussModel truss;
  double youngs_modulus = 1.0;
  std::vector<std::pair<int, int>> fixed_dofs;  // (joint, component 0..2)
  std::map<int, Vec3> point_loads;
};

struct TrussSolution {
  std::vector<Vec3> displacements;
  std::vector<double> strains;
  std::vector<Vec3> reactions;  // zero except at constrained joints
  double compliance = 0.0;
};

/// eps = ((uL - uR) . t) / l, with t pointing from R to L.
double strut_strain(const Vec3& uL, const Vec3& uR, const Vec3& t, double l);

/// Global 3n x 3n stiffness, sum over struts of (E A / l) t t^T scattered to
/// both joints. Struts are processed in parallel chunks and summed in a fixed
/// order.
Eigen::SparseMatrix<double> assemble_stiffness(const TrussModel& truss, double E, int threads = 1);

/// Throws MechanismError when the constrained stiffness is singular.
TrussSolution assemble_and_solve(const TrussProblem& p, int threads = 1);

/// bc document: { "youngs_modulus": E, "fixed": [{"joint": j, "dofs": [0,1,2]}],
///                "loads": [{"joint": j, "force": [fx, fy, fz]}] }
TrussProblem problem_from_json(TrussModel truss, const nlohmann::json& bc);
nlohmann::json solution_to_json(const TrussSolution& s);

}  // namespace lsk
