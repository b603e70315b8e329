#include "doctest.h"

#include "lsk/lattice.hpp"
#include "lsk/truss.hpp"

#include <Eigen/Dense>

#include <numbers>
#include <random>

using namespace lsk;

namespace {

TrussModel single_strut(double l, double area) {
  TrussModel t;
  t.joints.push_back({Vec3::Zero()});
  t.joints.push_back({Vec3(l, 0, 0)});
  t.struts.push_back({1, 0, area});
  return t;
}

TrussModel tetrahedron() {
  TrussModel t;
  for (const Vec3& x : {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.3, 0.9, 0), Vec3(0.4, 0.3, 0.8)})
    t.joints.push_back({x});
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) t.struts.push_back({a, b, 0.1 + 0.05 * (a + b)});
  return t;
}

void fix_all(TrussProblem& p, int j) {
  for (int c = 0; c < 3; ++c) p.fixed_dofs.emplace_back(j, c);
}

Vec3 total_reaction(const TrussSolution& s) {
  Vec3 r = Vec3::Zero();
  for (const Vec3& x : s.reactions) r += x;
  return r;
}

}  // namespace

TEST_CASE("strut strain") {
  const Vec3 t = Vec3(1, 2, 2) / 3.0;
  CHECK(strut_strain(Vec3(0.3, -0.1, 0.2), Vec3(0.3, -0.1, 0.2), t, 2.0) == 0.0);
  CHECK(std::abs(strut_strain(0.01 * t, Vec3::Zero(), t, 2.0) - 0.005) < 1e-16);
  CHECK(std::abs(strut_strain(Vec3::Zero(), 0.01 * t, t, 2.0) + 0.005) < 1e-16);
  CHECK(std::abs(strut_strain(Vec3(2, -1, 0) * 0.1, Vec3::Zero(), t, 2.0)) < 1e-16);
  CHECK_THROWS_AS(strut_strain(Vec3::Zero(), Vec3::Zero(), t, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(strut_strain(Vec3::Zero(), Vec3::Zero(), Vec3(1, 1, 0), 1.0), std::invalid_argument);
}

TEST_CASE("single strut under axial load") {
  for (double l : {1.0, 0.37, 12.5})
    for (double E : {1.0, 210e3}) {
      const double A = 0.02, F = 3.5;
      TrussProblem p;
      p.truss = single_strut(l, A);
      p.youngs_modulus = E;
      fix_all(p, 0);
      p.fixed_dofs.emplace_back(1, 1);
      p.fixed_dofs.emplace_back(1, 2);
      p.point_loads[1] = Vec3(F, 0, 0);
      const TrussSolution s = assemble_and_solve(p);
      const double u = F * l / (E * A);
      CHECK(std::abs(s.displacements[1](0) - u) <= 1e-12 * std::max(1.0, u));
      CHECK(s.displacements[1].tail<2>().norm() == 0.0);
      CHECK(std::abs(s.strains[0] - F / (E * A)) <= 1e-12 * std::max(1.0, F / (E * A)));
      CHECK(std::abs(s.compliance - F * u) <= 1e-12 * std::max(1.0, F * u));
      CHECK((s.reactions[0] - Vec3(-F, 0, 0)).norm() < 1e-10);
      CHECK(total_reaction(s).norm() - F < 1e-10);
    }
}

TEST_CASE("transverse load on a single strut is a mechanism") {
  TrussProblem p;
  p.truss = single_strut(1.0, 1.0);
  fix_all(p, 0);
  p.point_loads[1] = Vec3(0, 1, 0);
  try {
    assemble_and_solve(p);
    FAIL("expected a mechanism");
  } catch (const MechanismError& e) {
    CHECK(e.zero_energy_modes() == 2);
  }
}

TEST_CASE("free truss has six rigid-body modes") {
  const TrussModel t = tetrahedron();
  const Eigen::MatrixXd K(assemble_stiffness(t, 5.0));
  CHECK((K - K.transpose()).norm() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  const auto& ev = es.eigenvalues();
  int zero = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    CHECK(ev(i) > -1e-12 * ev.maxCoeff());
    zero += ev(i) < 1e-10 * ev.maxCoeff();
  }
  CHECK(zero == 6);

  TrussProblem p;
  p.truss = t;
  try {
    assemble_and_solve(p);
    FAIL("expected a mechanism");
  } catch (const MechanismError& e) {
    CHECK(e.zero_energy_modes() == 6);
  }
}

TEST_CASE("stiffness energy equals the sum of strut energies") {
  LatticeSpec spec;
  spec.counts = {2, 2, 1};
  spec.cell_size = 0.5;
  const TrussModel t = build_truss(generate_lattice(spec), CellType::BCC, 0.01);
  const double E = 70.0;
  const Eigen::SparseMatrix<double> K = assemble_stiffness(t, E);
  CHECK(Eigen::MatrixXd(K - Eigen::SparseMatrix<double>(K.transpose())).norm() == 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1e-3);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd u(K.rows());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = N(rng);
    const double global = 0.5 * u.dot(K * u);
    double local = 0.0;
    for (const auto& st : t.struts) {
      const double eps = strut_strain(u.segment<3>(3 * st.a), u.segment<3>(3 * st.b), t.tangent(st), t.length(st));
      local += 0.5 * E * eps * eps * st.area * t.length(st);
    }
    CHECK(std::abs(global - local) < 1e-10 * std::max(1.0, local));
  }
}

TEST_CASE("reactions balance the applied loads") {
  LatticeSpec spec;
  spec.counts = {2, 2, 2};
  const LatticeModel lattice = generate_lattice(spec);
  TrussProblem p;
  p.truss = build_truss(lattice, CellType::BCC, 0.05);
  p.youngs_modulus = 200.0;
  Vec3 applied = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  for (std::size_t j = 0; j < p.truss.joints.size(); ++j) {
    const Vec3& x = p.truss.joints[j].x;
    if (x(2) < 1e-12) fix_all(p, static_cast<int>(j));
    if (x(2) > 2.0 - 1e-12) {
      const Vec3 f(0.3, -0.1, -1.0 - x(0));
      p.point_loads[static_cast<int>(j)] = f;
      applied += f;
      moment += x.cross(f);
    }
  }
  const TrussSolution s = assemble_and_solve(p, 3);
  CHECK((total_reaction(s) + applied).norm() < 1e-10);
  Vec3 rm = Vec3::Zero();
  for (std::size_t j = 0; j < s.reactions.size(); ++j) rm += p.truss.joints[j].x.cross(s.reactions[j]);
  CHECK((rm + moment).norm() < 1e-10);
  double work = 0.0;
  for (const auto& [j, f] : p.point_loads) work += f.dot(s.displacements[j]);
  CHECK(std::abs(work - s.compliance) < 1e-12 * std::abs(work));
  CHECK(s.compliance > 0.0);
}

TEST_CASE("pyramidal cell shear stiffness matches the homogenised modulus") {
  const double phi = std::atan(std::sqrt(2.0));
  for (double a : {1.0, 0.25}) {
    LatticeSpec spec;
    spec.cell_size = a;
    const TrussModel t0 = build_truss(generate_lattice(spec), CellType::PYRAMIDAL, 1.0);
    REQUIRE(t0.struts.size() == 4);
    const double l = t0.length(t0.struts[0]);
    const double d = 0.1 * l;
    const double A = std::numbers::pi * d * d / 4.0;
    const double E = 1000.0;

    TrussProblem p;
    p.truss = t0;
    for (auto& st : p.truss.struts) st.area = A;
    p.youngs_modulus = E;
    int apex = -1;
    for (std::size_t j = 0; j < p.truss.joints.size(); ++j) {
      if (p.truss.joints[j].x(2) < 1e-12) fix_all(p, static_cast<int>(j));
      else apex = static_cast<int>(j);
    }
    REQUIRE(apex >= 0);

    // Hand-assembled apex stiffness: four bars from (+-a/2, +-a/2, -a).
    Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
    for (double sx : {-0.5, 0.5})
      for (double sy : {-0.5, 0.5}) {
        const Vec3 e = Vec3(sx * a, sy * a, a);
        k += E * A / e.norm() * (e * e.transpose()) / e.squaredNorm();
      }

    const double F = 1e-3;
    p.point_loads[apex] = Vec3(F, 0, 0);
    const TrussSolution s = assemble_and_solve(p);
    const double kxx = F / s.displacements[apex](0);
    CHECK(std::abs(kxx - k(0, 0)) < 1e-10 * k(0, 0));

    // Shear stress F / a^2 over shear strain u / a.
    const double G = kxx / a;
    const auto h = homogenised_pyramidal(d, l, phi, E);
    CHECK(std::abs(h.rho_bar - 0.05771474235728388) < 1e-12);
    CHECK(std::abs(G - h.G_bar) < 0.02 * h.G_bar);
    CHECK((total_reaction(s) + Vec3(F, 0, 0)).norm() < 1e-10);
  }
}

TEST_CASE("assembly does not depend on the thread count") {
  LatticeSpec spec;
  spec.counts = {5, 4, 3};
  const TrussModel t = build_truss(generate_lattice(spec), CellType::BCC, 0.02);
  const Eigen::MatrixXd K1(assemble_stiffness(t, 3.0, 1));
  for (int threads : {2, 4, 7}) CHECK((Eigen::MatrixXd(assemble_stiffness(t, 3.0, threads)) - K1).norm() == 0.0);
}

TEST_CASE("truss and boundary-condition documents") {
  const TrussModel t = tetrahedron();
  const TrussModel r = truss_from_json(truss_to_json(t));
  REQUIRE(r.joints.size() == t.joints.size());
  REQUIRE(r.struts.size() == t.struts.size());
  for (std::size_t j = 0; j < t.joints.size(); ++j) CHECK(r.joints[j].x == t.joints[j].x);
  for (std::size_t s = 0; s < t.struts.size(); ++s) {
    CHECK(r.struts[s].a == t.struts[s].a);
    CHECK(r.struts[s].b == t.struts[s].b);
    CHECK(r.struts[s].area == t.struts[s].area);
  }
  CHECK_THROWS_AS(truss_from_json(nlohmann::json{{"joints", {{0, 0, 0}}}, {"struts", {{0, 3, 1.0}}}}), InputError);

  const nlohmann::json bc = {{"youngs_modulus", 10.0},
                             {"fixed", {{{"joint", 0}}, {{"joint", 1}, {"dofs", {1, 2}}}, {{"joint", 2}, {"dofs", {2}}}}},
                             {"loads", {{{"joint", 3}, {"force", {0, 0, -1}}}, {{"joint", 3}, {"force", {1, 0, 0}}}}}};
  const TrussProblem p = problem_from_json(t, bc);
  CHECK(p.youngs_modulus == 10.0);
  CHECK(p.fixed_dofs.size() == 6);
  CHECK(p.point_loads.at(3) == Vec3(1, 0, -1));
  const TrussSolution s = assemble_and_solve(p);
  CHECK((total_reaction(s) + Vec3(1, 0, -1)).norm() < 1e-10);
  const auto doc = solution_to_json(s);
  CHECK(doc["schema"] == 1);
  CHECK(doc["displacements"].size() == 4);
  CHECK_THROWS_AS(problem_from_json(t, nlohmann::json{{"fixed", nlohmann::json::array()}}), InputError);

  TrussProblem bad = p;
  bad.youngs_modulus = 0.0;
  CHECK_THROWS_AS(assemble_and_solve(bad), InputError);
  bad = p;
  bad.fixed_dofs.emplace_back(9, 0);
  CHECK_THROWS_AS(assemble_and_solve(bad), InputError);
}
