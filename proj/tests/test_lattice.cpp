#include "doctest.h"
#include "oracles.hpp"

#include "lsk/fixtures.hpp"
#include "lsk/lattice.hpp"

#include <numbers>
#include <random>
#include <set>

using namespace lsk;

namespace {

const Vec3 kCentre(0.5, 0.5, 0.5);
constexpr double kRadius = 0.4;

LatticeSpec unit_lattice(double angle_deg, CellType type = CellType::BCC) {
  LatticeSpec s;
  s.origin = Vec3::Zero();
  s.cell_size = 0.25;
  s.counts = {4, 4, 4};
  s.rotation = rotation_from_degrees(0, 0, angle_deg);
  s.cell_type = type;
  return s;
}

LatticeModel run_pipeline(const LatticeSpec& spec, const std::vector<RationalBezierPatch>& patches,
                          bool classify = true) {
  LatticeModel model = generate_lattice(spec);
  check_containment(spec, patches);
  const Bvh bvh = build_bvh(patches, lattice_directions(spec, patches));
  const auto mreps = build_mreps(patches);
  compute_intersections(model, bvh, patches, mreps);
  if (classify) classify_and_project(model);
  return model;
}

std::vector<RationalBezierPatch> axis_cube(double lo, double hi) {
  std::vector<RationalBezierPatch> out;
  for (int axis = 0; axis < 3; ++axis)
    for (double c : {lo, hi}) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      std::vector<Vec3> pts;
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
          Vec3 x;
          x(axis) = c;
          x(u) = i ? hi : lo;
          x(v) = j ? hi : lo;
          pts.push_back(x);
        }
      out.push_back(RationalBezierPatch::polynomial({1, 1}, pts));
    }
  return out;
}

double sphere_deviation(const std::vector<RationalBezierPatch>& ps) {
  double dev = 0.0;
  for (const auto& p : ps)
    for (int j = 0; j <= 10; ++j)
      for (int i = 0; i <= 10; ++i)
        dev = std::max(dev, std::abs((patch_eval(p, Vec2(i / 10.0, j / 10.0)) - kCentre).norm() - kRadius));
  return dev;
}

}  // namespace

TEST_CASE("lattice combinatorics") {
  LatticeSpec s;
  s.counts = {1, 1, 1};
  LatticeModel m = generate_lattice(s);
  CHECK(m.vertices.size() == 8);
  CHECK(m.edges.size() == 12);
  s.counts = {2, 1, 1};
  m = generate_lattice(s);
  CHECK(m.vertices.size() == 12);
  CHECK(m.edges.size() == 20);
  s.counts = {3, 2, 4};
  m = generate_lattice(s);
  CHECK(m.vertices.size() == 4 * 3 * 5);
  // Lines: one per (direction, transverse grid point).
  CHECK(m.lines.size() == static_cast<std::size_t>(3 * 5 + 4 * 5 + 4 * 3));
  for (const auto& e : m.edges) {
    const auto& a = m.vertices[e.a].ijk;
    const auto& b = m.vertices[e.b].ijk;
    CHECK(std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]) == 1);
  }
}

TEST_CASE("lattice spec validation") {
  LatticeSpec s;
  s.cell_size = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.cell_size = 1.0;
  s.counts = {1, 0, 1};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.counts = {1, 1, 1};
  s.rotation(0, 1) = 0.1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.rotation = -Eigen::Matrix3d::Identity();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_cell_type("octet"), InputError);
  CHECK(parse_cell_type("BCC") == CellType::BCC);
}

TEST_CASE("rotation is an isometry about the centroid") {
  LatticeSpec s = unit_lattice(0);
  const LatticeModel a = generate_lattice(s);
  s.rotation = rotation_from_degrees(10, 20, 45);
  const LatticeModel b = generate_lattice(s);
  CHECK((s.rotation * s.rotation.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  for (const auto& e : b.edges) CHECK(std::abs((b.vertices[e.a].x - b.vertices[e.b].x).norm() - 0.25) < 1e-14);
  for (std::size_t i = 0; i < a.vertices.size(); i += 7)
    for (std::size_t j = 0; j < a.vertices.size(); j += 5)
      CHECK(std::abs((a.vertices[i].x - a.vertices[j].x).norm() - (b.vertices[i].x - b.vertices[j].x).norm()) < 1e-14);
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t i = 0; i < a.vertices.size(); ++i) ca += a.vertices[i].x, cb += b.vertices[i].x;
  CHECK((ca - cb).norm() / a.vertices.size() < 1e-14);
}

TEST_CASE("sphere hits agree with the analytic sphere") {
  const auto ps = cube_sphere(kCentre, kRadius, 4);
  const double dev = sphere_deviation(ps);
  CHECK(dev < 0.02);
  for (double angle : {0.0, 45.0}) {
    const LatticeModel m = run_pipeline(unit_lattice(angle), ps, false);
    int checked = 0;
    for (const auto& line : m.lines) {
      CHECK(line.reliable);
      CHECK(line.hits.size() % 2 == 0);
      const Vec3 a = m.start(line), b = m.end(line);
      const Vec3 d = (b - a).normalized();
      const double dist = (a - kCentre - (a - kCentre).dot(d) * d).norm();
      if (std::abs(dist - kRadius) > 0.05) {
        CHECK(line.hits.size() == oracle::sphere_line(kCentre, kRadius, a, b).size());
        ++checked;
      }
      for (std::size_t h = 0; h < line.hits.size(); ++h) {
        CHECK(std::abs((line.hits[h].point - kCentre).norm() - kRadius) <= dev + 1e-9);
        CHECK((patch_eval(ps[line.hits[h].patch], line.hits[h].theta) - line.hits[h].point).norm() < 1e-7);
        if (h) CHECK(line.hits[h].s > line.hits[h - 1].s);
      }
    }
    CHECK(checked > 20);
  }
}

TEST_CASE("interior classification matches point-in-sphere across orientations") {
  const auto ps = cube_sphere(kCentre, kRadius, 4);
  for (double angle : {0.0, 15.0, 30.0, 45.0}) {
    const LatticeModel m = run_pipeline(unit_lattice(angle), ps);
    int inside = 0, expected = 0;
    for (const auto& v : m.vertices) {
      const bool truth = (v.grid - kCentre).norm() < kRadius;
      CHECK(v.inside == truth);
      inside += v.inside;
      expected += truth;
    }
    CHECK(inside == expected);
    CHECK(inside > 0);

    // States partition the vertices; only OUTSIDE ones are removed.
    std::set<std::pair<double, double>> hit_points;
    for (const auto& v : m.vertices) {
      CHECK(v.state != VertexState::UNKNOWN);
      CHECK(v.alive == (v.state != VertexState::OUTSIDE));
      if (v.state == VertexState::PROJECTED) {
        const Vec3 move = v.x - v.grid;
        CHECK(move.norm() < 0.25);
        // Moved along one lattice axis only.
        const Vec3 local = m.spec.rotation.transpose() * move;
        int nonzero = 0;
        for (int c = 0; c < 3; ++c) nonzero += std::abs(local(c)) > 1e-12;
        CHECK(nonzero <= 1);
        CHECK((patch_eval(ps[v.patch], v.theta) - v.x).norm() < 1e-7);
        bool on_hit = false;
        for (const auto& line : m.lines)
          for (const auto& h : line.hits) on_hit = on_hit || (h.point - v.x).norm() < 1e-12;
        CHECK(on_hit);
      }
    }
  }
}

TEST_CASE("lines outside the surface bounds have no candidates") {
  const auto ps = cube_sphere(kCentre, 0.2, 2);
  const LatticeModel m = run_pipeline(unit_lattice(0), ps, false);
  for (const auto& line : m.lines) {
    const Vec3 a = m.start(line);
    const Vec3 off = a - kCentre;
    bool far = false;
    for (int c = 0; c < 3; ++c)
      if (c != line.direction && std::abs(off(c)) > 0.25) far = true;
    if (far) {
      CHECK(line.candidates == 0);
      CHECK(line.hits.empty());
    }
  }
}

TEST_CASE("cube aligned with lattice planes projects with zero displacement") {
  const auto ps = axis_cube(0.25, 0.75);
  const LatticeModel m = run_pipeline(unit_lattice(0), ps);
  for (const auto& v : m.vertices) {
    const Vec3& g = v.grid;
    const bool in_box = (g.array() >= 0.25 - 1e-12).all() && (g.array() <= 0.75 + 1e-12).all();
    const bool on_face = in_box && ((g.array() - 0.25).abs() < 1e-12 || (g.array() - 0.75).abs() < 1e-12).any();
    if (on_face) {
      CHECK(v.state == VertexState::PROJECTED);
      CHECK((v.x - v.grid).norm() < 1e-12);
    } else if (in_box) {
      CHECK(v.state == VertexState::INSIDE);
    } else {
      CHECK(v.state == VertexState::OUTSIDE);
    }
  }
}

TEST_CASE("surface between the lattice lines leaves nothing") {
  const auto ps = cube_sphere(Vec3(0.125, 0.125, 0.125), 0.05, 1);
  const LatticeModel m = run_pipeline(unit_lattice(0), ps);
  for (const auto& v : m.vertices) CHECK_FALSE(v.alive);
  const TrussModel t = build_truss(m, CellType::BCC, 1e-4);
  CHECK(t.joints.empty());
  CHECK(t.struts.empty());
}

TEST_CASE("open surface is rejected") {
  auto ps = cube_sphere(kCentre, kRadius, 4);
  // Drop the whole -x face.
  ps.erase(ps.begin(), ps.begin() + 16);
  LatticeModel m = run_pipeline(unit_lattice(0), ps, false);
  try {
    classify_and_project(m);
    FAIL("expected an open surface error");
  } catch (const OpenSurfaceError& e) {
    CHECK(m.lines.at(e.line()).hits.size() % 2 == 1);
  }
}

TEST_CASE("surface must lie inside the lattice box") {
  const auto ps = cube_sphere(Vec3(0.9, 0.5, 0.5), 0.3, 1);
  CHECK_THROWS_AS(check_containment(unit_lattice(0), ps), InputError);
  CHECK_NOTHROW(check_containment(unit_lattice(0), cube_sphere(kCentre, kRadius, 2)));
}

TEST_CASE("truss templates on a single cell") {
  LatticeSpec s;
  s.cell_size = 2.0;
  const LatticeModel m = generate_lattice(s);

  const TrussModel bcc = build_truss(m, CellType::BCC, 0.5);
  CHECK(bcc.joints.size() == 9);
  CHECK(bcc.struts.size() == 20);
  int diagonals = 0;
  for (const auto& st : bcc.struts) {
    CHECK(st.area == 0.5);
    diagonals += std::abs(bcc.length(st) - std::sqrt(3.0)) < 1e-12;
  }
  CHECK(diagonals == 8);

  const TrussModel pyr = build_truss(m, CellType::PYRAMIDAL, 0.5);
  CHECK(pyr.struts.size() == 4);
  for (const auto& st : pyr.struts) {
    const Vec3 d = pyr.joints[st.a].x - pyr.joints[st.b].x;
    const double horizontal = std::hypot(d(0), d(1));
    CHECK(std::abs(std::atan2(std::abs(d(2)), horizontal) - std::atan(std::sqrt(2.0))) < 1e-12);
  }

  const TrussModel edges = build_truss(m, CellType::CUBIC_EDGES, 0.5);
  CHECK(edges.joints.size() == 8);
  CHECK(edges.struts.size() == 12);
}

TEST_CASE("adjacent cells share joints") {
  LatticeSpec s;
  s.counts = {2, 1, 1};
  const LatticeModel m = generate_lattice(s);
  for (CellType type : {CellType::BCC, CellType::CUBIC_EDGES, CellType::PYRAMIDAL}) {
    const TrussModel t = build_truss(m, type, 1.0);
    for (std::size_t i = 0; i < t.joints.size(); ++i)
      for (std::size_t j = i + 1; j < t.joints.size(); ++j) CHECK((t.joints[i].x - t.joints[j].x).norm() > 1e-9);
    std::set<std::pair<int, int>> seen;
    for (const auto& st : t.struts) {
      CHECK(t.length(st) > 0.0);
      CHECK(seen.insert(std::minmax(st.a, st.b)).second);
    }
  }
  CHECK(build_truss(m, CellType::CUBIC_EDGES, 1.0).joints.size() == 12);
  CHECK(build_truss(m, CellType::CUBIC_EDGES, 1.0).struts.size() == 20);
  CHECK(build_truss(m, CellType::BCC, 1.0).joints.size() == 14);
  CHECK(build_truss(m, CellType::BCC, 1.0).struts.size() == 36);
}

TEST_CASE("sphere truss joints on the surface") {
  const auto ps = cube_sphere(kCentre, kRadius, 4);
  const LatticeModel m = run_pipeline(unit_lattice(45), ps);
  const TrussModel t = build_truss(m, CellType::BCC, 1e-4);
  CHECK(!t.joints.empty());
  int on = 0;
  for (const auto& j : t.joints)
    if (j.on_surface) {
      ++on;
      CHECK((patch_eval(ps[j.patch], j.theta) - j.x).norm() < 1e-7);
    }
  CHECK(on > 0);
  for (const auto& st : t.struts) CHECK(t.length(st) > 0.0);
}

TEST_CASE("homogenised pyramidal core") {
  const double phi = std::atan(std::sqrt(2.0));
  const auto h = homogenised_pyramidal(0.1, 1.0, phi, 1.0);
  // Closed form pi/(2 (1/3) sqrt(2/3)) (1/10)^2, evaluated in extended precision.
  CHECK(std::abs(h.rho_bar - 0.05771474235728388) < 1e-12);
  CHECK(std::abs(h.G_bar - h.rho_bar / 9.0) < 1e-15);
  const long double cos2 = 1.0L / 3.0L, sinp = std::sqrt(2.0L / 3.0L);
  CHECK(std::abs(h.rho_bar - static_cast<double>(std::numbers::pi_v<long double> / (2 * cos2 * sinp) * 0.01L)) < 1e-15);
  const auto e = homogenised_pyramidal(0.2, 2.0, phi, 210e3);
  CHECK(std::abs(e.G_bar / 210e3 - h.rho_bar / 9.0) < 1e-15);
  const auto z = homogenised_pyramidal(1e-12, 1.0, phi, 1.0);
  CHECK(z.rho_bar < 1e-20);
  CHECK(z.G_bar < 1e-20);
  CHECK_THROWS_AS(homogenised_pyramidal(0.0, 1.0, phi, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(homogenised_pyramidal(0.1, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(homogenised_pyramidal(0.1, 1.0, phi, -1.0), std::invalid_argument);
}

TEST_CASE("lattice spec json round trip") {
  LatticeSpec s = unit_lattice(30, CellType::PYRAMIDAL);
  const LatticeSpec r = lattice_spec_from_json(lattice_spec_to_json(s));
  CHECK((r.origin - s.origin).norm() == 0.0);
  CHECK(r.cell_size == s.cell_size);
  CHECK(r.counts == s.counts);
  CHECK((r.rotation - s.rotation).norm() < 1e-14);
  CHECK(r.cell_type == CellType::PYRAMIDAL);
  const nlohmann::json doc = {{"origin", {0, 0, 0}}, {"cell_size", 0.5}, {"counts", {1, 2, 3}},
                              {"angles_deg", {0, 0, 90}}, {"cell_type", "bcc"}};
  const LatticeSpec a = lattice_spec_from_json(doc);
  CHECK((a.rotation * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-14);
  CHECK_THROWS_AS(lattice_spec_from_json(nlohmann::json{{"cell_size", 1}}), InputError);
}
