#include "lsk/lattice.hpp"

#include "lsk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace lsk {

using nlohmann::json;

CellType parse_cell_type(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "bcc") return CellType::BCC;
  if (s == "pyramidal") return CellType::PYRAMIDAL;
  if (s == "cubic_edges" || s == "cubic" || s == "edges") return CellType::CUBIC_EDGES;
  throw InputError("unknown cell type: " + name);
}

std::string to_string(CellType t) {
  switch (t) {
    case CellType::BCC: return "bcc";
    case CellType::PYRAMIDAL: return "pyramidal";
    case CellType::CUBIC_EDGES: return "cubic_edges";
  }
  return "?";
}

std::string to_string(VertexState s) {
  switch (s) {
    case VertexState::UNKNOWN: return "unknown";
    case VertexState::INSIDE: return "inside";
    case VertexState::OUTSIDE: return "outside";
    case VertexState::PROJECTED: return "projected";
  }
  return "?";
}

Eigen::Matrix3d rotation_from_degrees(double ax, double ay, double az) {
  const double k = std::numbers::pi / 180.0;
  return (Eigen::AngleAxisd(az * k, Vec3::UnitZ()) * Eigen::AngleAxisd(ay * k, Vec3::UnitY()) *
          Eigen::AngleAxisd(ax * k, Vec3::UnitX()))
      .toRotationMatrix();
}

void LatticeSpec::validate() const {
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  for (int c : counts)
    if (c < 1) throw std::invalid_argument("cell counts must be at least 1");
  const double err = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (err > 1e-12 || rotation.determinant() < 0.0)
    throw std::invalid_argument("lattice orientation must be a rotation");
}

Vec3 LatticeSpec::centroid() const {
  return origin + 0.5 * cell_size * Vec3(counts[0], counts[1], counts[2]);
}

int LatticeModel::vertex_index(int i, int j, int k) const {
  const auto& n = spec.counts;
  return i + (n[0] + 1) * (j + (n[1] + 1) * k);
}

LatticeModel generate_lattice(const LatticeSpec& spec) {
  spec.validate();
  LatticeModel m;
  m.spec = spec;
  const auto [n1, n2, n3] = spec.counts;
  const Vec3 c = spec.centroid();

  m.vertices.resize(static_cast<std::size_t>(n1 + 1) * (n2 + 1) * (n3 + 1));
  for (int k = 0; k <= n3; ++k)
    for (int j = 0; j <= n2; ++j)
      for (int i = 0; i <= n1; ++i) {
        LatticeVertex& v = m.vertices[m.vertex_index(i, j, k)];
        const Vec3 local = spec.origin + spec.cell_size * Vec3(i, j, k);
        v.grid = c + spec.rotation * (local - c);
        v.x = v.grid;
        v.ijk = {i, j, k};
      }

  const std::array<int, 3> n{n1, n2, n3};
  for (int d = 0; d < 3; ++d) {
    const int a = (d + 1) % 3;
    const int b = (d + 2) % 3;
    for (int ib = 0; ib <= n[b]; ++ib)
      for (int ia = 0; ia <= n[a]; ++ia) {
        LatticeLine line;
        line.direction = d;
        const int id = static_cast<int>(m.lines.size());
        for (int t = 0; t <= n[d]; ++t) {
          std::array<int, 3> ijk{};
          ijk[d] = t;
          ijk[a] = ia;
          ijk[b] = ib;
          line.vertices.push_back(m.vertex_index(ijk[0], ijk[1], ijk[2]));
          if (t > 0) m.edges.push_back({line.vertices[t - 1], line.vertices[t], id, true});
        }
        m.lines.push_back(std::move(line));
      }
  }
  return m;
}

void check_containment(const LatticeSpec& spec, std::span<const RationalBezierPatch> patches) {
  const Vec3 c = spec.centroid();
  const Vec3 half = 0.5 * spec.cell_size * Vec3(spec.counts[0], spec.counts[1], spec.counts[2]);
  const double slack = 1e-9 * spec.cell_size;
  for (std::size_t p = 0; p < patches.size(); ++p)
    for (const Vec3& x : patches[p].points()) {
      const Vec3 local = spec.rotation.transpose() * (x - c);
      if ((local.cwiseAbs() - half).maxCoeff() > slack) {
        std::ostringstream msg;
        msg << "patch " << p << " extends outside the lattice box";
        throw InputError(msg.str());
      }
    }
}

DirectionSet lattice_directions(const LatticeSpec& spec,
                                std::span<const RationalBezierPatch> patches) {
  return DirectionSet::fourteen(surface_average_normal(patches), spec.rotation);
}

std::vector<MRep> build_mreps(std::span<const RationalBezierPatch> patches, int threads,
                              RankTolerance tol) {
  std::vector<MRep> out(patches.size());
  parallel_for(patches.size(), threads, [&](std::size_t i) { out[i] = build_mrep(patches[i], tol); });
  return out;
}

void compute_intersections(LatticeModel& model, const Bvh& bvh,
                           std::span<const RationalBezierPatch> patches,
                           std::span<const MRep> mreps, const LatticeIntersectOptions& opt) {
  if (mreps.size() != patches.size()) throw std::invalid_argument("one MRep per patch required");
  const double seam = opt.seam_tol * model.spec.cell_size;

  parallel_for(model.lines.size(), opt.threads, [&](std::size_t li) {
    LatticeLine& line = model.lines[li];
    line.hits.clear();
    line.reliable = true;
    line.error.clear();
    const Vec3 a = model.start(line);
    const Vec3 b = model.end(line);
    const double len = (b - a).norm();
    const auto cand = query_segment(bvh, a, b);
    line.candidates = static_cast<int>(cand.size());
    const ParametricLine pl = ParametricLine::through(a, b);

    std::vector<IntersectionRecord> recs;
    for (int id : cand) {
      try {
        auto r = intersect_patch_line(patches[id], mreps[id], pl, opt.intersect, id);
        recs.insert(recs.end(), r.begin(), r.end());
      } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << "patch " << id << ": " << e.what();
        line.reliable = false;
        line.error = msg.str();
      }
    }
    recs = dedup_records(std::move(recs), seam / len, seam);
    for (const auto& r : recs)
      line.hits.push_back({r.xi * len, r.theta, r.patch_id, r.point, r.multiplicity_hint});
  });
}

namespace {

struct Claim {
  double distance;
  int line;
  int hit;
};

}  // namespace

void classify_and_project(LatticeModel& model, double tol) {
  const double cell = model.spec.cell_size;
  const double seam = 1e-6 * cell;

  for (std::size_t li = 0; li < model.lines.size(); ++li) {
    const auto& line = model.lines[li];
    if (line.reliable && line.hits.size() % 2 != 0) {
      std::ostringstream msg;
      msg << "lattice line " << li << " has an odd number (" << line.hits.size()
          << ") of surface crossings; the surface is not closed";
      throw OpenSurfaceError(msg.str(), static_cast<int>(li));
    }
  }

  // Parity along every reliable line; the three lines through a vertex vote.
  std::vector<int> votes_in(model.vertices.size(), 0);
  std::vector<int> votes(model.vertices.size(), 0);
  for (const auto& line : model.lines) {
    if (!line.reliable) continue;
    for (std::size_t t = 0; t < line.vertices.size(); ++t) {
      const double s = cell * static_cast<double>(t);
      int before = 0;
      bool on_hit = false;
      for (const auto& h : line.hits) {
        if (std::abs(h.s - s) <= tol) on_hit = true;
        if (h.s < s - tol) ++before;
      }
      const int v = line.vertices[t];
      ++votes[v];
      if (on_hit || before % 2 == 1) ++votes_in[v];
    }
  }
  for (std::size_t v = 0; v < model.vertices.size(); ++v) {
    auto& vx = model.vertices[v];
    if (votes[v] == 0) {
      vx.state = VertexState::UNKNOWN;
      continue;
    }
    if (votes_in[v] != 0 && votes_in[v] != votes[v]) {
      std::ostringstream msg;
      msg << "vertex " << v << ": lattice lines disagree on inside/outside";
      model.warnings.push_back(msg.str());
    }
    vx.inside = 2 * votes_in[v] > votes[v];
    vx.state = vx.inside ? VertexState::INSIDE : VertexState::OUTSIDE;
  }

  // Each hit claims the nearer vertex of its bracketing pair.
  struct HitRef {
    int line;
    int hit;
    std::array<int, 2> bracket;
    std::array<double, 2> dist;
  };
  std::vector<HitRef> refs;
  std::map<int, std::vector<Claim>> claims;
  for (std::size_t li = 0; li < model.lines.size(); ++li) {
    const auto& line = model.lines[li];
    const int last = static_cast<int>(line.vertices.size()) - 1;
    for (std::size_t hi = 0; hi < line.hits.size(); ++hi) {
      const double s = line.hits[hi].s;
      const int lo = std::clamp(static_cast<int>(std::floor(s / cell)), 0, std::max(last - 1, 0));
      const int up = std::min(lo + 1, last);
      HitRef r{static_cast<int>(li), static_cast<int>(hi), {line.vertices[lo], line.vertices[up]},
               {std::abs(s - cell * lo), std::abs(cell * up - s)}};
      int pick = r.dist[0] < r.dist[1] ? 0 : 1;
      if (std::abs(r.dist[0] - r.dist[1]) <= tol) {
        const bool in0 = model.vertices[r.bracket[0]].inside;
        const bool in1 = model.vertices[r.bracket[1]].inside;
        if (in0 != in1) pick = in0 ? 0 : 1;
      }
      if (pick == 1) {
        std::swap(r.bracket[0], r.bracket[1]);
        std::swap(r.dist[0], r.dist[1]);
      }
      claims[r.bracket[0]].push_back({r.dist[0], r.line, r.hit});
      refs.push_back(r);
    }
  }

  std::set<std::pair<int, int>> used;
  std::map<int, std::pair<int, int>> assigned;  // vertex -> (line, hit)
  for (auto& [v, list] : claims) {
    const auto best = std::min_element(list.begin(), list.end(), [](const Claim& a, const Claim& b) {
      return a.distance < b.distance ||
             (a.distance == b.distance && std::tie(a.line, a.hit) < std::tie(b.line, b.hit));
    });
    assigned[v] = {best->line, best->hit};
    used.insert({best->line, best->hit});
  }
  for (const HitRef& r : refs) {
    if (used.count({r.line, r.hit})) continue;
    const Vec3& here = model.lines[r.line].hits[r.hit].point;
    if (const auto it = assigned.find(r.bracket[0]); it != assigned.end()) {
      const Vec3& there = model.lines[it->second.first].hits[it->second.second].point;
      if ((there - here).norm() <= std::max(tol, seam)) continue;
    }
    const int alt = r.bracket[1];
    if (alt != r.bracket[0] && !assigned.count(alt)) {
      assigned[alt] = {r.line, r.hit};
      used.insert({r.line, r.hit});
      continue;
    }
    std::ostringstream msg;
    msg << "line " << r.line << " hit " << r.hit << " left unprojected (no free vertex)";
    model.warnings.push_back(msg.str());
  }

  for (const auto& [v, lh] : assigned) {
    const LineHit& h = model.lines[lh.first].hits[lh.second];
    auto& vx = model.vertices[v];
    vx.x = h.point;
    vx.theta = h.theta;
    vx.patch = h.patch;
    vx.state = VertexState::PROJECTED;
  }

  for (auto& vx : model.vertices)
    vx.alive = vx.state == VertexState::INSIDE || vx.state == VertexState::PROJECTED;
  for (auto& e : model.edges) e.alive = model.vertices[e.a].alive && model.vertices[e.b].alive;
}

TrussModel build_truss(const LatticeModel& lattice, CellType cell_type, double area) {
  if (!(area > 0.0)) throw std::invalid_argument("strut area must be positive");
  TrussModel t;
  std::vector<int> joint_of(lattice.vertices.size(), -1);
  const auto joint = [&](int v) {
    if (joint_of[v] < 0) {
      const auto& vx = lattice.vertices[v];
      joint_of[v] = static_cast<int>(t.joints.size());
      t.joints.push_back({vx.x, vx.state == VertexState::PROJECTED, vx.theta, vx.patch});
    }
    return joint_of[v];
  };

  std::set<std::pair<int, int>> seen;
  int dropped = 0;
  const auto add = [&](int a, int b) {
    if ((t.joints[a].x - t.joints[b].x).norm() <= 1e-12 * lattice.spec.cell_size) {
      ++dropped;
      return;
    }
    const auto key = std::minmax(a, b);
    if (seen.insert(key).second) t.struts.push_back({a, b, area});
  };

  if (cell_type != CellType::PYRAMIDAL)
    for (const auto& e : lattice.edges)
      if (e.alive) add(joint(e.a), joint(e.b));

  if (cell_type != CellType::CUBIC_EDGES) {
    const auto [n1, n2, n3] = lattice.spec.counts;
    for (int k = 0; k < n3; ++k)
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
          std::array<int, 8> c{};
          bool full = true;
          for (int q = 0; q < 8; ++q) {
            c[q] = lattice.vertex_index(i + (q & 1), j + ((q >> 1) & 1), k + ((q >> 2) & 1));
            full = full && lattice.vertices[c[q]].alive;
          }
          if (!full) continue;
          if (cell_type == CellType::BCC) {
            Vec3 centre = Vec3::Zero();
            for (int v : c) centre += lattice.vertices[v].x;
            const int cj = static_cast<int>(t.joints.size());
            t.joints.push_back({centre / 8.0, false, Vec2::Zero(), -1});
            for (int v : c) add(cj, joint(v));
          } else {
            Vec3 apex = Vec3::Zero();
            for (int q = 4; q < 8; ++q) apex += lattice.vertices[c[q]].x;
            const int aj = static_cast<int>(t.joints.size());
            t.joints.push_back({apex / 4.0, false, Vec2::Zero(), -1});
            for (int q = 0; q < 4; ++q) add(joint(c[q]), aj);
          }
        }
  }
  if (dropped > 0) {
    std::ostringstream msg;
    msg << dropped << " zero-length strut(s) dropped";
    t.warnings.push_back(msg.str());
  }

  // Joints that ended up without struts are removed.
  std::vector<int> degree(t.joints.size(), 0);
  for (const auto& s : t.struts) {
    ++degree[s.a];
    ++degree[s.b];
  }
  std::vector<int> remap(t.joints.size(), -1);
  std::vector<Joint> kept;
  for (std::size_t j = 0; j < t.joints.size(); ++j)
    if (degree[j] > 0) {
      remap[j] = static_cast<int>(kept.size());
      kept.push_back(t.joints[j]);
    }
  for (auto& s : t.struts) {
    s.a = remap[s.a];
    s.b = remap[s.b];
  }
  t.joints = std::move(kept);
  return t;
}

HomogenisedProperties homogenised_pyramidal(double d, double l, double phi, double E) {
  if (!(d > 0.0) || !(l > 0.0) || !(E > 0.0))
    throw std::invalid_argument("d, l and E must be positive");
  if (!(phi > 0.0 && phi < std::numbers::pi / 2))
    throw std::invalid_argument("phi must lie in (0, pi/2)");
  const double c = std::cos(phi);
  const double r = d / l;
  HomogenisedProperties h;
  h.rho_bar = std::numbers::pi / (2.0 * c * c * std::sin(phi)) * r * r;
  const double s2 = std::sin(2.0 * phi);
  h.G_bar = h.rho_bar / 8.0 * E * s2 * s2;
  return h;
}

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

LatticeSpec lattice_spec_from_json(const json& doc) {
  LatticeSpec s;
  try {
    if (doc.contains("schema") && doc["schema"].get<int>() != 1)
      throw InputError("unsupported lattice schema version");
    s.origin = vec3(doc.at("origin"));
    s.cell_size = doc.at("cell_size").get<double>();
    const auto counts = doc.at("counts").get<std::vector<int>>();
    if (counts.size() != 3) throw InputError("counts must have three entries");
    s.counts = {counts[0], counts[1], counts[2]};
    if (doc.contains("rotation")) {
      const auto& r = doc["rotation"];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s.rotation(i, j) = r.at(i).at(j).get<double>();
    } else if (doc.contains("angles_deg")) {
      const auto a = doc["angles_deg"].get<std::vector<double>>();
      if (a.size() != 3) throw InputError("angles_deg must have three entries");
      s.rotation = rotation_from_degrees(a[0], a[1], a[2]);
    }
    if (doc.contains("cell_type")) s.cell_type = parse_cell_type(doc["cell_type"].get<std::string>());
  } catch (const json::exception& e) {
    throw InputError(std::string("lattice document: ") + e.what());
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("lattice document: ") + e.what());
  }
  return s;
}

json lattice_spec_to_json(const LatticeSpec& s) {
  json rot = json::array();
  for (int i = 0; i < 3; ++i) rot.push_back({s.rotation(i, 0), s.rotation(i, 1), s.rotation(i, 2)});
  return json{{"schema", 1},
              {"origin", {s.origin.x(), s.origin.y(), s.origin.z()}},
              {"cell_size", s.cell_size},
              {"counts", s.counts},
              {"rotation", rot},
              {"cell_type", to_string(s.cell_type)}};
}

}  // namespace lsk
