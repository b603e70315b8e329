// Regenerates the JSON files under fixtures/.
#include "lsk/fixtures.hpp"
#include "lsk/lattice.hpp"
#include "lsk/patch_io.hpp"

#include <filesystem>
#include <iostream>

using namespace lsk;
using nlohmann::json;

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
  std::filesystem::create_directories(dir);

  write_patch_set(dir / "linear_curve.json",
                  {RationalBezierPatch({1, 0}, {Vec3(0, -1, 0), Vec3(1, 1, 0)}, {1.0, 1.0})});

  write_patch_set(dir / "sphere_patches.json", cube_sphere(Vec3(0.5, 0.5, 0.5), 0.4, 4));

  LatticeSpec spec;
  spec.origin = Vec3::Zero();
  spec.cell_size = 0.25;
  spec.counts = {4, 4, 4};
  spec.cell_type = CellType::BCC;
  json lat = lattice_spec_to_json(spec);
  lat.erase("rotation");
  lat["angles_deg"] = {0.0, 0.0, 0.0};
  write_json_file(dir / "sphere_lattice.json", lat);
  lat["angles_deg"] = {0.0, 0.0, 45.0};
  write_json_file(dir / "sphere_lattice_45.json", lat);

  LatticeSpec cell;
  cell.cell_size = 1.0;
  cell.counts = {1, 1, 1};
  LatticeModel m = generate_lattice(cell);
  for (auto& v : m.vertices) {
    v.state = VertexState::INSIDE;
    v.inside = true;
  }
  const TrussModel t = build_truss(m, CellType::BCC, 0.01);
  write_json_file(dir / "bcc_cell_truss.json", truss_to_json(t));

  json fixed = json::array();
  json loads = json::array();
  for (int j = 0; j < static_cast<int>(t.joints.size()); ++j) {
    if (t.joints[j].x.z() == 0.0) fixed.push_back({{"joint", j}, {"dofs", {0, 1, 2}}});
    if (t.joints[j].x.z() == 1.0) {
      fixed.push_back({{"joint", j}, {"dofs", {0, 1}}});
      loads.push_back({{"joint", j}, {"force", {0.0, 0.0, -1.0}}});
    }
  }
  write_json_file(dir / "bcc_cell_bc.json",
                  json{{"schema", 1}, {"youngs_modulus", 1000.0}, {"fixed", fixed}, {"loads", loads}});
  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}
