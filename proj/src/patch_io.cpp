#include "lsk/patch_io.hpp"

#include <fstream>
#include <sstream>

namespace lsk {

using nlohmann::json;

namespace {

Vec3 to_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("expected a point [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

std::vector<RationalBezierPatch> patches_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("patches") || !doc["patches"].is_array())
    throw InputError("patch-set document needs a \"patches\" array");
  if (doc.contains("schema") && doc["schema"].get<int>() != 1)
    throw InputError("unsupported patch-set schema version");

  std::vector<RationalBezierPatch> out;
  std::size_t index = 0;
  for (const json& p : doc["patches"]) {
    try {
      const auto deg = p.at("degree");
      if (!deg.is_array() || deg.size() != 2) throw InputError("\"degree\" must be [p, q]");
      std::array<int, 2> degree{deg[0].get<int>(), deg[1].get<int>()};
      std::vector<Vec3> points;
      for (const json& x : p.at("points")) points.push_back(to_vec3(x));
      std::vector<double> weights;
      if (p.contains("weights"))
        weights = p["weights"].get<std::vector<double>>();
      else
        weights.assign(points.size(), 1.0);
      out.emplace_back(degree, std::move(points), std::move(weights));
    } catch (const std::invalid_argument& e) {
      std::ostringstream msg;
      msg << "patch " << index << ": " << e.what();
      throw InputError(msg.str());
    } catch (const json::exception& e) {
      std::ostringstream msg;
      msg << "patch " << index << ": " << e.what();
      throw InputError(msg.str());
    }
    ++index;
  }
  return out;
}

json patches_to_json(const std::vector<RationalBezierPatch>& patches) {
  json arr = json::array();
  for (const auto& patch : patches) {
    json pts = json::array();
    for (const Vec3& x : patch.points()) pts.push_back({x.x(), x.y(), x.z()});
    arr.push_back({{"degree", {patch.degree()[0], patch.degree()[1]}},
                   {"points", pts},
                   {"weights", std::vector<double>(patch.weights().begin(), patch.weights().end())}});
  }
  return json{{"schema", 1}, {"patches", arr}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<RationalBezierPatch> read_patch_set(const std::filesystem::path& path) {
  return patches_from_json(read_json_file(path));
}

void write_patch_set(const std::filesystem::path& path,
                     const std::vector<RationalBezierPatch>& patches) {
  write_json_file(path, patches_to_json(patches));
}

}  // namespace lsk
