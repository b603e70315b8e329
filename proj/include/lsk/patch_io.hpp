#pragma once

#include "lsk/bezier.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <vector>

namespace lsk {

/// Patch-set document:
///   { "schema": 1, "patches": [ { "degree": [p,q], "points": [[x,y,z],...],
///                                 "weights": [...] } ] }
/// Points are flattened with the first parametric index fastest. A patch with
/// degree [p, 0] is a curve. "weights" may be omitted for polynomial patches.
std::vector<RationalBezierPatch> patches_from_json(const nlohmann::json& doc);
nlohmann::json patches_to_json(const std::vector<RationalBezierPatch>& patches);

std::vector<RationalBezierPatch> read_patch_set(const std::filesystem::path& path);
void write_patch_set(const std::filesystem::path& path,
                     const std::vector<RationalBezierPatch>& patches);

/// Reads a whole JSON file, mapping parse failures to InputError.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace lsk
