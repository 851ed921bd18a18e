#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

#include "th/geometry.hpp"

namespace th {

using Json = nlohmann::json;

/// Rounds to 12 significant digits so serialized reports are stable under
/// last-bit differences in floating-point evaluation order.
double round12(double v);

Json point_json(const Point& p, std::size_t dim);
Point point_from_json(const Json& j);

/// Canonical text form: sorted keys (nlohmann's default object), two-space
/// indentation, trailing newline.
std::string dump_canonical(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace th
