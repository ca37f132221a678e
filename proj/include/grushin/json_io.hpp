#pragma once

#include <string>

#include <json.hpp>

namespace grushin {

using json = nlohmann::ordered_json;

/**
 * Deterministic JSON serialization: keys keep insertion order and every
 * finite double is printed with 17 significant digits, so identical inputs
 * produce byte-identical files.  Non-finite doubles must be converted to
 * string markers ("+inf", "-inf", "nan") before serialization; json_number
 * does that.
 */
std::string dump_json(const json& j, int indent = 2);
void write_json_file(const json& j, const std::string& path);

json json_number(double x);  // finite -> number, else string marker

}  // namespace grushin
