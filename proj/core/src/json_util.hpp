#pragma once

// Internal json <-> domain-type conversions shared by the file formats.
// Not installed; public headers stay free of the json dependency.

#include <json.hpp>

#include <string>

#include "cfmgml/errors.hpp"
#include "cfmgml/graph.hpp"

namespace cfmgml::detail {

using json = nlohmann::json;

// `where` is a location like "line 3" used to prefix error messages.
json parse_json_line(const std::string& line, const std::string& where);

const json& require_field(const json& obj, const char* key, const std::string& where);

int require_int(const json& v, const char* key, const std::string& where);
double require_double(const json& v, const char* key, const std::string& where);
std::string require_string(const json& v, const char* key, const std::string& where);

json graph_to_json(const Graph& g);
Graph graph_from_json(const json& j, VertexVariant variant, int attr_dim,
                      const std::string& where);

}  // namespace cfmgml::detail
