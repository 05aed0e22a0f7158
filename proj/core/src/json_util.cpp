#include "json_util.hpp"

namespace cfmgml::detail {

json parse_json_line(const std::string& line, const std::string& where) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(where + ": invalid record: " + e.what());
  }
}

const json& require_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

int require_int(const json& v, const char* key, const std::string& where) {
  if (!v.is_number_integer())
    throw ParseError(where + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

double require_double(const json& v, const char* key, const std::string& where) {
  if (!v.is_number())
    throw ParseError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::string require_string(const json& v, const char* key, const std::string& where) {
  if (!v.is_string())
    throw ParseError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

json graph_to_json(const Graph& g) {
  json jg;
  if (g.variant == VertexVariant::label) {
    jg["vertices"] = g.labels;
  } else {
    jg["vertices"] = g.attributes;
  }
  json edges = json::array();
  for (const auto& e : g.edges) edges.push_back({e[0], e[1]});
  jg["edges"] = std::move(edges);
  return jg;
}

Graph graph_from_json(const json& j, VertexVariant variant, int attr_dim,
                      const std::string& where) {
  Graph g;
  g.variant = variant;
  const json& verts = require_field(j, "vertices", where);
  if (!verts.is_array())
    throw ParseError(where + ": field 'vertices' must be an array");
  for (const auto& v : verts) {
    if (v.is_number_integer()) {
      if (variant != VertexVariant::label)
        throw ParseError(where + ": vertex variant mismatch: "
                                 "found integer label in attribute dataset");
      g.labels.push_back(v.get<int>());
    } else if (v.is_array()) {
      if (variant != VertexVariant::attribute)
        throw ParseError(where + ": vertex variant mismatch: "
                                 "found attribute vector in label dataset");
      std::vector<double> x;
      x.reserve(v.size());
      for (const auto& c : v) {
        if (!c.is_number())
          throw ParseError(where + ": attribute components must be numbers");
        x.push_back(c.get<double>());
      }
      if (attr_dim > 0 && static_cast<int>(x.size()) != attr_dim)
        throw ParseError(where + ": attribute vector has dimension " +
                         std::to_string(x.size()) + ", header declares " +
                         std::to_string(attr_dim));
      g.attributes.push_back(std::move(x));
    } else {
      throw ParseError(where + ": vertex must be an integer label or an "
                               "attribute array");
    }
  }
  const json& edges = require_field(j, "edges", where);
  if (!edges.is_array())
    throw ParseError(where + ": field 'edges' must be an array");
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw ParseError(where + ": edge must be a pair of vertex indices");
    g.edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return g;
}

}  // namespace cfmgml::detail
