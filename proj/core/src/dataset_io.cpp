#include "cfmgml/dataset_io.hpp"

#include <algorithm>
#include <fstream>

#include "cfmgml/errors.hpp"
#include "cfmgml/version.hpp"
#include "json_util.hpp"

namespace cfmgml {

using detail::json;

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ParseError(path + ": no header record");

  json header = detail::parse_json_line(line, "line 1");
  int version = detail::require_int(detail::require_field(header, "version", "line 1"),
                                    "version", "line 1");
  if (version != kDatasetFormatVersion)
    throw ParseError("line 1: unsupported dataset format version " +
                     std::to_string(version));

  Dataset ds;
  ds.num_classes = detail::require_int(
      detail::require_field(header, "num_classes", "line 1"), "num_classes", "line 1");
  std::string variant_str = detail::require_string(
      detail::require_field(header, "vertex_variant", "line 1"), "vertex_variant",
      "line 1");
  auto variant = vertex_variant_from_string(variant_str);
  if (!variant)
    throw ParseError("line 1: unknown vertex_variant '" + variant_str + "'");
  ds.variant = *variant;
  if (ds.variant == VertexVariant::attribute) {
    ds.attr_dim = detail::require_int(
        detail::require_field(header, "attr_dim", "line 1"), "attr_dim", "line 1");
    if (ds.attr_dim < 1)
      throw ParseError("line 1: attr_dim must be at least 1");
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = "line " + std::to_string(line_no);
    json jb = detail::parse_json_line(line, where);

    Bag bag;
    bag.id = detail::require_string(detail::require_field(jb, "id", where), "id", where);

    const json& jlabels = detail::require_field(jb, "labels", where);
    if (!jlabels.is_array())
      throw ParseError(where + ": field 'labels' must be an array");
    for (const auto& c : jlabels) {
      int v = detail::require_int(c, "labels", where);
      if (v < 0 || v >= ds.num_classes)
        throw ParseError(where + ": label " + std::to_string(v) +
                         " out of range for num_classes " +
                         std::to_string(ds.num_classes));
      bag.labels.push_back(v);
    }
    std::sort(bag.labels.begin(), bag.labels.end());
    bag.labels.erase(std::unique(bag.labels.begin(), bag.labels.end()),
                     bag.labels.end());

    const json& jgraphs = detail::require_field(jb, "graphs", where);
    if (!jgraphs.is_array())
      throw ParseError(where + ": field 'graphs' must be an array");
    for (const auto& jg : jgraphs)
      bag.graphs.push_back(detail::graph_from_json(jg, ds.variant, ds.attr_dim, where));

    if (auto it = jb.find("graph_labels"); it != jb.end()) {
      if (!it->is_array())
        throw ParseError(where + ": field 'graph_labels' must be an array");
      std::vector<int> gl;
      for (const auto& c : *it) {
        int v = detail::require_int(c, "graph_labels", where);
        if (v < -1 || v >= ds.num_classes)
          throw ParseError(where + ": graph label " + std::to_string(v) +
                           " out of range");
        gl.push_back(v);
      }
      bag.graph_labels = std::move(gl);
    }

    ds.bags.push_back(std::move(bag));
  }
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open dataset file for writing: " + path);

  json header;
  header["version"] = kDatasetFormatVersion;
  header["num_classes"] = ds.num_classes;
  header["vertex_variant"] = to_string(ds.variant);
  if (ds.variant == VertexVariant::attribute) header["attr_dim"] = ds.attr_dim;
  out << header.dump() << '\n';

  for (const auto& bag : ds.bags) {
    json jb;
    jb["id"] = bag.id;
    jb["labels"] = bag.labels;
    json jgraphs = json::array();
    for (const auto& g : bag.graphs) jgraphs.push_back(detail::graph_to_json(g));
    jb["graphs"] = std::move(jgraphs);
    if (bag.graph_labels) jb["graph_labels"] = *bag.graph_labels;
    out << jb.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace cfmgml
