#include "cfmgml/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cfmgml {

const char* to_string(VertexVariant v) {
  return v == VertexVariant::label ? "label" : "attribute";
}

std::optional<VertexVariant> vertex_variant_from_string(const std::string& s) {
  if (s == "label") return VertexVariant::label;
  if (s == "attribute") return VertexVariant::attribute;
  return std::nullopt;
}

std::size_t Dataset::total_graphs() const {
  std::size_t n = 0;
  for (const auto& b : bags) n += b.graphs.size();
  return n;
}

std::vector<std::vector<int>> adjacency(const Graph& g) {
  std::vector<std::vector<int>> adj(g.num_vertices());
  for (const auto& e : g.edges) {
    adj[static_cast<std::size_t>(e[0])].push_back(e[1]);
    adj[static_cast<std::size_t>(e[1])].push_back(e[0]);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

std::string Violation::to_string() const {
  std::ostringstream os;
  if (!bag_id.empty()) os << "bag " << bag_id;
  else os << "dataset";
  if (graph_index >= 0) os << " graph " << graph_index;
  os << ": " << rule;
  if (!detail.empty()) os << " (" << detail << ")";
  return os.str();
}

namespace {

void check_graph(const Dataset& ds, const Bag& bag, int gi, const Graph& g,
                 std::vector<Violation>& out) {
  auto add = [&](const std::string& rule, const std::string& detail) {
    out.push_back({bag.id, gi, rule, detail});
  };

  if (g.variant != ds.variant) {
    add("vertex variant mismatch", std::string("graph is ") + to_string(g.variant) +
                                       ", dataset is " + to_string(ds.variant));
    return;  // further checks would be meaningless
  }

  std::size_t nv = g.num_vertices();
  if (nv == 0) add("empty graph", "");

  if (g.variant == VertexVariant::label) {
    for (std::size_t v = 0; v < g.labels.size(); ++v) {
      if (g.labels[v] < 0)
        add("negative vertex label", "vertex " + std::to_string(v));
    }
  } else {
    for (std::size_t v = 0; v < g.attributes.size(); ++v) {
      const auto& x = g.attributes[v];
      if (static_cast<int>(x.size()) != ds.attr_dim)
        add("attribute dimension mismatch",
            "vertex " + std::to_string(v) + " has dim " + std::to_string(x.size()) +
                ", expected " + std::to_string(ds.attr_dim));
      for (double c : x) {
        if (!std::isfinite(c)) {
          add("non-finite attribute", "vertex " + std::to_string(v));
          break;
        }
      }
    }
  }

  std::set<std::pair<int, int>> seen;
  for (const auto& e : g.edges) {
    int u = e[0], v = e[1];
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= nv ||
        static_cast<std::size_t>(v) >= nv) {
      add("edge endpoint out of range",
          "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
      continue;
    }
    if (u == v) {
      add("self-loop", "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
      continue;
    }
    auto key = std::minmax(u, v);
    if (!seen.insert(key).second)
      add("duplicate edge",
          "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
}

}  // namespace

std::vector<Violation> validate_dataset(const Dataset& ds, DatasetRole role) {
  std::vector<Violation> out;
  if (ds.num_classes < 2)
    out.push_back({"", -1, "num_classes must be at least 2",
                   "got " + std::to_string(ds.num_classes)});
  if (ds.variant == VertexVariant::attribute && ds.attr_dim < 1)
    out.push_back({"", -1, "attribute dimension must be at least 1",
                   "got " + std::to_string(ds.attr_dim)});

  for (const auto& bag : ds.bags) {
    if (bag.graphs.empty()) out.push_back({bag.id, -1, "empty bag", ""});

    for (std::size_t i = 0; i + 1 < bag.labels.size(); ++i) {
      if (bag.labels[i] >= bag.labels[i + 1]) {
        out.push_back({bag.id, -1, "labels not sorted and unique", ""});
        break;
      }
    }
    for (int c : bag.labels) {
      if (c < 0 || c >= ds.num_classes)
        out.push_back({bag.id, -1, "label out of range", std::to_string(c)});
    }
    if (role == DatasetRole::training) {
      if (bag.labels.empty())
        out.push_back({bag.id, -1, "empty label set",
                       "training bags need at least one relevant label"});
      // With every class relevant the complement set is empty and the
      // pairwise ranking terms are undefined; reject rather than skip.
      if (!bag.labels.empty() &&
          static_cast<int>(bag.labels.size()) >= ds.num_classes)
        out.push_back({bag.id, -1, "full label set",
                       "training bags need at least one irrelevant label"});
    }

    if (bag.graph_labels) {
      if (bag.graph_labels->size() != bag.graphs.size())
        out.push_back({bag.id, -1, "graph_labels length mismatch",
                       std::to_string(bag.graph_labels->size()) + " labels for " +
                           std::to_string(bag.graphs.size()) + " graphs"});
      for (int c : *bag.graph_labels) {
        if (c < -1 || c >= ds.num_classes)  // -1 marks "no class"
          out.push_back({bag.id, -1, "graph label out of range", std::to_string(c)});
      }
    }

    for (std::size_t gi = 0; gi < bag.graphs.size(); ++gi)
      check_graph(ds, bag, static_cast<int>(gi), bag.graphs[gi], out);
  }
  return out;
}

}  // namespace cfmgml
