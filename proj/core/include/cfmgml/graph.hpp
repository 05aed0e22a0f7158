#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cfmgml {

enum class VertexVariant { label, attribute };

const char* to_string(VertexVariant v);
std::optional<VertexVariant> vertex_variant_from_string(const std::string& s);

// Simple undirected graph. Vertices carry either a discrete non-negative
// label or a fixed-dimension real attribute vector; one variant per graph,
// and one variant per dataset.
struct Graph {
  VertexVariant variant = VertexVariant::label;
  std::vector<int> labels;                          // label variant
  std::vector<std::vector<double>> attributes;      // attribute variant
  std::vector<std::array<int, 2>> edges;            // unordered vertex pairs

  std::size_t num_vertices() const {
    return variant == VertexVariant::label ? labels.size() : attributes.size();
  }

  friend bool operator==(const Graph&, const Graph&) = default;
};

// A bag of graphs representing one object. `labels` is the bag's relevant
// class set, kept sorted ascending without duplicates. `graph_labels` is
// optional per-graph ground truth used only for evaluation; the sentinel -1
// marks a graph with no class (background).
struct Bag {
  std::string id;
  std::vector<Graph> graphs;
  std::vector<int> labels;
  std::optional<std::vector<int>> graph_labels;

  friend bool operator==(const Bag&, const Bag&) = default;
};

struct Dataset {
  int num_classes = 0;
  VertexVariant variant = VertexVariant::label;
  int attr_dim = 0;  // attribute variant only; 0 otherwise
  std::vector<Bag> bags;

  std::size_t total_graphs() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Neighbor lists; index v holds the sorted neighbors of vertex v.
std::vector<std::vector<int>> adjacency(const Graph& g);

// What the dataset is being validated for. Training requires every bag to
// have a non-empty, proper label subset (the complement set must be
// non-empty); prediction input may carry empty or missing labels.
enum class DatasetRole { training, prediction };

struct Violation {
  std::string bag_id;   // empty when dataset-level
  int graph_index = -1; // -1 when not tied to a graph
  std::string rule;
  std::string detail;

  std::string to_string() const;
};

// Returns an empty list iff all structural and label invariants hold for the
// given role. Never throws: a violation is a result, not a failure.
std::vector<Violation> validate_dataset(const Dataset& ds,
                                        DatasetRole role = DatasetRole::training);

}  // namespace cfmgml
