#include "cfmgml/synthgen.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cfmgml/rng.hpp"

namespace cfmgml {

namespace {

void check_config(const SynthConfig& cfg) {
  if (cfg.num_classes < 2)
    throw std::invalid_argument("synthgen: num_classes must be >= 2");
  if (cfg.num_bags < 1) throw std::invalid_argument("synthgen: num_bags must be >= 1");
  if (cfg.graphs_min < 1 || cfg.graphs_max < cfg.graphs_min)
    throw std::invalid_argument("synthgen: invalid graphs-per-bag range");
  if (cfg.labels_max < 1 || cfg.labels_max > cfg.num_classes - 1)
    throw std::invalid_argument(
        "synthgen: labels_max must lie in [1, num_classes-1]");
  if (cfg.motif_min < 1 || cfg.motif_max < cfg.motif_min)
    throw std::invalid_argument("synthgen: invalid motif size range");
  if (cfg.edge_noise < 0.0 || cfg.edge_noise >= 1.0)
    throw std::invalid_argument("synthgen: edge_noise must lie in [0,1)");
  if (cfg.variant == VertexVariant::attribute && cfg.attr_dim < 1)
    throw std::invalid_argument("synthgen: attr_dim must be >= 1");
  if (cfg.attr_noise < 0.0)
    throw std::invalid_argument("synthgen: attr_noise must be >= 0");
  if (cfg.background_per_bag < 0)
    throw std::invalid_argument("synthgen: background_per_bag must be >= 0");
}

// Class-specific attribute centroid component; integer-derived so datasets
// are identical across platforms.
double centroid_component(int cls, int k) {
  return static_cast<double>((cls * 31 + k * 17) % 8) * 0.75;
}

std::vector<std::array<int, 2>> ring_edges(int size) {
  std::vector<std::array<int, 2>> edges;
  if (size == 2) {
    edges.push_back({0, 1});
  } else if (size >= 3) {
    for (int v = 0; v + 1 < size; ++v) edges.push_back({v, v + 1});
    edges.push_back({0, size - 1});
  }
  return edges;
}

// Flip each vertex pair's edge independently; pairs visited in fixed order
// so the draw sequence is reproducible.
void perturb_edges(Graph& g, double rho, Rng& rng) {
  if (rho <= 0.0) return;
  int nv = static_cast<int>(g.num_vertices());
  std::set<std::pair<int, int>> present;
  for (const auto& e : g.edges) present.insert(std::minmax(e[0], e[1]));
  std::vector<std::array<int, 2>> edges;
  for (int u = 0; u < nv; ++u)
    for (int v = u + 1; v < nv; ++v) {
      bool has = present.count({u, v}) > 0;
      if (rng.bernoulli(rho)) has = !has;
      if (has) edges.push_back({u, v});
    }
  g.edges = std::move(edges);
}

}  // namespace

Graph motif_graph(const SynthConfig& cfg, int cls, int size) {
  Graph g;
  g.variant = cfg.variant;
  if (cfg.variant == VertexVariant::label) {
    for (int v = 0; v < size; ++v) g.labels.push_back(cls * 1000 + v % 3);
  } else {
    for (int v = 0; v < size; ++v) {
      std::vector<double> x(static_cast<std::size_t>(cfg.attr_dim));
      for (int k = 0; k < cfg.attr_dim; ++k)
        x[static_cast<std::size_t>(k)] = centroid_component(cls, k);
      g.attributes.push_back(std::move(x));
    }
  }
  g.edges = ring_edges(size);
  return g;
}

namespace {

Graph sample_graph(const SynthConfig& cfg, int cls, Rng& rng) {
  int size = cfg.motif_min +
             static_cast<int>(rng.uniform_index(
                 static_cast<std::uint64_t>(cfg.motif_max - cfg.motif_min + 1)));
  Graph g = motif_graph(cfg, cls, size);
  if (cfg.variant == VertexVariant::attribute && cfg.attr_noise > 0.0) {
    for (auto& x : g.attributes)
      for (auto& c : x) c += rng.normal(0.0, cfg.attr_noise);
  }
  perturb_edges(g, cfg.edge_noise, rng);
  return g;
}

}  // namespace

Dataset generate(const SynthConfig& cfg) {
  check_config(cfg);
  Rng rng(cfg.seed);

  Dataset ds;
  ds.num_classes = cfg.num_classes;
  ds.variant = cfg.variant;
  ds.attr_dim = cfg.variant == VertexVariant::attribute ? cfg.attr_dim : 0;

  for (int i = 0; i < cfg.num_bags; ++i) {
    Bag bag;
    bag.id = "b" + std::to_string(i);

    int label_count =
        1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(cfg.labels_max)));
    // Partial Fisher-Yates draw of label_count distinct classes.
    std::vector<int> pool(static_cast<std::size_t>(cfg.num_classes));
    std::iota(pool.begin(), pool.end(), 0);
    for (int k = 0; k < label_count; ++k) {
      int j = k + static_cast<int>(rng.uniform_index(
                      static_cast<std::uint64_t>(cfg.num_classes - k)));
      std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> labels(pool.begin(), pool.begin() + label_count);
    std::sort(labels.begin(), labels.end());
    bag.labels = labels;

    int bag_size = cfg.graphs_min +
                   static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(
                       cfg.graphs_max - cfg.graphs_min + 1)));
    bag_size = std::max(bag_size, label_count);

    std::vector<int> planted;
    planted.reserve(static_cast<std::size_t>(bag_size));
    for (int c : labels) planted.push_back(c);  // every drawn label gets a graph
    for (int k = label_count; k < bag_size; ++k)
      planted.push_back(labels[rng.uniform_index(labels.size())]);

    std::vector<int> graph_labels;
    for (int cls : planted) {
      bag.graphs.push_back(sample_graph(cfg, cls, rng));
      graph_labels.push_back(cls);
    }
    for (int k = 0; k < cfg.background_per_bag; ++k) {
      bag.graphs.push_back(sample_graph(cfg, cfg.num_classes, rng));
      graph_labels.push_back(-1);
    }
    bag.graph_labels = std::move(graph_labels);
    ds.bags.push_back(std::move(bag));
  }
  return ds;
}

}  // namespace cfmgml
