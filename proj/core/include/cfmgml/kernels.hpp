#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cfmgml/graph.hpp"

namespace cfmgml {

enum class KernelKind { wl_subtree, vertex_histogram };

const char* to_string(KernelKind k);
std::optional<KernelKind> kernel_kind_from_string(const std::string& s);

struct KernelConfig {
  KernelKind kind = KernelKind::wl_subtree;
  std::optional<int> wl_iterations;           // wl_subtree only, h >= 0
  std::optional<double> attribute_bandwidth;  // vertex_histogram on attribute graphs
  bool normalize = false;                     // k / sqrt(k(a,a) k(b,b))

  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

// Empty string when the config is usable for the given vertex variant;
// otherwise a description of what is missing, extraneous, or mismatched.
std::string check_kernel_config(const KernelConfig& cfg, VertexVariant variant);

// All pairwise kernel values over a dataset, addressed by a flat index that
// enumerates (bag, graph-in-bag) pairs in file order. Carries the kernel
// config it was computed with so downstream consumers stay consistent.
struct GramCache {
  KernelConfig kernel;
  std::size_t num_graphs = 0;
  std::vector<std::size_t> bag_offsets;  // size num_bags + 1
  std::vector<double> values;            // row-major num_graphs x num_graphs

  double at(std::size_t a, std::size_t b) const {
    return values[a * num_graphs + b];
  }
  std::size_t flat(std::size_t bag, std::size_t graph) const {
    return bag_offsets[bag] + graph;
  }
};

// Weisfeiler-Lehman subtree kernel for node-label graphs: h rounds of
// neighborhood-multiset relabeling; the value is the sum over rounds
// 0..h of the dot product of per-round label-count histograms. Throws
// std::invalid_argument for attribute-variant input or h < 0.
double wl_subtree_kernel(const Graph& g1, const Graph& g2, int h);

// Explicit-feature-map kernel. Label graphs: dot product of vertex-label
// count vectors. Attribute graphs: sum over vertex pairs of
// exp(-gamma * ||x_u - x_v||^2), PSD as a sum of RBF evaluations.
double vertex_histogram_kernel(const Graph& g1, const Graph& g2,
                               const KernelConfig& cfg);

// Dispatch on cfg.kind and apply cfg.normalize.
double graph_kernel(const Graph& g1, const Graph& g2, const KernelConfig& cfg);

// Deterministic for fixed (ds, cfg) and independent of `threads`. The WL
// relabeling dictionary is built in a single-threaded pass over all graphs
// so compressed labels are comparable across the whole collection.
GramCache compute_gram(const Dataset& ds, const KernelConfig& cfg, int threads = 1);

// Rectangular block K[i][j] = k(rows[i], cols[j]); used for scoring new
// graphs against a model's representative graphs.
std::vector<std::vector<double>> cross_kernel_matrix(const std::vector<Graph>& rows,
                                                     const std::vector<Graph>& cols,
                                                     const KernelConfig& cfg,
                                                     int threads = 1);

// CSV with a header row of flat indices; values in round-trip precision.
// The CSV stores only the matrix, so reading takes the kernel config the
// file was produced with.
void write_gram_csv(const GramCache& gram, const std::string& path);
GramCache read_gram_csv(const std::string& path, const Dataset& ds,
                        const KernelConfig& cfg);

}  // namespace cfmgml
