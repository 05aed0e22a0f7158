#include "cfmgml/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cfmgml/parallel.hpp"
#include "num_format.hpp"

namespace cfmgml {

const char* to_string(KernelKind k) {
  return k == KernelKind::wl_subtree ? "wl_subtree" : "vertex_histogram";
}

std::optional<KernelKind> kernel_kind_from_string(const std::string& s) {
  if (s == "wl_subtree") return KernelKind::wl_subtree;
  if (s == "vertex_histogram") return KernelKind::vertex_histogram;
  return std::nullopt;
}

std::string check_kernel_config(const KernelConfig& cfg, VertexVariant variant) {
  if (cfg.kind == KernelKind::wl_subtree) {
    if (variant != VertexVariant::label)
      return "wl_subtree kernel requires node-label graphs";
    if (!cfg.wl_iterations) return "wl_subtree kernel requires wl_iterations";
    if (*cfg.wl_iterations < 0) return "wl_iterations must be >= 0";
    if (cfg.attribute_bandwidth)
      return "attribute_bandwidth is not a wl_subtree parameter";
  } else {
    if (cfg.wl_iterations)
      return "wl_iterations is not a vertex_histogram parameter";
    if (variant == VertexVariant::attribute) {
      if (!cfg.attribute_bandwidth)
        return "vertex_histogram kernel on attribute graphs requires "
               "attribute_bandwidth";
      if (*cfg.attribute_bandwidth <= 0.0)
        return "attribute_bandwidth must be > 0";
    } else if (cfg.attribute_bandwidth) {
      return "attribute_bandwidth is only used on attribute graphs";
    }
  }
  return {};
}

namespace {

// Sorted (label, count) pairs. Counts are integers, so dot products are
// exact in double arithmetic regardless of summation order.
using Hist = std::vector<std::pair<int, long long>>;

Hist histogram(std::vector<int> labels) {
  std::sort(labels.begin(), labels.end());
  Hist h;
  for (std::size_t i = 0; i < labels.size();) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    h.emplace_back(labels[i], static_cast<long long>(j - i));
    i = j;
  }
  return h;
}

double hist_dot(const Hist& a, const Hist& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) ++i;
    else if (a[i].first > b[j].first) ++j;
    else {
      s += static_cast<double>(a[i].second) * static_cast<double>(b[j].second);
      ++i, ++j;
    }
  }
  return s;
}

// Per-graph label-count histograms for WL rounds 0..h. One relabeling
// dictionary per round is shared by every graph in `graphs`; ids are
// assigned in a deterministic single-threaded scan. The kernel value is
// independent of the dictionary because two vertices receive the same
// compressed label iff their depth-r neighborhood trees coincide.
std::vector<std::vector<Hist>> wl_round_histograms(
    const std::vector<const Graph*>& graphs, int h) {
  std::size_t n = graphs.size();
  std::vector<std::vector<Hist>> out(n);
  std::vector<std::vector<int>> cur(n);
  std::vector<std::vector<std::vector<int>>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    cur[i] = graphs[i]->labels;
    adj[i] = adjacency(*graphs[i]);
    out[i].push_back(histogram(cur[i]));
  }
  for (int round = 1; round <= h; ++round) {
    std::map<std::vector<int>, int> dict;
    std::vector<std::vector<int>> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      next[i].resize(cur[i].size());
      for (std::size_t v = 0; v < cur[i].size(); ++v) {
        std::vector<int> sig;
        sig.reserve(adj[i][v].size() + 1);
        sig.push_back(cur[i][v]);
        for (int nb : adj[i][v]) sig.push_back(cur[i][static_cast<std::size_t>(nb)]);
        std::sort(sig.begin() + 1, sig.end());
        auto [it, inserted] = dict.emplace(std::move(sig), static_cast<int>(dict.size()));
        next[i][v] = it->second;
      }
    }
    cur = std::move(next);
    for (std::size_t i = 0; i < n; ++i) out[i].push_back(histogram(cur[i]));
  }
  return out;
}

double wl_feature_dot(const std::vector<Hist>& a, const std::vector<Hist>& b) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) s += hist_dot(a[r], b[r]);
  return s;
}

void require_label_variant(const Graph& g, const char* who) {
  if (g.variant != VertexVariant::label)
    throw std::invalid_argument(std::string(who) +
                                ": variant mismatch: expected node-label graph");
}

double attribute_sum_kernel(const Graph& g1, const Graph& g2, double gamma) {
  double s = 0.0;
  for (const auto& x : g1.attributes) {
    for (const auto& y : g2.attributes) {
      if (x.size() != y.size())
        throw std::invalid_argument(
            "vertex_histogram_kernel: mismatched attribute dimensions " +
            std::to_string(x.size()) + " vs " + std::to_string(y.size()));
      double d2 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        double d = x[k] - y[k];
        d2 += d * d;
      }
      s += std::exp(-gamma * d2);
    }
  }
  return s;
}

double raw_kernel(const Graph& g1, const Graph& g2, const KernelConfig& cfg) {
  if (cfg.kind == KernelKind::wl_subtree)
    return wl_subtree_kernel(g1, g2, cfg.wl_iterations.value_or(0));
  return vertex_histogram_kernel(g1, g2, cfg);
}

double normalized(double kab, double kaa, double kbb) {
  double d = kaa * kbb;
  if (d <= 0.0) return 0.0;
  return kab / std::sqrt(d);
}

}  // namespace

double wl_subtree_kernel(const Graph& g1, const Graph& g2, int h) {
  if (h < 0) throw std::invalid_argument("wl_subtree_kernel: h must be >= 0");
  require_label_variant(g1, "wl_subtree_kernel");
  require_label_variant(g2, "wl_subtree_kernel");
  auto feats = wl_round_histograms({&g1, &g2}, h);
  return wl_feature_dot(feats[0], feats[1]);
}

double vertex_histogram_kernel(const Graph& g1, const Graph& g2,
                               const KernelConfig& cfg) {
  if (g1.variant != g2.variant)
    throw std::invalid_argument("vertex_histogram_kernel: variant mismatch");
  if (g1.variant == VertexVariant::label)
    return hist_dot(histogram(g1.labels), histogram(g2.labels));
  if (!cfg.attribute_bandwidth || *cfg.attribute_bandwidth <= 0.0)
    throw std::invalid_argument(
        "vertex_histogram_kernel: attribute graphs require attribute_bandwidth > 0");
  return attribute_sum_kernel(g1, g2, *cfg.attribute_bandwidth);
}

double graph_kernel(const Graph& g1, const Graph& g2, const KernelConfig& cfg) {
  double k = raw_kernel(g1, g2, cfg);
  if (!cfg.normalize) return k;
  return normalized(k, raw_kernel(g1, g1, cfg), raw_kernel(g2, g2, cfg));
}

GramCache compute_gram(const Dataset& ds, const KernelConfig& cfg, int threads) {
  if (auto err = check_kernel_config(cfg, ds.variant); !err.empty())
    throw std::invalid_argument("compute_gram: " + err);

  GramCache gram;
  gram.kernel = cfg;
  gram.bag_offsets.resize(ds.bags.size() + 1, 0);
  std::vector<const Graph*> graphs;
  for (std::size_t i = 0; i < ds.bags.size(); ++i) {
    gram.bag_offsets[i] = graphs.size();
    for (const auto& g : ds.bags[i].graphs) graphs.push_back(&g);
  }
  gram.bag_offsets[ds.bags.size()] = graphs.size();
  std::size_t n = graphs.size();
  gram.num_graphs = n;
  gram.values.assign(n * n, 0.0);

  for (std::size_t a = 0; a < n; ++a) {
    if (graphs[a]->variant != ds.variant)
      throw std::invalid_argument("compute_gram: variant mismatch at flat index " +
                                  std::to_string(a));
  }

  if (cfg.kind == KernelKind::wl_subtree ||
      ds.variant == VertexVariant::label) {
    int rounds = cfg.kind == KernelKind::wl_subtree ? *cfg.wl_iterations : 0;
    auto feats = wl_round_histograms(graphs, rounds);
    parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t a = lo; a < hi; ++a)
        for (std::size_t b = a; b < n; ++b)
          gram.values[a * n + b] = wl_feature_dot(feats[a], feats[b]);
    });
  } else {
    double gamma = *cfg.attribute_bandwidth;
    // Attribute dimensions were not necessarily validated upstream; check
    // once here so the parallel section cannot throw.
    for (std::size_t a = 0; a < n; ++a) {
      for (const auto& x : graphs[a]->attributes) {
        if (static_cast<int>(x.size()) != ds.attr_dim)
          throw std::invalid_argument(
              "compute_gram: attribute dimension mismatch at flat index " +
              std::to_string(a));
      }
    }
    parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t a = lo; a < hi; ++a)
        for (std::size_t b = a; b < n; ++b)
          gram.values[a * n + b] =
              attribute_sum_kernel(*graphs[a], *graphs[b], gamma);
    });
  }

  // Mirror the upper triangle: exact symmetry by construction.
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < a; ++b) gram.values[a * n + b] = gram.values[b * n + a];

  if (cfg.normalize) {
    std::vector<double> diag(n);
    for (std::size_t a = 0; a < n; ++a) diag[a] = gram.values[a * n + a];
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        gram.values[a * n + b] = normalized(gram.values[a * n + b], diag[a], diag[b]);
  }
  return gram;
}

std::vector<std::vector<double>> cross_kernel_matrix(const std::vector<Graph>& rows,
                                                     const std::vector<Graph>& cols,
                                                     const KernelConfig& cfg,
                                                     int threads) {
  std::vector<std::vector<double>> out(rows.size(),
                                       std::vector<double>(cols.size(), 0.0));
  if (rows.empty() || cols.empty()) return out;

  VertexVariant variant = rows.front().variant;
  if (auto err = check_kernel_config(cfg, variant); !err.empty())
    throw std::invalid_argument("cross_kernel_matrix: " + err);
  for (const auto& g : rows)
    if (g.variant != variant)
      throw std::invalid_argument("cross_kernel_matrix: variant mismatch in rows");
  for (const auto& g : cols)
    if (g.variant != variant)
      throw std::invalid_argument("cross_kernel_matrix: variant mismatch in columns");

  if (cfg.kind == KernelKind::wl_subtree || variant == VertexVariant::label) {
    int h = cfg.kind == KernelKind::wl_subtree ? *cfg.wl_iterations : 0;
    std::vector<const Graph*> all;
    for (const auto& g : rows) all.push_back(&g);
    for (const auto& g : cols) all.push_back(&g);
    auto feats = wl_round_histograms(all, h);
    std::vector<double> row_diag(rows.size(), 1.0), col_diag(cols.size(), 1.0);
    if (cfg.normalize) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        row_diag[i] = wl_feature_dot(feats[i], feats[i]);
      for (std::size_t j = 0; j < cols.size(); ++j)
        col_diag[j] = wl_feature_dot(feats[rows.size() + j], feats[rows.size() + j]);
    }
    parallel_for(cols.size(), threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j)
        for (std::size_t i = 0; i < rows.size(); ++i) {
          double k = wl_feature_dot(feats[i], feats[rows.size() + j]);
          out[i][j] = cfg.normalize ? normalized(k, row_diag[i], col_diag[j]) : k;
        }
    });
  } else {
    double gamma = *cfg.attribute_bandwidth;
    std::vector<double> row_diag(rows.size(), 1.0), col_diag(cols.size(), 1.0);
    if (cfg.normalize) {
      for (std::size_t i = 0; i < rows.size(); ++i)
        row_diag[i] = attribute_sum_kernel(rows[i], rows[i], gamma);
      for (std::size_t j = 0; j < cols.size(); ++j)
        col_diag[j] = attribute_sum_kernel(cols[j], cols[j], gamma);
    }
    parallel_for(cols.size(), threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t j = lo; j < hi; ++j)
        for (std::size_t i = 0; i < rows.size(); ++i) {
          double k = attribute_sum_kernel(rows[i], cols[j], gamma);
          out[i][j] = cfg.normalize ? normalized(k, row_diag[i], col_diag[j]) : k;
        }
    });
  }
  return out;
}

void write_gram_csv(const GramCache& gram, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open gram file for writing: " + path);
  std::size_t n = gram.num_graphs;
  for (std::size_t a = 0; a < n; ++a) out << (a ? "," : "") << a;
  out << '\n';
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (b) out << ',';
      out << detail::format_double(gram.at(a, b));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) fields.push_back(cur);
  return fields;
}

}  // namespace

GramCache read_gram_csv(const std::string& path, const Dataset& ds,
                        const KernelConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gram file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty gram file");
  std::size_t n = split_csv(line).size();
  if (n != ds.total_graphs())
    throw ParseError(path + ": gram has " + std::to_string(n) +
                     " graphs, dataset has " + std::to_string(ds.total_graphs()));

  GramCache gram;
  gram.kernel = cfg;
  gram.num_graphs = n;
  gram.bag_offsets.resize(ds.bags.size() + 1, 0);
  std::size_t off = 0;
  for (std::size_t i = 0; i < ds.bags.size(); ++i) {
    gram.bag_offsets[i] = off;
    off += ds.bags[i].graphs.size();
  }
  gram.bag_offsets[ds.bags.size()] = off;
  gram.values.assign(n * n, 0.0);

  for (std::size_t a = 0; a < n; ++a) {
    if (!std::getline(in, line))
      throw ParseError(path + ": expected " + std::to_string(n) +
                       " matrix rows, got " + std::to_string(a));
    auto fields = split_csv(line);
    if (fields.size() != n)
      throw ParseError(path + ": row " + std::to_string(a) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(n));
    for (std::size_t b = 0; b < n; ++b)
      gram.values[a * n + b] =
          detail::parse_double(fields[b].data(), fields[b].data() + fields[b].size(),
                               path + " row " + std::to_string(a));
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (gram.at(a, b) != gram.at(b, a))
        throw ParseError(path + ": matrix is not symmetric at (" +
                         std::to_string(a) + "," + std::to_string(b) + ")");
  return gram;
}

}  // namespace cfmgml
