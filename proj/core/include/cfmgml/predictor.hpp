#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfmgml/graph.hpp"
#include "cfmgml/model.hpp"

namespace cfmgml {

enum class GraphPredictMode { argmax, threshold };
// bag_union: union of the graphs' thresholded label sets.
// threshold_bag: {c : max-over-graphs score > 0}. The two coincide.
enum class BagPredictMode { bag_union, threshold_bag };

const char* to_string(GraphPredictMode m);
const char* to_string(BagPredictMode m);

// Per-graph class scores [graph][class]. Kernel evaluations against the
// model's representative graphs are computed here (deduplicated per bag);
// deterministic and independent of `threads`.
std::vector<std::vector<double>> graph_scores(const DualModel& m,
                                              const std::vector<Graph>& graphs,
                                              int threads = 1);

// Ties break to the lowest class index.
int argmax_class(std::span<const double> scores);
// {c : scores[c] > 0}; the virtual zero label is the fixed threshold.
std::vector<int> threshold_set(std::span<const double> scores);

int predict_graph_argmax(const DualModel& m, const Graph& g);
std::vector<int> predict_graph_threshold(const DualModel& m, const Graph& g);

// Bag label set and the per-class scores F_c = max over the bag's graphs.
// Scores are returned in both modes for ranking-based metrics.
std::pair<std::vector<int>, std::vector<double>> predict_bag(const DualModel& m,
                                                             const Bag& b,
                                                             BagPredictMode mode,
                                                             int threads = 1);

struct BagPrediction {
  std::string id;
  std::vector<int> labels;        // predicted bag label set, sorted
  std::vector<double> scores;     // F_c per class
  std::vector<int> graph_argmax;  // argmax mode: one class per graph
  std::vector<std::vector<int>> graph_sets;  // threshold mode: one set per graph
  bool empty_set = false;  // bag set came out empty; reported as-is

  friend bool operator==(const BagPrediction&, const BagPrediction&) = default;
};

std::vector<BagPrediction> predict_dataset(const DualModel& m, const Dataset& ds,
                                           GraphPredictMode graph_mode,
                                           BagPredictMode bag_mode, int threads = 1);

// Most frequent class across the training bags' label sets; the Dummy
// baseline predicts it everywhere. Ties break to the lowest class.
int most_frequent_label(const Dataset& ds);

struct PredictionFile {
  int num_classes = 0;
  GraphPredictMode graph_mode = GraphPredictMode::argmax;
  BagPredictMode bag_mode = BagPredictMode::bag_union;
  std::vector<BagPrediction> bags;
};

// Line-delimited records, one bag per line after a header record.
void write_predictions(const PredictionFile& pf, const std::string& path);
PredictionFile read_predictions(const std::string& path);

}  // namespace cfmgml
