#include "cfmgml/predictor.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "cfmgml/errors.hpp"
#include "cfmgml/version.hpp"
#include "json_util.hpp"

namespace cfmgml {

using detail::json;

const char* to_string(GraphPredictMode m) {
  return m == GraphPredictMode::argmax ? "argmax" : "threshold";
}

const char* to_string(BagPredictMode m) {
  return m == BagPredictMode::bag_union ? "union" : "threshold_bag";
}

std::vector<std::vector<double>> graph_scores(const DualModel& m,
                                              const std::vector<Graph>& graphs,
                                              int threads) {
  int n = m.num_bags();
  int C = m.num_classes;

  // The same in-bag graph often represents several classes; evaluate each
  // distinct representative once.
  std::vector<Graph> distinct;
  std::vector<std::vector<std::size_t>> slot(
      static_cast<std::size_t>(n), std::vector<std::size_t>(static_cast<std::size_t>(C)));
  std::map<std::pair<int, int>, std::size_t> seen;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < C; ++c) {
      auto key = std::make_pair(i, m.repr[static_cast<std::size_t>(i)]
                                          [static_cast<std::size_t>(c)]);
      auto it = seen.find(key);
      if (it == seen.end()) {
        it = seen.emplace(key, distinct.size()).first;
        distinct.push_back(m.repr_graphs[static_cast<std::size_t>(i)]
                                        [static_cast<std::size_t>(c)]);
      }
      slot[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = it->second;
    }

  auto cross = cross_kernel_matrix(distinct, graphs, m.kernel, threads);

  std::vector<std::vector<double>> scores(
      graphs.size(), std::vector<double>(static_cast<std::size_t>(C), 0.0));
  for (std::size_t j = 0; j < graphs.size(); ++j)
    for (int c = 0; c < C; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += m.scale[static_cast<std::size_t>(i)] *
             m.coeff[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] *
             cross[slot[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]][j];
      scores[j][static_cast<std::size_t>(c)] = s;
    }
  return scores;
}

int argmax_class(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("argmax_class: empty scores");
  int best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

std::vector<int> threshold_set(std::span<const double> scores) {
  std::vector<int> out;
  for (std::size_t c = 0; c < scores.size(); ++c)
    if (scores[c] > 0.0) out.push_back(static_cast<int>(c));
  return out;
}

int predict_graph_argmax(const DualModel& m, const Graph& g) {
  auto s = graph_scores(m, {g});
  return argmax_class(s[0]);
}

std::vector<int> predict_graph_threshold(const DualModel& m, const Graph& g) {
  auto s = graph_scores(m, {g});
  return threshold_set(s[0]);
}

std::pair<std::vector<int>, std::vector<double>> predict_bag(const DualModel& m,
                                                             const Bag& b,
                                                             BagPredictMode mode,
                                                             int threads) {
  if (b.graphs.empty()) throw std::invalid_argument("predict_bag: empty bag");
  auto per_graph = graph_scores(m, b.graphs, threads);

  std::vector<double> bag_scores(static_cast<std::size_t>(m.num_classes), 0.0);
  for (int c = 0; c < m.num_classes; ++c) {
    double best = per_graph[0][static_cast<std::size_t>(c)];
    for (std::size_t j = 1; j < per_graph.size(); ++j)
      best = std::max(best, per_graph[j][static_cast<std::size_t>(c)]);
    bag_scores[static_cast<std::size_t>(c)] = best;
  }

  std::vector<int> labels;
  if (mode == BagPredictMode::threshold_bag) {
    labels = threshold_set(bag_scores);
  } else {
    std::vector<bool> in(static_cast<std::size_t>(m.num_classes), false);
    for (const auto& row : per_graph)
      for (int c : threshold_set(row)) in[static_cast<std::size_t>(c)] = true;
    for (int c = 0; c < m.num_classes; ++c)
      if (in[static_cast<std::size_t>(c)]) labels.push_back(c);
  }
  return {std::move(labels), std::move(bag_scores)};
}

std::vector<BagPrediction> predict_dataset(const DualModel& m, const Dataset& ds,
                                           GraphPredictMode graph_mode,
                                           BagPredictMode bag_mode, int threads) {
  std::vector<BagPrediction> out;
  out.reserve(ds.bags.size());
  for (const auto& bag : ds.bags) {
    BagPrediction bp;
    bp.id = bag.id;
    auto per_graph = graph_scores(m, bag.graphs, threads);

    bp.scores.assign(static_cast<std::size_t>(m.num_classes), 0.0);
    for (int c = 0; c < m.num_classes; ++c) {
      double best = per_graph[0][static_cast<std::size_t>(c)];
      for (std::size_t j = 1; j < per_graph.size(); ++j)
        best = std::max(best, per_graph[j][static_cast<std::size_t>(c)]);
      bp.scores[static_cast<std::size_t>(c)] = best;
    }

    if (bag_mode == BagPredictMode::threshold_bag) {
      bp.labels = threshold_set(bp.scores);
    } else {
      std::vector<bool> in(static_cast<std::size_t>(m.num_classes), false);
      for (const auto& row : per_graph)
        for (int c : threshold_set(row)) in[static_cast<std::size_t>(c)] = true;
      for (int c = 0; c < m.num_classes; ++c)
        if (in[static_cast<std::size_t>(c)]) bp.labels.push_back(c);
    }
    bp.empty_set = bp.labels.empty();

    if (graph_mode == GraphPredictMode::argmax) {
      for (const auto& row : per_graph) bp.graph_argmax.push_back(argmax_class(row));
    } else {
      for (const auto& row : per_graph) bp.graph_sets.push_back(threshold_set(row));
    }
    out.push_back(std::move(bp));
  }
  return out;
}

int most_frequent_label(const Dataset& ds) {
  std::vector<long long> counts(static_cast<std::size_t>(ds.num_classes), 0);
  for (const auto& bag : ds.bags)
    for (int c : bag.labels) counts[static_cast<std::size_t>(c)] += 1;
  long long best = -1;
  int best_c = -1;
  for (int c = 0; c < ds.num_classes; ++c)
    if (counts[static_cast<std::size_t>(c)] > best) {
      best = counts[static_cast<std::size_t>(c)];
      best_c = c;
    }
  if (best <= 0)
    throw std::invalid_argument("most_frequent_label: dataset has no bag labels");
  return best_c;
}

void write_predictions(const PredictionFile& pf, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open prediction file for writing: " + path);
  json header;
  header["format"] = "cfmgml-predictions";
  header["version"] = kPredictionFormatVersion;
  header["num_classes"] = pf.num_classes;
  header["graph_mode"] = to_string(pf.graph_mode);
  header["bag_mode"] = to_string(pf.bag_mode);
  out << header.dump() << '\n';
  for (const auto& bp : pf.bags) {
    json j;
    j["id"] = bp.id;
    j["labels"] = bp.labels;
    j["scores"] = bp.scores;
    if (pf.graph_mode == GraphPredictMode::argmax) j["graph_argmax"] = bp.graph_argmax;
    else j["graph_sets"] = bp.graph_sets;
    j["empty_set"] = bp.empty_set;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

PredictionFile read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prediction file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw ParseError(path + ": no header record");
  json header = detail::parse_json_line(line, "line 1");
  if (detail::require_string(detail::require_field(header, "format", "line 1"),
                             "format", "line 1") != "cfmgml-predictions")
    throw ParseError("line 1: not a prediction file");
  PredictionFile pf;
  pf.num_classes = detail::require_int(
      detail::require_field(header, "num_classes", "line 1"), "num_classes", "line 1");
  std::string gm = detail::require_string(
      detail::require_field(header, "graph_mode", "line 1"), "graph_mode", "line 1");
  pf.graph_mode =
      gm == "argmax" ? GraphPredictMode::argmax : GraphPredictMode::threshold;
  std::string bm = detail::require_string(
      detail::require_field(header, "bag_mode", "line 1"), "bag_mode", "line 1");
  pf.bag_mode = bm == "union" ? BagPredictMode::bag_union : BagPredictMode::threshold_bag;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = "line " + std::to_string(line_no);
    json j = detail::parse_json_line(line, where);
    BagPrediction bp;
    bp.id = detail::require_string(detail::require_field(j, "id", where), "id", where);
    for (const auto& v : detail::require_field(j, "labels", where))
      bp.labels.push_back(detail::require_int(v, "labels", where));
    for (const auto& v : detail::require_field(j, "scores", where))
      bp.scores.push_back(detail::require_double(v, "scores", where));
    if (static_cast<int>(bp.scores.size()) != pf.num_classes)
      throw ParseError(where + ": expected " + std::to_string(pf.num_classes) +
                       " scores");
    if (auto it = j.find("graph_argmax"); it != j.end())
      for (const auto& v : *it)
        bp.graph_argmax.push_back(detail::require_int(v, "graph_argmax", where));
    if (auto it = j.find("graph_sets"); it != j.end())
      for (const auto& row : *it) {
        std::vector<int> s;
        for (const auto& v : row) s.push_back(detail::require_int(v, "graph_sets", where));
        bp.graph_sets.push_back(std::move(s));
      }
    if (auto it = j.find("empty_set"); it != j.end() && it->is_boolean())
      bp.empty_set = it->get<bool>();
    pf.bags.push_back(std::move(bp));
  }
  return pf;
}

}  // namespace cfmgml
