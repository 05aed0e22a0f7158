#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cfmgml {

// Bag-level multi-label measures plus optional graph-level accuracy.
// All rates lie in [0,1]; coverage_raw is the unnormalized variant
// (mean max-rank minus one, in [0, C-1]).
struct MetricReport {
  std::optional<double> graph_accuracy;
  double one_error = 0.0;
  double hamming_loss = 0.0;
  double coverage = 0.0;      // normalized by the class count
  double coverage_raw = 0.0;
  double ranking_loss = 0.0;
  double average_precision = 0.0;
  double macro_f1 = 0.0;

  // Per-bag components, same order as the inputs.
  std::vector<double> per_bag_one_error;
  std::vector<double> per_bag_hamming;
  std::vector<double> per_bag_coverage;  // normalized
  std::vector<double> per_bag_ranking_loss;
  std::vector<double> per_bag_average_precision;
};

// Fraction of graphs whose predicted class equals the ground truth. Truth
// entries of -1 (no class) are skipped. Throws std::invalid_argument when
// lengths differ or no graph has ground truth.
double graph_accuracy(const std::vector<int>& preds, const std::vector<int>& truth);

// scores[i][c] is bag i's class-c score; pred_sets/truth_sets are sorted
// label sets. Ranks are 1-based positions in descending score order with
// ties broken by ascending class index. Truth sets must be non-empty proper
// subsets of {0..C-1}.
//
//   one_error        mean [[top-ranked class not in truth]]
//   ranking_loss     mean |{(p,q) in Y+ x Y- : score_p <= score_q}| / (|Y+||Y-|)
//   coverage         mean (max rank over truth - 1) / C
//   average_precision per bag: (1/|Y+|) sum_p |{p' in Y+ : rank p' <= rank p}| / rank p
//   hamming_loss     mean |pred symmetric-difference truth| / C
//   macro_f1         per class over bags: F1 = 2tp/(2tp+fp+fn); a class with
//                    no predictions and no truth anywhere counts 1.
MetricReport bag_metrics(const std::vector<std::vector<double>>& scores,
                         const std::vector<std::vector<int>>& pred_sets,
                         const std::vector<std::vector<int>>& truth_sets,
                         int num_classes);

// Aligned two-column table for terminal output.
std::string render_table(const MetricReport& r, bool unnormalized_coverage = false);
// metric,value rows in round-trip precision.
std::string report_csv(const MetricReport& r, bool unnormalized_coverage = false);

}  // namespace cfmgml
