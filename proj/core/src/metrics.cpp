#include "cfmgml/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "num_format.hpp"

namespace cfmgml {

double graph_accuracy(const std::vector<int>& preds, const std::vector<int>& truth) {
  if (preds.size() != truth.size())
    throw std::invalid_argument("graph_accuracy: prediction/truth length mismatch");
  long long total = 0, correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (truth[i] < 0) continue;  // background graph, excluded from scoring
    ++total;
    if (preds[i] == truth[i]) ++correct;
  }
  if (total == 0) throw std::invalid_argument("graph_accuracy: graph labels absent");
  return static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

// 1-based ranks in descending score order, ties by ascending class index.
std::vector<int> ranks_of(const std::vector<double>& scores) {
  int C = static_cast<int>(scores.size());
  std::vector<int> order(static_cast<std::size_t>(C));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  std::vector<int> rank(static_cast<std::size_t>(C));
  for (int pos = 0; pos < C; ++pos)
    rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos + 1;
  return rank;
}

}  // namespace

MetricReport bag_metrics(const std::vector<std::vector<double>>& scores,
                         const std::vector<std::vector<int>>& pred_sets,
                         const std::vector<std::vector<int>>& truth_sets,
                         int num_classes) {
  std::size_t n = scores.size();
  if (pred_sets.size() != n || truth_sets.size() != n)
    throw std::invalid_argument("bag_metrics: input length mismatch");
  if (n == 0) throw std::invalid_argument("bag_metrics: no bags");
  if (num_classes < 2) throw std::invalid_argument("bag_metrics: need >= 2 classes");

  MetricReport r;
  double C = static_cast<double>(num_classes);
  double sum_one = 0, sum_ham = 0, sum_cov = 0, sum_cov_raw = 0, sum_rl = 0,
         sum_ap = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(scores[i].size()) != num_classes)
      throw std::invalid_argument("bag_metrics: bag " + std::to_string(i) +
                                  " has wrong score count");
    const auto& truth = truth_sets[i];
    if (truth.empty())
      throw std::invalid_argument("bag_metrics: bag " + std::to_string(i) +
                                  " has empty truth set");
    if (static_cast<int>(truth.size()) >= num_classes)
      throw std::invalid_argument("bag_metrics: bag " + std::to_string(i) +
                                  " has full truth set");
    std::vector<bool> is_true(static_cast<std::size_t>(num_classes), false);
    for (int c : truth) {
      if (c < 0 || c >= num_classes)
        throw std::invalid_argument("bag_metrics: truth label out of range");
      is_true[static_cast<std::size_t>(c)] = true;
    }

    auto rank = ranks_of(scores[i]);

    // one-error: top-ranked class not relevant
    int top = 0;
    for (int c = 0; c < num_classes; ++c)
      if (rank[static_cast<std::size_t>(c)] == 1) top = c;
    double one = is_true[static_cast<std::size_t>(top)] ? 0.0 : 1.0;

    // ranking loss: misordered (relevant, irrelevant) pairs by raw score
    double viol = 0.0, pairs = 0.0;
    for (int p = 0; p < num_classes; ++p) {
      if (!is_true[static_cast<std::size_t>(p)]) continue;
      for (int q = 0; q < num_classes; ++q) {
        if (is_true[static_cast<std::size_t>(q)]) continue;
        pairs += 1.0;
        if (scores[i][static_cast<std::size_t>(p)] <=
            scores[i][static_cast<std::size_t>(q)])
          viol += 1.0;
      }
    }
    double rl = viol / pairs;

    // coverage: depth needed to cover every relevant label
    int max_rank = 0;
    for (int c : truth) max_rank = std::max(max_rank, rank[static_cast<std::size_t>(c)]);
    double cov_raw = static_cast<double>(max_rank - 1);
    double cov = cov_raw / C;

    // average precision over relevant labels, ascending class order
    double ap = 0.0;
    for (int p : truth) {
      int rp = rank[static_cast<std::size_t>(p)];
      int above = 0;
      for (int p2 : truth)
        if (rank[static_cast<std::size_t>(p2)] <= rp) ++above;
      ap += static_cast<double>(above) / static_cast<double>(rp);
    }
    ap /= static_cast<double>(truth.size());

    // hamming: symmetric difference against the predicted set
    std::vector<bool> is_pred(static_cast<std::size_t>(num_classes), false);
    for (int c : pred_sets[i]) {
      if (c < 0 || c >= num_classes)
        throw std::invalid_argument("bag_metrics: predicted label out of range");
      is_pred[static_cast<std::size_t>(c)] = true;
    }
    double diff = 0.0;
    for (int c = 0; c < num_classes; ++c)
      if (is_pred[static_cast<std::size_t>(c)] != is_true[static_cast<std::size_t>(c)])
        diff += 1.0;
    double ham = diff / C;

    r.per_bag_one_error.push_back(one);
    r.per_bag_hamming.push_back(ham);
    r.per_bag_coverage.push_back(cov);
    r.per_bag_ranking_loss.push_back(rl);
    r.per_bag_average_precision.push_back(ap);
    sum_one += one;
    sum_ham += ham;
    sum_cov += cov;
    sum_cov_raw += cov_raw;
    sum_rl += rl;
    sum_ap += ap;
  }

  double dn = static_cast<double>(n);
  r.one_error = sum_one / dn;
  r.hamming_loss = sum_ham / dn;
  r.coverage = sum_cov / dn;
  r.coverage_raw = sum_cov_raw / dn;
  r.ranking_loss = sum_rl / dn;
  r.average_precision = sum_ap / dn;

  // macro-F1 over classes; a class absent from every prediction and every
  // truth set is vacuously correct.
  double f1_sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool p = std::binary_search(pred_sets[i].begin(), pred_sets[i].end(), c);
      bool t = std::binary_search(truth_sets[i].begin(), truth_sets[i].end(), c);
      if (p && t) ++tp;
      else if (p) ++fp;
      else if (t) ++fn;
    }
    if (tp + fp + fn == 0) f1_sum += 1.0;
    else f1_sum += 2.0 * static_cast<double>(tp) /
                   static_cast<double>(2 * tp + fp + fn);
  }
  r.macro_f1 = f1_sum / C;
  return r;
}

namespace {

struct NamedValue {
  const char* name;
  std::optional<double> value;
};

std::vector<NamedValue> report_rows(const MetricReport& r, bool raw_cov) {
  return {
      {"graph_accuracy", r.graph_accuracy},
      {"one_error", r.one_error},
      {"hamming_loss", r.hamming_loss},
      {raw_cov ? "coverage_raw" : "coverage", raw_cov ? r.coverage_raw : r.coverage},
      {"ranking_loss", r.ranking_loss},
      {"average_precision", r.average_precision},
      {"macro_f1", r.macro_f1},
  };
}

}  // namespace

std::string render_table(const MetricReport& r, bool unnormalized_coverage) {
  std::string out = "metric               value\n";
  char buf[64];
  for (const auto& row : report_rows(r, unnormalized_coverage)) {
    if (row.value) {
      std::snprintf(buf, sizeof(buf), "%-20s %.6f\n", row.name, *row.value);
      out += buf;
    } else {
      std::snprintf(buf, sizeof(buf), "%-20s n/a\n", row.name);
      out += buf;
    }
  }
  return out;
}

std::string report_csv(const MetricReport& r, bool unnormalized_coverage) {
  std::string out = "metric,value\n";
  for (const auto& row : report_rows(r, unnormalized_coverage)) {
    out += row.name;
    out += ',';
    out += row.value ? detail::format_double(*row.value) : "n/a";
    out += '\n';
  }
  return out;
}

}  // namespace cfmgml
