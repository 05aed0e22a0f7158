#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cfmgml/metrics.hpp"
#include "cfmgml/rng.hpp"
#include "oracles.hpp"

using namespace cfmgml;

namespace {

struct Instance {
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<int>> preds;
  std::vector<std::vector<int>> truths;
  int C = 0;
};

Instance random_instance(Rng& rng, int max_classes = 5, int max_bags = 8) {
  Instance inst;
  inst.C = 2 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_classes - 1)));
  int n = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_bags)));
  for (int i = 0; i < n; ++i) {
    std::vector<double> s;
    for (int c = 0; c < inst.C; ++c) s.push_back(rng.uniform01() * 2.0 - 1.0);
    // Non-empty proper truth subset.
    int tsize = 1 + static_cast<int>(rng.uniform_index(
                        static_cast<std::uint64_t>(inst.C - 1)));
    std::vector<int> pool(static_cast<std::size_t>(inst.C));
    for (int c = 0; c < inst.C; ++c) pool[static_cast<std::size_t>(c)] = c;
    for (int k = 0; k < tsize; ++k) {
      int j = k + static_cast<int>(rng.uniform_index(
                      static_cast<std::uint64_t>(inst.C - k)));
      std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> truth(pool.begin(), pool.begin() + tsize);
    std::sort(truth.begin(), truth.end());
    // Arbitrary predicted set, possibly empty or full.
    std::vector<int> pred;
    for (int c = 0; c < inst.C; ++c)
      if (rng.bernoulli(0.4)) pred.push_back(c);
    inst.scores.push_back(std::move(s));
    inst.preds.push_back(std::move(pred));
    inst.truths.push_back(std::move(truth));
  }
  return inst;
}

}  // namespace

TEST_CASE("graph accuracy basics") {
  CHECK(graph_accuracy({0, 1, 2}, {0, 1, 2}) == 1.0);
  CHECK(graph_accuracy({0, 1, 2}, {1, 2, 0}) == 0.0);
  CHECK(graph_accuracy({0, 1, 0, 1, 0}, {0, 1, 1, 0, 1}) == doctest::Approx(0.4));
  CHECK(graph_accuracy({0, 1}, {-1, 1}) == 1.0);  // background skipped
  CHECK_THROWS_AS(graph_accuracy({0}, {0, 1}), std::invalid_argument);
  CHECK_THROWS_WITH_AS(graph_accuracy({0, 1}, {-1, -1}),
                       doctest::Contains("graph labels absent"),
                       std::invalid_argument);
}

TEST_CASE("perfect predictions score perfectly") {
  std::vector<std::vector<double>> scores{{0.9, 0.8, -0.5}, {-0.3, 0.7, 0.6}};
  std::vector<std::vector<int>> truth{{0, 1}, {1, 2}};
  auto r = bag_metrics(scores, truth, truth, 3);
  CHECK(r.one_error == 0.0);
  CHECK(r.ranking_loss == 0.0);
  CHECK(r.hamming_loss == 0.0);
  CHECK(r.average_precision == 1.0);
  CHECK(r.macro_f1 == 1.0);
}

TEST_CASE("hand-enumerated single bag") {
  // C=3, truth {0}, scores (0.1, 0.9, 0.5): the relevant label ranks last.
  std::vector<std::vector<double>> scores{{0.1, 0.9, 0.5}};
  std::vector<std::vector<int>> truth{{0}};
  std::vector<std::vector<int>> pred{{1}};
  auto r = bag_metrics(scores, pred, truth, 3);
  CHECK(r.one_error == 1.0);
  CHECK(r.coverage == doctest::Approx(2.0 / 3.0));
  CHECK(r.coverage_raw == doctest::Approx(2.0));
  CHECK(r.ranking_loss == 1.0);
  CHECK(r.average_precision == doctest::Approx(1.0 / 3.0));
  CHECK(r.hamming_loss == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("score-reversed perfect model has ranking loss one") {
  std::vector<std::vector<double>> scores{{-0.9, 0.5, 0.6}};
  std::vector<std::vector<int>> truth{{0}};
  auto r = bag_metrics(scores, truth, truth, 3);
  CHECK(r.ranking_loss == 1.0);
}

TEST_CASE("ties at equal scores count as ranking violations") {
  std::vector<std::vector<double>> scores{{0.5, 0.5}};
  std::vector<std::vector<int>> truth{{0}};
  auto r = bag_metrics(scores, truth, truth, 2);
  CHECK(r.ranking_loss == 1.0);  // score_p <= score_q fires on the tie
  CHECK(r.one_error == 0.0);     // tie-break by index favors class 0
}

TEST_CASE("macro-F1 zero-division rules") {
  // Class 2 never predicted, never true -> vacuous 1. Class 1 true but never
  // predicted -> 0.
  std::vector<std::vector<double>> scores{{1.0, -1.0, -1.0}};
  std::vector<std::vector<int>> pred{{0}};
  std::vector<std::vector<int>> truth{{0, 1}};
  auto r = bag_metrics(scores, pred, truth, 3);
  CHECK(r.macro_f1 == doctest::Approx((1.0 + 0.0 + 1.0) / 3.0));
}

TEST_CASE("inputs are validated") {
  std::vector<std::vector<double>> scores{{0.1, 0.2}};
  CHECK_THROWS_AS(bag_metrics(scores, {{0}}, {{}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(bag_metrics(scores, {{0}}, {{0, 1}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(bag_metrics(scores, {}, {{0}}, 2), std::invalid_argument);
}

TEST_CASE("all measures match brute force on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    Instance inst = random_instance(rng);
    auto got = bag_metrics(inst.scores, inst.preds, inst.truths, inst.C);
    auto want = oracle::brute_force_metrics(inst.scores, inst.preds, inst.truths,
                                            inst.C);
    CHECK(got.one_error == want.one_error);
    CHECK(got.hamming_loss == want.hamming_loss);
    CHECK(got.coverage == want.coverage);
    CHECK(got.coverage_raw == want.coverage_raw);
    CHECK(got.ranking_loss == want.ranking_loss);
    CHECK(got.average_precision == want.average_precision);
    CHECK(got.macro_f1 == want.macro_f1);

    CHECK(got.one_error >= 0.0);
    CHECK(got.one_error <= 1.0);
    CHECK(got.hamming_loss <= 1.0);
    CHECK(got.coverage <= 1.0);
    CHECK(got.ranking_loss <= 1.0);
    CHECK(got.average_precision <= 1.0);
    CHECK(got.macro_f1 <= 1.0);
  }
}

TEST_CASE("consistent class permutation preserves tie-free metrics") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(rng);
    // Random scores are tie-free almost surely; build a permutation.
    std::vector<int> perm(static_cast<std::size_t>(inst.C));
    for (int c = 0; c < inst.C; ++c) perm[static_cast<std::size_t>(c)] = c;
    for (int k = inst.C - 1; k > 0; --k) {
      int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k + 1)));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(j)]);
    }
    Instance mapped = inst;
    for (std::size_t i = 0; i < inst.scores.size(); ++i) {
      for (int c = 0; c < inst.C; ++c)
        mapped.scores[i][static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])] =
            inst.scores[i][static_cast<std::size_t>(c)];
      for (auto& c : mapped.preds[i]) c = perm[static_cast<std::size_t>(c)];
      for (auto& c : mapped.truths[i]) c = perm[static_cast<std::size_t>(c)];
      std::sort(mapped.preds[i].begin(), mapped.preds[i].end());
      std::sort(mapped.truths[i].begin(), mapped.truths[i].end());
    }
    auto a = bag_metrics(inst.scores, inst.preds, inst.truths, inst.C);
    auto b = bag_metrics(mapped.scores, mapped.preds, mapped.truths, inst.C);
    CHECK(a.one_error == doctest::Approx(b.one_error));
    CHECK(a.hamming_loss == doctest::Approx(b.hamming_loss));
    CHECK(a.coverage == doctest::Approx(b.coverage));
    CHECK(a.ranking_loss == doctest::Approx(b.ranking_loss));
    CHECK(a.average_precision == doctest::Approx(b.average_precision));
    CHECK(a.macro_f1 == doctest::Approx(b.macro_f1));
  }
}

TEST_CASE("report rendering includes every measure") {
  std::vector<std::vector<double>> scores{{0.9, -0.5}};
  std::vector<std::vector<int>> truth{{0}};
  auto r = bag_metrics(scores, truth, truth, 2);
  r.graph_accuracy = 0.75;
  auto table = render_table(r);
  for (const char* name : {"graph_accuracy", "one_error", "hamming_loss", "coverage",
                           "ranking_loss", "average_precision", "macro_f1"})
    CHECK(table.find(name) != std::string::npos);
  auto csv = report_csv(r, true);
  CHECK(csv.find("coverage_raw") != std::string::npos);
}
