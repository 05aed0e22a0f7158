#pragma once

// Independent reference implementations used by the test suites. Everything
// here is deliberately written from the definitions, not by calling the
// library code it checks.

#include <cstdint>
#include <string>
#include <vector>

#include "cfmgml/graph.hpp"
#include "cfmgml/metrics.hpp"
#include "cfmgml/rng.hpp"
#include "cfmgml/trainer.hpp"

namespace oracle {

// --- small builders ---------------------------------------------------------

cfmgml::Graph label_graph(std::vector<int> labels,
                          std::vector<std::array<int, 2>> edges = {});

// Uniform random simple label graph with <= max_vertices vertices and labels
// drawn from [0, label_alphabet).
cfmgml::Graph random_label_graph(cfmgml::Rng& rng, int max_vertices,
                                 int label_alphabet);

// --- Weisfeiler-Lehman reference -------------------------------------------

// Naive string-multiset reference: each round's vertex string is the previous
// string followed by the sorted list of neighbor strings; the kernel counts
// equal-string vertex pairs per round, summed over rounds 0..h.
double naive_wl_kernel(const cfmgml::Graph& g1, const cfmgml::Graph& g2, int h);

// --- explicit feature map (label-variant vertex histogram kernel) -----------

int label_feature_dim(const cfmgml::Dataset& ds);
std::vector<double> label_features(const cfmgml::Graph& g, int dim);

// Materialized primal weights of a dual model view:
//   w_c = sum_i scale[i] coeff[c][i] phi(repr graph of bag i, class c)
std::vector<std::vector<double>> materialize_weights(
    const cfmgml::Dataset& ds, const cfmgml::DualView& view,
    const std::vector<std::vector<int>>& repr, int dim);

// Literal term-by-term evaluation of the regularized surrogate in primal
// space, given explicit weights.
double literal_surrogate(const cfmgml::Dataset& ds,
                         const std::vector<std::vector<double>>& w, double lambda,
                         const std::vector<std::vector<int>>& repr, int dim,
                         cfmgml::LossMode mode);

// --- explicit primal trainer -------------------------------------------------

struct PrimalTrainResult {
  std::vector<std::vector<double>> w;  // C x dim
  std::vector<std::vector<int>> repr;  // final representatives
  std::vector<double> norms;           // post-projection per-iteration norms
  std::vector<std::vector<double>> bag_scores;  // [bag][class] max over graphs
};

// Subgradient descent on the surrogate with explicit weight vectors, same
// schedule and projection as the kernelized trainer, sharing only the seeded
// representative initialization.
PrimalTrainResult explicit_primal_train(const cfmgml::Dataset& ds,
                                        const cfmgml::TrainConfig& cfg);

// --- analytic surrogate gradient ---------------------------------------------

// d surrogate / d coeff[c][i] at a differentiable point, written from the
// formula. rg_at(c, h, i) must return the representative-gram value.
std::vector<std::vector<double>> analytic_gradient(
    const cfmgml::Dataset& ds, const std::vector<std::vector<double>>& coeff,
    const std::vector<double>& scale, double lambda, const cfmgml::ReprGram& rg,
    cfmgml::LossMode mode);

// Smallest absolute distance of any hinge argument from its kink; a point is
// safely differentiable when this is well above the finite-difference step.
double min_kink_distance(const cfmgml::Dataset& ds,
                         const std::vector<std::vector<double>>& coeff,
                         const std::vector<double>& scale,
                         const cfmgml::ReprGram& rg, cfmgml::LossMode mode);

// --- brute-force multi-label metrics -----------------------------------------

struct BruteMetrics {
  double one_error, hamming_loss, coverage, coverage_raw, ranking_loss,
      average_precision, macro_f1;
};

BruteMetrics brute_force_metrics(const std::vector<std::vector<double>>& scores,
                                 const std::vector<std::vector<int>>& pred_sets,
                                 const std::vector<std::vector<int>>& truth_sets,
                                 int num_classes);

}  // namespace oracle
