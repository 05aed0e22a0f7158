#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cfmgml/graph.hpp"
#include "cfmgml/kernels.hpp"
#include "cfmgml/model.hpp"

namespace cfmgml {

// hamming_only drops the pairwise ranking term and trains with the two
// thresholding hinges alone (the HLK ablation).
enum class LossMode { full, hamming_only };

struct TrainConfig {
  double lambda = 1e-3;     // regularization weight, > 0
  int rounds = 10;          // representative-refresh rounds R
  int iterations = 100;     // subgradient iterations T per round
  std::uint64_t seed = 0;   // round-1 representative initialization
  LossMode loss_mode = LossMode::full;
  bool record_objective = false;
  // Restart counters and the step count at every round instead of carrying
  // them over. Off by default: carry-over keeps the 1/(lambda*t) step size
  // decaying across rounds.
  bool reset_each_round = false;
};

// Running aggregates of active-hinge events. kappa counts positive-label
// threshold activations, nu negative-label ones, mu the net pairwise
// activations (+1 at the positive class, -1 at the negative). The projection
// rescales all three, so entries are reals, not integers. t is the number of
// completed subgradient iterations.
struct CounterState {
  std::vector<std::vector<double>> kappa;  // C x n, >= 0
  std::vector<std::vector<double>> nu;     // C x n, >= 0
  std::vector<std::vector<double>> mu;     // C x n
  long long t = 0;
};

CounterState zero_counters(int num_classes, int num_bags);

struct TrainTrace {
  std::vector<double> objective;  // per iteration, when recorded
  std::vector<double> norm;       // per iteration, post-projection ||W||_F
  std::vector<std::vector<std::vector<int>>> repr_rounds;  // snapshot per round
  double final_norm = 0.0;
  double wall_seconds = 0.0;
};

// Aggregate dual coefficients induced by a counter state:
//   coeff[c][i] = |Yi-|^2 kappa - |Yi+|^2 nu + |Yi+||Yi-| mu
//   scale[i]    = 1 / (lambda * t * n * |Yi+|^2 * |Yi-|^2)
// With these, w_c = sum_i scale[i] coeff[c][i] phi(repr graph of bag i).
struct DualCoeffs {
  std::vector<std::vector<double>> coeff;  // C x n
  std::vector<double> scale;               // n
};

DualCoeffs dual_coeffs(const CounterState& state, const Dataset& ds, double lambda);

// Read-only view over (coeff, scale); lets the objective be evaluated for a
// trained model and for mid-training counter states alike.
struct DualView {
  std::span<const std::vector<double>> coeff;
  std::span<const double> scale;
};

inline DualView as_view(const DualCoeffs& dc) { return {dc.coeff, dc.scale}; }
inline DualView as_view(const DualModel& m) { return {m.coeff, m.scale}; }

// Regularized hinge surrogate with representatives frozen:
//   lambda/2 sum_c ||w_c||^2
//   + 1/n sum_i { 1/|Yi+|^2 sum_p |1 - A[p][i]|_+
//               + 1/|Yi-|^2 sum_q |1 + A[q][i]|_+
//               + 1/(|Yi+||Yi-|) sum_p sum_q |2 + A[q][i] - A[p][i]|_+ }
// where A[c][i] is the class-c score of bag i's representative graph.
// hamming_only omits the final pairwise term.
double surrogate_loss(const Dataset& ds, const DualView& view, double lambda,
                      const std::vector<std::vector<int>>& repr,
                      const GramCache& gram, LossMode mode = LossMode::full);

// Indicator-based ranking loss over representative scores; reporting only.
double rank_loss(const Dataset& ds, const DualView& view,
                 const std::vector<std::vector<int>>& repr, const GramCache& gram);

// Round-1 representatives: an independent seeded uniform draw per (bag,
// class), bags outer, classes inner.
std::vector<std::vector<int>> initial_representatives(const Dataset& ds,
                                                      std::uint64_t seed);

// One subgradient iteration at frozen representatives: evaluates every
// (class, bag) representative score, bumps the counters whose hinge is
// active, advances t, and projects the counters onto the Frobenius ball of
// radius sqrt(2/lambda).
CounterState subgradient_step(CounterState state, const Dataset& ds,
                              const std::vector<std::vector<int>>& repr,
                              const GramCache& gram, const TrainConfig& cfg,
                              int threads = 1);

// argmax-scoring graph per (bag, class) under the weights defined by
// (state, current_repr); ties break to the lowest graph index.
std::vector<std::vector<int>> select_representatives(
    const CounterState& state, const Dataset& ds,
    const std::vector<std::vector<int>>& current_repr, const GramCache& gram,
    double lambda, int threads = 1);

// Assembles a standalone model from a counter state: bakes the final
// iteration count into scale and embeds the representative graphs.
DualModel finalize_model(const CounterState& state, const Dataset& ds,
                         const std::vector<std::vector<int>>& repr,
                         double lambda, const KernelConfig& kernel);

// Full training loop: R rounds of T iterations each, representative refresh
// after every round, counters carried across rounds unless configured
// otherwise. Bit-reproducible for a fixed (ds, gram, cfg) at any thread
// count. Throws std::invalid_argument on bad config or invalid dataset.
std::pair<DualModel, TrainTrace> train(const Dataset& ds, const GramCache& gram,
                                       const TrainConfig& cfg, int threads = 1);

}  // namespace cfmgml
