#include "cfmgml/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cfmgml/parallel.hpp"
#include "cfmgml/rng.hpp"

namespace cfmgml {

namespace {

double hinge(double a) { return a > 0.0 ? a : 0.0; }

// Per-bag label-set data reused across iterations.
struct BagSets {
  std::vector<std::vector<int>> pos;  // relevant classes, ascending
  std::vector<std::vector<int>> neg;  // irrelevant classes, ascending
  std::vector<double> wpos2;          // |Y+|^2
  std::vector<double> wneg2;          // |Y-|^2
  std::vector<double> wposneg;        // |Y+| |Y-|
  std::vector<double> invz_base;      // 1 / (n |Y+|^2 |Y-|^2)
};

BagSets build_bag_sets(const Dataset& ds) {
  BagSets bs;
  std::size_t n = ds.bags.size();
  bs.pos.resize(n);
  bs.neg.resize(n);
  bs.wpos2.resize(n);
  bs.wneg2.resize(n);
  bs.wposneg.resize(n);
  bs.invz_base.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& labels = ds.bags[i].labels;  // sorted ascending
    bs.pos[i] = labels;
    for (int c = 0; c < ds.num_classes; ++c)
      if (!std::binary_search(labels.begin(), labels.end(), c))
        bs.neg[i].push_back(c);
    double np = static_cast<double>(bs.pos[i].size());
    double nq = static_cast<double>(bs.neg[i].size());
    bs.wpos2[i] = np * np;
    bs.wneg2[i] = nq * nq;
    bs.wposneg[i] = np * nq;
    bs.invz_base[i] = 1.0 / (static_cast<double>(n) * bs.wpos2[i] * bs.wneg2[i]);
  }
  return bs;
}

std::vector<double> scales_at(const BagSets& bs, double lambda, long long t) {
  long long t_eff = t > 0 ? t : 1;  // at t=0 the counters are zero anyway
  std::vector<double> s(bs.invz_base.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = bs.invz_base[i] / (lambda * static_cast<double>(t_eff));
  return s;
}

std::vector<std::vector<double>> aggregate_coeff(const CounterState& st,
                                                 const BagSets& bs) {
  std::size_t C = st.kappa.size();
  std::size_t n = bs.pos.size();
  std::vector<std::vector<double>> coeff(C, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < n; ++i)
      coeff[c][i] = bs.wneg2[i] * st.kappa[c][i] - bs.wpos2[i] * st.nu[c][i] +
                    bs.wposneg[i] * st.mu[c][i];
  return coeff;
}

double bilinear_norm_sq(const std::vector<std::vector<double>>& coeff,
                        const std::vector<double>& scale, const ReprGram& rg) {
  int n = rg.num_bags;
  double total = 0.0;
  for (std::size_t c = 0; c < coeff.size(); ++c) {
    const auto& k = rg.per_class[c];
    for (int h = 0; h < n; ++h) {
      double ch = scale[static_cast<std::size_t>(h)] *
                  coeff[c][static_cast<std::size_t>(h)];
      if (ch == 0.0) continue;
      double inner = 0.0;
      for (int i = 0; i < n; ++i)
        inner += scale[static_cast<std::size_t>(i)] *
                 coeff[c][static_cast<std::size_t>(i)] *
                 k[static_cast<std::size_t>(h) * n + i];
      total += ch * inner;
    }
  }
  return total;
}

// Representative scores A[c][i] = <w_c, phi(repr of bag i for class c)>.
std::vector<std::vector<double>> repr_scores(
    const std::vector<std::vector<double>>& coeff, const std::vector<double>& scale,
    const ReprGram& rg, int threads) {
  std::size_t C = coeff.size();
  std::size_t n = scale.size();
  std::vector<std::vector<double>> F(C, std::vector<double>(n, 0.0));
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t c = 0; c < C; ++c) {
        const auto& k = rg.per_class[c];
        double s = 0.0;
        for (std::size_t h = 0; h < n; ++h)
          s += scale[h] * coeff[c][h] * k[h * n + i];
        F[c][i] = s;
      }
    }
  });
  return F;
}

// One iteration over a prebuilt context. Returns the post-projection norm.
double step_inplace(CounterState& st, const BagSets& bs, const ReprGram& rg,
                    const TrainConfig& cfg, int threads) {
  std::size_t C = st.kappa.size();
  std::size_t n = bs.pos.size();

  auto coeff = aggregate_coeff(st, bs);
  auto scale = scales_at(bs, cfg.lambda, st.t);
  if (st.t == 0)
    for (auto& row : coeff) std::fill(row.begin(), row.end(), 0.0);
  auto F = repr_scores(coeff, scale, rg, threads);

  // Counter updates touch only column i, so the bag loop parallelizes with
  // deterministic results at any thread count.
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      for (int p : bs.pos[i])
        if (F[static_cast<std::size_t>(p)][i] <= 1.0)
          st.kappa[static_cast<std::size_t>(p)][i] += 1.0;
      for (int q : bs.neg[i])
        if (F[static_cast<std::size_t>(q)][i] >= -1.0)
          st.nu[static_cast<std::size_t>(q)][i] += 1.0;
      if (cfg.loss_mode == LossMode::full) {
        for (int p : bs.pos[i])
          for (int q : bs.neg[i])
            if (F[static_cast<std::size_t>(q)][i] >=
                F[static_cast<std::size_t>(p)][i] - 2.0) {
              st.mu[static_cast<std::size_t>(p)][i] += 1.0;
              st.mu[static_cast<std::size_t>(q)][i] -= 1.0;
            }
      }
    }
  });

  st.t += 1;

  // Project onto the ball ||W||_F <= sqrt(2/lambda). Scaling the counters
  // scales the induced weights by the same factor.
  coeff = aggregate_coeff(st, bs);
  scale = scales_at(bs, cfg.lambda, st.t);
  double norm_sq = bilinear_norm_sq(coeff, scale, rg);
  double norm = norm_sq > 0.0 ? std::sqrt(norm_sq) : 0.0;
  double radius = std::sqrt(2.0 / cfg.lambda);
  if (norm > radius) {
    double factor = radius / norm;
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t i = 0; i < n; ++i) {
        st.kappa[c][i] *= factor;
        st.nu[c][i] *= factor;
        st.mu[c][i] *= factor;
      }
    return norm * factor;
  }
  return norm;
}

void check_config(const TrainConfig& cfg) {
  if (!(cfg.lambda > 0.0))
    throw std::invalid_argument("train: lambda must be > 0");
  if (cfg.rounds < 1) throw std::invalid_argument("train: rounds must be >= 1");
  if (cfg.iterations < 1)
    throw std::invalid_argument("train: iterations must be >= 1");
}

void check_dataset(const Dataset& ds) {
  auto violations = validate_dataset(ds, DatasetRole::training);
  if (!violations.empty())
    throw std::invalid_argument("train: invalid dataset: " +
                                violations.front().to_string());
}

}  // namespace

CounterState zero_counters(int num_classes, int num_bags) {
  CounterState st;
  st.kappa.assign(static_cast<std::size_t>(num_classes),
                  std::vector<double>(static_cast<std::size_t>(num_bags), 0.0));
  st.nu = st.kappa;
  st.mu = st.kappa;
  st.t = 0;
  return st;
}

DualCoeffs dual_coeffs(const CounterState& state, const Dataset& ds, double lambda) {
  BagSets bs = build_bag_sets(ds);
  DualCoeffs dc;
  dc.coeff = aggregate_coeff(state, bs);
  dc.scale = scales_at(bs, lambda, state.t);
  return dc;
}

double surrogate_loss(const Dataset& ds, const DualView& view, double lambda,
                      const std::vector<std::vector<int>>& repr,
                      const GramCache& gram, LossMode mode) {
  BagSets bs = build_bag_sets(ds);
  std::size_t n = ds.bags.size();
  std::size_t C = view.coeff.size();
  ReprGram rg = repr_gram_from_cache(gram, repr, static_cast<int>(C));

  std::vector<std::vector<double>> coeff(view.coeff.begin(), view.coeff.end());
  std::vector<double> scale(view.scale.begin(), view.scale.end());
  auto F = repr_scores(coeff, scale, rg, 1);

  double loss = 0.5 * lambda * std::max(0.0, bilinear_norm_sq(coeff, scale, rg));
  double data = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double bag = 0.0;
    double tpos = 0.0;
    for (int p : bs.pos[i]) tpos += hinge(1.0 - F[static_cast<std::size_t>(p)][i]);
    bag += tpos / bs.wpos2[i];
    double tneg = 0.0;
    for (int q : bs.neg[i]) tneg += hinge(1.0 + F[static_cast<std::size_t>(q)][i]);
    bag += tneg / bs.wneg2[i];
    if (mode == LossMode::full) {
      double tpair = 0.0;
      for (int p : bs.pos[i])
        for (int q : bs.neg[i])
          tpair += hinge(2.0 + F[static_cast<std::size_t>(q)][i] -
                         F[static_cast<std::size_t>(p)][i]);
      bag += tpair / bs.wposneg[i];
    }
    data += bag;
  }
  return loss + data / static_cast<double>(n);
}

double rank_loss(const Dataset& ds, const DualView& view,
                 const std::vector<std::vector<int>>& repr, const GramCache& gram) {
  BagSets bs = build_bag_sets(ds);
  std::size_t n = ds.bags.size();
  std::size_t C = view.coeff.size();
  ReprGram rg = repr_gram_from_cache(gram, repr, static_cast<int>(C));

  std::vector<std::vector<double>> coeff(view.coeff.begin(), view.coeff.end());
  std::vector<double> scale(view.scale.begin(), view.scale.end());
  auto F = repr_scores(coeff, scale, rg, 1);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double miss_pos = 0.0;
    for (int p : bs.pos[i])
      if (F[static_cast<std::size_t>(p)][i] <= 0.0) miss_pos += 1.0;
    double miss_neg = 0.0;
    for (int q : bs.neg[i])
      if (F[static_cast<std::size_t>(q)][i] >= 0.0) miss_neg += 1.0;
    double miss_pair = 0.0;
    for (int p : bs.pos[i])
      for (int q : bs.neg[i])
        if (F[static_cast<std::size_t>(p)][i] <= F[static_cast<std::size_t>(q)][i])
          miss_pair += 1.0;
    total += miss_pos / bs.wpos2[i] + miss_neg / bs.wneg2[i] +
             miss_pair / bs.wposneg[i];
  }
  return total / static_cast<double>(n);
}

std::vector<std::vector<int>> initial_representatives(const Dataset& ds,
                                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<int>> repr(ds.bags.size());
  for (std::size_t i = 0; i < ds.bags.size(); ++i) {
    repr[i].resize(static_cast<std::size_t>(ds.num_classes));
    for (int c = 0; c < ds.num_classes; ++c)
      repr[i][static_cast<std::size_t>(c)] =
          static_cast<int>(rng.uniform_index(ds.bags[i].graphs.size()));
  }
  return repr;
}

CounterState subgradient_step(CounterState state, const Dataset& ds,
                              const std::vector<std::vector<int>>& repr,
                              const GramCache& gram, const TrainConfig& cfg,
                              int threads) {
  check_config(cfg);
  BagSets bs = build_bag_sets(ds);
  ReprGram rg = repr_gram_from_cache(gram, repr, ds.num_classes);
  step_inplace(state, bs, rg, cfg, threads);
  return state;
}

std::vector<std::vector<int>> select_representatives(
    const CounterState& state, const Dataset& ds,
    const std::vector<std::vector<int>>& current_repr, const GramCache& gram,
    double lambda, int threads) {
  BagSets bs = build_bag_sets(ds);
  auto coeff = aggregate_coeff(state, bs);
  auto scale = scales_at(bs, lambda, state.t);
  std::size_t n = ds.bags.size();
  int C = ds.num_classes;

  // Flat index of the current representative of bag h for class c.
  std::vector<std::vector<std::size_t>> cur_flat(
      static_cast<std::size_t>(C), std::vector<std::size_t>(n, 0));
  for (int c = 0; c < C; ++c)
    for (std::size_t h = 0; h < n; ++h)
      cur_flat[static_cast<std::size_t>(c)][h] = gram.flat(
          h, static_cast<std::size_t>(current_repr[h][static_cast<std::size_t>(c)]));

  std::vector<std::vector<int>> repr(n,
                                     std::vector<int>(static_cast<std::size_t>(C), 0));
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      std::size_t bag_size = ds.bags[i].graphs.size();
      for (int c = 0; c < C; ++c) {
        double best = 0.0;
        int best_j = 0;
        for (std::size_t j = 0; j < bag_size; ++j) {
          std::size_t gj = gram.flat(i, j);
          double s = 0.0;
          for (std::size_t h = 0; h < n; ++h)
            s += scale[h] * coeff[static_cast<std::size_t>(c)][h] *
                 gram.at(cur_flat[static_cast<std::size_t>(c)][h], gj);
          if (j == 0 || s > best) {
            best = s;
            best_j = static_cast<int>(j);
          }
        }
        repr[i][static_cast<std::size_t>(c)] = best_j;
      }
    }
  });
  return repr;
}

DualModel finalize_model(const CounterState& state, const Dataset& ds,
                         const std::vector<std::vector<int>>& repr, double lambda,
                         const KernelConfig& kernel) {
  DualModel m;
  m.num_classes = ds.num_classes;
  m.lambda = lambda;
  m.t_final = state.t;
  m.kernel = kernel;
  DualCoeffs dc = dual_coeffs(state, ds, lambda);
  m.coeff = std::move(dc.coeff);
  m.scale = std::move(dc.scale);
  m.repr = repr;
  m.repr_graphs.resize(ds.bags.size());
  for (std::size_t i = 0; i < ds.bags.size(); ++i) {
    m.repr_graphs[i].reserve(static_cast<std::size_t>(ds.num_classes));
    for (int c = 0; c < ds.num_classes; ++c)
      m.repr_graphs[i].push_back(
          ds.bags[i].graphs[static_cast<std::size_t>(repr[i][static_cast<std::size_t>(c)])]);
  }
  return m;
}

std::pair<DualModel, TrainTrace> train(const Dataset& ds, const GramCache& gram,
                                       const TrainConfig& cfg, int threads) {
  check_config(cfg);
  check_dataset(ds);
  if (gram.num_graphs != ds.total_graphs())
    throw std::invalid_argument("train: gram covers " +
                                std::to_string(gram.num_graphs) +
                                " graphs, dataset has " +
                                std::to_string(ds.total_graphs()));

  auto t_start = std::chrono::steady_clock::now();
  BagSets bs = build_bag_sets(ds);
  auto repr = initial_representatives(ds, cfg.seed);
  CounterState st = zero_counters(ds.num_classes, static_cast<int>(ds.bags.size()));
  TrainTrace trace;

  for (int r = 0; r < cfg.rounds; ++r) {
    if (cfg.reset_each_round && r > 0)
      st = zero_counters(ds.num_classes, static_cast<int>(ds.bags.size()));
    ReprGram rg = repr_gram_from_cache(gram, repr, ds.num_classes);
    for (int it = 0; it < cfg.iterations; ++it) {
      double post_norm = step_inplace(st, bs, rg, cfg, threads);
      trace.norm.push_back(post_norm);
      if (cfg.record_objective) {
        DualCoeffs dc = dual_coeffs(st, ds, cfg.lambda);
        trace.objective.push_back(
            surrogate_loss(ds, as_view(dc), cfg.lambda, repr, gram, cfg.loss_mode));
      }
    }
    repr = select_representatives(st, ds, repr, gram, cfg.lambda, threads);
    trace.repr_rounds.push_back(repr);
  }

  trace.final_norm = trace.norm.empty() ? 0.0 : trace.norm.back();
  DualModel model = finalize_model(st, ds, repr, cfg.lambda, gram.kernel);
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return {std::move(model), std::move(trace)};
}

}  // namespace cfmgml
