// Command-line front end: gen / gram / train / predict / eval subcommands
// wired into reproducible pipelines. Every file-producing run also writes
// <output>.manifest.json with the resolved configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "cfmgml/dataset_io.hpp"
#include "cfmgml/errors.hpp"
#include "cfmgml/graph.hpp"
#include "cfmgml/kernels.hpp"
#include "cfmgml/metrics.hpp"
#include "cfmgml/model.hpp"
#include "cfmgml/predictor.hpp"
#include "cfmgml/synthgen.hpp"
#include "cfmgml/trainer.hpp"
#include "cfmgml/version.hpp"

namespace {

using nlohmann::json;
using namespace cfmgml;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
  }
};

void write_manifest(const std::string& primary_output, json manifest, const Timer& t) {
  manifest["version"] = kVersion;
  manifest["wall_ms"] = t.ms();
  std::string path = primary_output + ".manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << manifest.dump() << '\n';
}

// Fails with the offending bags named; used by subcommands that require a
// trainable dataset.
void require_valid(const Dataset& ds, DatasetRole role) {
  auto violations = validate_dataset(ds, role);
  if (violations.empty()) return;
  for (const auto& v : violations) std::cerr << "error: " << v.to_string() << '\n';
  throw std::invalid_argument("dataset validation failed with " +
                              std::to_string(violations.size()) + " violation(s)");
}

// ---- gen ----------------------------------------------------------------

struct GenOptions {
  SynthConfig cfg;
  std::string variant_str = "label";
  std::string out;
};

void setup_gen(CLI::App& app, GenOptions& opt) {
  auto* sub = app.add_subcommand("gen", "Generate a synthetic dataset");
  sub->configurable(true);
  sub->add_option("--out", opt.out, "Output dataset path")->required();
  sub->add_option("--classes", opt.cfg.num_classes, "Number of classes")
      ->capture_default_str();
  sub->add_option("--bags", opt.cfg.num_bags, "Number of bags")->capture_default_str();
  sub->add_option("--graphs-min", opt.cfg.graphs_min, "Minimum graphs per bag")
      ->capture_default_str();
  sub->add_option("--graphs-max", opt.cfg.graphs_max, "Maximum graphs per bag")
      ->capture_default_str();
  sub->add_option("--labels-max", opt.cfg.labels_max,
                  "Maximum labels per bag (at most classes-1)")
      ->capture_default_str();
  sub->add_option("--motif-min", opt.cfg.motif_min, "Minimum motif vertex count")
      ->capture_default_str();
  sub->add_option("--motif-max", opt.cfg.motif_max, "Maximum motif vertex count")
      ->capture_default_str();
  sub->add_option("--noise", opt.cfg.edge_noise, "Edge flip probability in [0,1)")
      ->capture_default_str();
  sub->add_option("--variant", opt.variant_str, "Vertex variant: label or attribute")
      ->check(CLI::IsMember({"label", "attribute"}))
      ->capture_default_str();
  sub->add_option("--attr-dim", opt.cfg.attr_dim, "Attribute dimension")
      ->capture_default_str();
  sub->add_option("--attr-noise", opt.cfg.attr_noise, "Attribute perturbation stddev")
      ->capture_default_str();
  sub->add_option("--background", opt.cfg.background_per_bag,
                  "Classless background graphs per bag")
      ->capture_default_str();
  sub->add_option("--seed", opt.cfg.seed, "Generator seed")->capture_default_str();
}

int run_gen(const GenOptions& opt) {
  Timer timer;
  SynthConfig cfg = opt.cfg;
  cfg.variant = *vertex_variant_from_string(opt.variant_str);
  Dataset ds = generate(cfg);
  write_dataset(ds, opt.out);

  json manifest;
  manifest["subcommand"] = "gen";
  manifest["outputs"] = {{"dataset", opt.out}};
  manifest["seed"] = cfg.seed;
  manifest["options"] = {{"classes", cfg.num_classes},
                         {"bags", cfg.num_bags},
                         {"graphs_min", cfg.graphs_min},
                         {"graphs_max", cfg.graphs_max},
                         {"labels_max", cfg.labels_max},
                         {"motif_min", cfg.motif_min},
                         {"motif_max", cfg.motif_max},
                         {"noise", cfg.edge_noise},
                         {"variant", opt.variant_str},
                         {"attr_dim", cfg.attr_dim},
                         {"attr_noise", cfg.attr_noise},
                         {"background", cfg.background_per_bag},
                         {"seed", cfg.seed}};
  write_manifest(opt.out, std::move(manifest), timer);
  std::cerr << "wrote " << ds.bags.size() << " bags (" << ds.total_graphs()
            << " graphs) to " << opt.out << '\n';
  return kExitOk;
}

// ---- shared kernel flags -------------------------------------------------

struct KernelOptions {
  std::string kind = "wl_subtree";
  int wl_iters = 2;
  double gamma = 1.0;
  bool normalize = false;
  bool wl_iters_given = false;
  bool gamma_given = false;
};

void add_kernel_flags(CLI::App* sub, KernelOptions& opt) {
  sub->add_option("--kernel", opt.kind, "Graph kernel: wl_subtree or vertex_histogram")
      ->check(CLI::IsMember({"wl_subtree", "vertex_histogram"}))
      ->capture_default_str();
  sub->add_option("--wl-iters", opt.wl_iters,
                  "Relabeling iterations (wl_subtree only)")
      ->capture_default_str();
  sub->add_option("--gamma", opt.gamma,
                  "Bandwidth for vertex_histogram on attribute graphs")
      ->capture_default_str();
  sub->add_flag("--normalize", opt.normalize,
                "Normalize kernel values by the self-kernels");
}

KernelConfig resolve_kernel(const CLI::App* sub, const KernelOptions& opt,
                            VertexVariant variant) {
  KernelConfig cfg;
  cfg.kind = *kernel_kind_from_string(opt.kind);
  cfg.normalize = opt.normalize;
  bool wl_given = sub->count("--wl-iters") > 0;
  bool gamma_given = sub->count("--gamma") > 0;
  if (cfg.kind == KernelKind::wl_subtree) {
    cfg.wl_iterations = opt.wl_iters;
    if (gamma_given)
      throw std::invalid_argument("--gamma is not a wl_subtree parameter");
  } else {
    if (wl_given)
      throw std::invalid_argument("--wl-iters is not a vertex_histogram parameter");
    if (variant == VertexVariant::attribute || gamma_given)
      cfg.attribute_bandwidth = opt.gamma;
  }
  if (auto err = check_kernel_config(cfg, variant); !err.empty())
    throw std::invalid_argument(err);
  return cfg;
}

json kernel_manifest(const KernelConfig& cfg) {
  json j;
  j["kind"] = to_string(cfg.kind);
  if (cfg.wl_iterations) j["wl_iterations"] = *cfg.wl_iterations;
  if (cfg.attribute_bandwidth) j["attribute_bandwidth"] = *cfg.attribute_bandwidth;
  j["normalize"] = cfg.normalize;
  return j;
}

// ---- gram ----------------------------------------------------------------

struct GramOptions {
  std::string data;
  std::string out;
  KernelOptions kernel;
  int threads = 1;
  CLI::App* sub = nullptr;
};

void setup_gram(CLI::App& app, GramOptions& opt) {
  auto* sub = app.add_subcommand("gram", "Compute and persist a Gram matrix");
  opt.sub = sub;
  sub->configurable(true);
  sub->add_option("--data", opt.data, "Dataset path")->required();
  sub->add_option("--out", opt.out, "Output CSV path")->required();
  add_kernel_flags(sub, opt.kernel);
  sub->add_option("--threads", opt.threads, "Worker thread cap")->capture_default_str();
}

int run_gram(const GramOptions& opt) {
  Timer timer;
  Dataset ds = read_dataset(opt.data);
  require_valid(ds, DatasetRole::prediction);
  KernelConfig kcfg = resolve_kernel(opt.sub, opt.kernel, ds.variant);
  GramCache gram = compute_gram(ds, kcfg, opt.threads);
  write_gram_csv(gram, opt.out);

  json manifest;
  manifest["subcommand"] = "gram";
  manifest["inputs"] = {{"dataset", opt.data}};
  manifest["outputs"] = {{"gram", opt.out}};
  manifest["options"] = {{"kernel", kernel_manifest(kcfg)}, {"threads", opt.threads}};
  write_manifest(opt.out, std::move(manifest), timer);
  std::cerr << "wrote " << gram.num_graphs << "x" << gram.num_graphs
            << " gram matrix to " << opt.out << '\n';
  return kExitOk;
}

// ---- train ---------------------------------------------------------------

struct TrainOptions {
  std::string data;
  std::string out;
  std::string gram_path;
  std::string trace_path;
  std::string loss_mode = "full";
  KernelOptions kernel;
  TrainConfig cfg;
  int threads = 1;
  CLI::App* sub = nullptr;
};

void setup_train(CLI::App& app, TrainOptions& opt) {
  auto* sub = app.add_subcommand("train", "Train a model");
  opt.sub = sub;
  sub->configurable(true);
  sub->add_option("--data", opt.data, "Training dataset path")->required();
  sub->add_option("--out", opt.out, "Output model path")->required();
  sub->add_option("--gram", opt.gram_path,
                  "Precomputed Gram CSV (must match --kernel flags); computed "
                  "in-process when omitted");
  add_kernel_flags(sub, opt.kernel);
  sub->add_option("--lambda", opt.cfg.lambda, "Regularization weight")
      ->capture_default_str();
  sub->add_option("--rounds", opt.cfg.rounds, "Representative refresh rounds")
      ->capture_default_str();
  sub->add_option("--iters", opt.cfg.iterations, "Subgradient iterations per round")
      ->capture_default_str();
  sub->add_option("--seed", opt.cfg.seed, "Representative initialization seed")
      ->capture_default_str();
  sub->add_option("--loss-mode", opt.loss_mode, "full or hamming_only")
      ->check(CLI::IsMember({"full", "hamming_only"}))
      ->capture_default_str();
  sub->add_flag("--reset-each-round", opt.cfg.reset_each_round,
                "Restart counters at every round instead of carrying them over");
  sub->add_option("--trace", opt.trace_path,
                  "Write per-iteration objective/norm CSV to this path");
  sub->add_option("--threads", opt.threads, "Worker thread cap")->capture_default_str();
}

int run_train(TrainOptions& opt) {
  Timer timer;
  Dataset ds = read_dataset(opt.data);
  require_valid(ds, DatasetRole::training);
  KernelConfig kcfg = resolve_kernel(opt.sub, opt.kernel, ds.variant);

  GramCache gram = opt.gram_path.empty()
                       ? compute_gram(ds, kcfg, opt.threads)
                       : read_gram_csv(opt.gram_path, ds, kcfg);

  opt.cfg.loss_mode =
      opt.loss_mode == "full" ? LossMode::full : LossMode::hamming_only;
  opt.cfg.record_objective = !opt.trace_path.empty();

  auto [model, trace] = train(ds, gram, opt.cfg, opt.threads);
  save_model(model, opt.out);

  if (!opt.trace_path.empty()) {
    std::ofstream out(opt.trace_path, std::ios::trunc);
    if (!out) throw IoError("cannot write trace: " + opt.trace_path);
    out << "iteration,objective,norm\n";
    for (std::size_t i = 0; i < trace.norm.size(); ++i) {
      out << (i + 1) << ',';
      out << (i < trace.objective.size() ? std::to_string(trace.objective[i]) : "");
      out << ',' << trace.norm[i] << '\n';
    }
  }

  json manifest;
  manifest["subcommand"] = "train";
  manifest["inputs"] = {{"dataset", opt.data}};
  if (!opt.gram_path.empty()) manifest["inputs"]["gram"] = opt.gram_path;
  manifest["outputs"] = {{"model", opt.out}};
  if (!opt.trace_path.empty()) manifest["outputs"]["trace"] = opt.trace_path;
  manifest["seed"] = opt.cfg.seed;
  manifest["options"] = {{"kernel", kernel_manifest(kcfg)},
                         {"lambda", opt.cfg.lambda},
                         {"rounds", opt.cfg.rounds},
                         {"iterations", opt.cfg.iterations},
                         {"loss_mode", opt.loss_mode},
                         {"reset_each_round", opt.cfg.reset_each_round},
                         {"seed", opt.cfg.seed},
                         {"threads", opt.threads}};
  write_manifest(opt.out, std::move(manifest), timer);
  std::cerr << "trained " << opt.cfg.rounds << "x" << opt.cfg.iterations
            << " iterations in " << trace.wall_seconds << " s; final norm "
            << trace.final_norm << "; model at " << opt.out << '\n';
  return kExitOk;
}

// ---- predict ---------------------------------------------------------------

struct PredictOptions {
  std::string data;
  std::string model;
  std::string out;
  std::string graph_mode = "argmax";
  std::string bag_mode = "union";
  int threads = 1;
};

void setup_predict(CLI::App& app, PredictOptions& opt) {
  auto* sub = app.add_subcommand("predict", "Predict bag and graph labels");
  sub->configurable(true);
  sub->add_option("--data", opt.data, "Dataset path (labels optional)")->required();
  sub->add_option("--model", opt.model, "Trained model path")->required();
  sub->add_option("--out", opt.out, "Output prediction path")->required();
  sub->add_option("--graph-mode", opt.graph_mode, "argmax or threshold")
      ->check(CLI::IsMember({"argmax", "threshold"}))
      ->capture_default_str();
  sub->add_option("--bag-mode", opt.bag_mode, "union or threshold_bag")
      ->check(CLI::IsMember({"union", "threshold_bag"}))
      ->capture_default_str();
  sub->add_option("--threads", opt.threads, "Worker thread cap")->capture_default_str();
}

int run_predict(const PredictOptions& opt) {
  Timer timer;
  Dataset ds = read_dataset(opt.data);
  require_valid(ds, DatasetRole::prediction);
  DualModel model = load_model(opt.model);
  if (model.num_classes != ds.num_classes)
    throw std::invalid_argument("model expects " + std::to_string(model.num_classes) +
                                " classes, dataset has " +
                                std::to_string(ds.num_classes));

  GraphPredictMode gmode = opt.graph_mode == "argmax" ? GraphPredictMode::argmax
                                                      : GraphPredictMode::threshold;
  BagPredictMode bmode = opt.bag_mode == "union" ? BagPredictMode::bag_union
                                                 : BagPredictMode::threshold_bag;

  PredictionFile pf;
  pf.num_classes = model.num_classes;
  pf.graph_mode = gmode;
  pf.bag_mode = bmode;
  pf.bags = predict_dataset(model, ds, gmode, bmode, opt.threads);
  write_predictions(pf, opt.out);

  json manifest;
  manifest["subcommand"] = "predict";
  manifest["inputs"] = {{"dataset", opt.data}, {"model", opt.model}};
  manifest["outputs"] = {{"predictions", opt.out}};
  manifest["options"] = {{"graph_mode", opt.graph_mode},
                         {"bag_mode", opt.bag_mode},
                         {"threads", opt.threads}};
  write_manifest(opt.out, std::move(manifest), timer);
  std::cerr << "wrote predictions for " << pf.bags.size() << " bags to " << opt.out
            << '\n';
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalOptions {
  std::string pred;
  std::string truth;
  std::string csv;
  bool unnormalized_coverage = false;
};

void setup_eval(CLI::App& app, EvalOptions& opt) {
  auto* sub = app.add_subcommand("eval", "Score predictions against ground truth");
  sub->configurable(true);
  sub->add_option("--pred", opt.pred, "Prediction file")->required();
  sub->add_option("--truth", opt.truth, "Ground-truth dataset")->required();
  sub->add_option("--csv", opt.csv, "Also write the report as CSV");
  sub->add_flag("--unnormalized-coverage", opt.unnormalized_coverage,
                "Report coverage as mean rank depth instead of a rate");
}

int run_eval(const EvalOptions& opt) {
  Timer timer;
  PredictionFile pf = read_predictions(opt.pred);
  Dataset truth = read_dataset(opt.truth);
  if (pf.num_classes != truth.num_classes)
    throw std::invalid_argument("prediction file has " +
                                std::to_string(pf.num_classes) +
                                " classes, truth dataset has " +
                                std::to_string(truth.num_classes));

  std::map<std::string, const BagPrediction*> by_id;
  for (const auto& bp : pf.bags) by_id[bp.id] = &bp;

  std::vector<std::vector<double>> scores;
  std::vector<std::vector<int>> pred_sets, truth_sets;
  std::vector<int> graph_preds, graph_truth;
  for (const auto& bag : truth.bags) {
    auto it = by_id.find(bag.id);
    if (it == by_id.end())
      throw std::invalid_argument("no prediction for bag " + bag.id);
    const BagPrediction& bp = *it->second;
    scores.push_back(bp.scores);
    pred_sets.push_back(bp.labels);
    truth_sets.push_back(bag.labels);
    if (bag.graph_labels && !bp.graph_argmax.empty()) {
      if (bp.graph_argmax.size() != bag.graphs.size())
        throw std::invalid_argument("bag " + bag.id +
                                    ": prediction/truth graph count mismatch");
      for (std::size_t j = 0; j < bp.graph_argmax.size(); ++j) {
        graph_preds.push_back(bp.graph_argmax[j]);
        graph_truth.push_back((*bag.graph_labels)[j]);
      }
    }
  }

  MetricReport report = bag_metrics(scores, pred_sets, truth_sets, truth.num_classes);
  bool any_truth = false;
  for (int t : graph_truth) any_truth |= t >= 0;
  if (any_truth) report.graph_accuracy = graph_accuracy(graph_preds, graph_truth);

  std::cout << render_table(report, opt.unnormalized_coverage);
  if (!opt.csv.empty()) {
    std::ofstream out(opt.csv, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + opt.csv);
    out << report_csv(report, opt.unnormalized_coverage);

    json manifest;
    manifest["subcommand"] = "eval";
    manifest["inputs"] = {{"predictions", opt.pred}, {"truth", opt.truth}};
    manifest["outputs"] = {{"report", opt.csv}};
    manifest["options"] = {{"unnormalized_coverage", opt.unnormalized_coverage}};
    write_manifest(opt.csv, std::move(manifest), timer);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse- and fine-grained multi-graph multi-label learning"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "",
                 "INI key=value file with one section per subcommand; give "
                 "before the subcommand");
  app.require_subcommand(1);

  GenOptions gen_opt;
  GramOptions gram_opt;
  TrainOptions train_opt;
  PredictOptions predict_opt;
  EvalOptions eval_opt;
  setup_gen(app, gen_opt);
  setup_gram(app, gram_opt);
  setup_train(app, train_opt);
  setup_predict(app, predict_opt);
  setup_eval(app, eval_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << '\n';
    return kExitValidation;
  }

  try {
    if (app.got_subcommand("gen")) return run_gen(gen_opt);
    if (app.got_subcommand("gram")) return run_gram(gram_opt);
    if (app.got_subcommand("train")) return run_train(train_opt);
    if (app.got_subcommand("predict")) return run_predict(predict_opt);
    if (app.got_subcommand("eval")) return run_eval(eval_opt);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
