// age: train a GCN under an active-learning query strategy, dump graph
// centralities, or re-score saved predictions.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "age/centrality.hpp"
#include "age/harness.hpp"

namespace {

struct DatasetArgs {
  std::string edges, features, labels, splits;
  bool raw_features = false;

  void attach(CLI::App* cmd, bool need_all) {
    cmd->add_option("--edges", edges, "edge list file")->required();
    auto* f = cmd->add_option("--features", features, "sparse feature file");
    auto* l = cmd->add_option("--labels", labels, "label file");
    auto* s = cmd->add_option("--splits", splits, "split assignment file");
    if (need_all) {
      f->required();
      l->required();
      s->required();
    }
    cmd->add_flag("--raw-features", raw_features,
                  "skip feature row normalization");
  }

  age::Dataset load() const {
    age::LoadWarnings warn;
    age::Dataset ds = age::load_dataset(
        {edges, features, labels, splits},
        {.row_normalize_features = !raw_features}, &warn);
    if (warn.self_loops_dropped || warn.duplicate_edges_collapsed) {
      std::fprintf(stderr, "load: dropped %d self-loops, collapsed %d duplicate edges\n",
                   warn.self_loops_dropped, warn.duplicate_edges_collapsed);
    }
    return ds;
  }
};

int cmd_run(const DatasetArgs& data, age::ExperimentConfig cfg,
            const std::string& strategy_name, double gamma) {
  cfg.paths = {data.edges, data.features, data.labels, data.splits};
  cfg.load.row_normalize_features = !data.raw_features;
  cfg.strategy = age::StrategyKind::parse(strategy_name, gamma);

  const age::ExperimentReport report = age::run_experiment(cfg);
  std::fputs(age::render_csv(cfg, report).c_str(), stdout);
  if (report.failed_trials > 0) {
    std::fprintf(stderr, "%d of %d trials failed\n", report.failed_trials,
                 cfg.trials);
  }
  return 0;
}

int cmd_centrality(const std::string& edges_path, const std::string& metric,
                   int n_nodes, double rho, const std::string& out_path) {
  std::ifstream in(edges_path);
  if (!in) throw age::ParseError(edges_path + ": cannot open file");
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int max_id = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    int u, v;
    if (std::sscanf(line.c_str(), "%d\t%d", &u, &v) != 2) {
      throw age::ParseError(edges_path + ":" + std::to_string(line_no) +
                            ": expected \"u<TAB>v\"");
    }
    edges.emplace_back(u, v);
    max_id = std::max({max_id, u, v});
  }
  const int n = n_nodes > 0 ? n_nodes : max_id + 1;
  const age::Graph g = age::Graph::from_edges(n, edges);

  age::CentralityScores scores;
  if (metric == "pagerank") {
    scores = age::pagerank(g, rho);
    if (!scores.converged) {
      std::fprintf(stderr, "pagerank did not converge within the iteration cap\n");
    }
  } else {
    scores = age::compute_centrality(g, age::parse_centrality_metric(metric));
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw age::Error(out_path + ": cannot open for writing");
    out = &file;
  }
  char buf[64];
  for (int v = 0; v < n; ++v) {
    std::snprintf(buf, sizeof buf, "%d\t%.12g\n", v, scores.scores[v]);
    *out << buf;
  }
  return 0;
}

int cmd_eval(const std::string& predictions_path, const std::string& labels_path,
             const std::string& splits_path, const std::string& split_name) {
  // Predictions: "node<TAB>class" lines.
  std::ifstream in(predictions_path);
  if (!in) throw age::ParseError(predictions_path + ": cannot open file");
  std::map<int, int> predictions;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    int node, cls;
    if (std::sscanf(line.c_str(), "%d\t%d", &node, &cls) != 2) {
      throw age::ParseError(predictions_path + ":" + std::to_string(line_no) +
                            ": expected \"node<TAB>class\"");
    }
    predictions[node] = cls;
  }

  std::ifstream lf(labels_path);
  if (!lf) throw age::ParseError(labels_path + ": cannot open file");
  std::map<int, int> truth;
  int n_classes = 0;
  line_no = 0;
  while (std::getline(lf, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    int node, cls;
    if (std::sscanf(line.c_str(), "%d\t%d", &node, &cls) != 2) {
      throw age::ParseError(labels_path + ":" + std::to_string(line_no) +
                            ": expected \"node<TAB>class_id\"");
    }
    truth[node] = cls;
    n_classes = std::max(n_classes, cls + 1);
  }

  std::map<int, std::string> split_of;
  if (!splits_path.empty()) {
    std::ifstream sf(splits_path);
    if (!sf) throw age::ParseError(splits_path + ": cannot open file");
    while (std::getline(sf, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      char tag[32];
      int node;
      if (std::sscanf(line.c_str(), "%d\t%31s", &node, tag) == 2) {
        split_of[node] = tag;
      }
    }
  }

  std::vector<int> preds, truths;
  for (const auto& [node, cls] : predictions) {
    auto it = truth.find(node);
    if (it == truth.end()) {
      throw age::ValidationError("prediction for node " + std::to_string(node) +
                                 " has no ground-truth label");
    }
    if (!split_of.empty()) {
      auto st = split_of.find(node);
      if (st == split_of.end() || st->second != split_name) continue;
    }
    preds.push_back(cls);
    truths.push_back(it->second);
  }
  if (preds.empty()) throw age::UsageError("no predictions left to score");

  std::printf("macro_f1\t%.6f\n", age::macro_f1(preds, truths, n_classes));
  std::printf("micro_f1\t%.6f\n", age::micro_f1(preds, truths, n_classes));
  std::printf("n\t%zu\n", preds.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active graph embedding: GCN training with active-learning "
               "node selection"};
  app.require_subcommand(1);

  // --- run -----------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run an experiment");
  DatasetArgs run_data;
  run_data.attach(run, true);
  age::ExperimentConfig cfg;
  std::string strategy = "age_time_sensitive";
  double gamma = 0.5;
  std::string density_pool = "candidates";
  run->add_option("--strategy", strategy,
                  "random|entropy|density|entropy_density|centrality|pipeline|"
                  "age_fixed|age_time_sensitive|gcn");
  run->add_option("--gamma", gamma, "fixed centrality weight for age_fixed");
  run->add_option("--trials", cfg.trials, "number of independent trials");
  run->add_option("--seed", cfg.base_seed, "base seed; trial k uses stream k");
  run->add_option("--budget", cfg.budget,
                  "label budget (default 20*C - per-class*C)");
  run->add_option("--per-class", cfg.initial_per_class,
                  "initial labels per class");
  run->add_option("--batch-size", cfg.batch_size, "nodes per query");
  run->add_option("--validation-size", cfg.validation_size,
                  "validation nodes sampled per trial when the splits file "
                  "has no validation tags");
  run->add_option("--density-pool", density_pool,
                  "cluster candidates only, or all unlabeled nodes")
      ->check(CLI::IsMember({"candidates", "all"}));
  run->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  run->add_option("--out", cfg.out_csv, "results csv path");
  run->add_option("--plot", cfg.out_plot, "learning-curve svg path");
  run->add_option("--hidden", cfg.gcn.hidden_dim, "GCN hidden width");
  run->add_option("--dropout", cfg.gcn.dropout_rate, "dropout rate");
  run->add_option("--lr", cfg.gcn.learning_rate, "Adam learning rate");
  run->add_option("--weight-decay", cfg.gcn.weight_decay, "L2 on W0");
  run->add_option("--max-epochs", cfg.gcn.max_epochs, "training epoch cap");
  run->add_option("--early-stop-window", cfg.gcn.early_stop_window,
                  "epochs of stalled validation loss before stopping");

  // --- centrality ------------------------------------------------------------
  auto* cent = app.add_subcommand("centrality",
                                  "print node<TAB>score for a metric");
  std::string metric = "pagerank";
  std::string cent_edges, cent_out;
  int cent_nodes = 0;
  double rho = 0.85;
  cent->add_option("--metric", metric,
                   "pagerank|degree|closeness|betweenness|harmonic");
  cent->add_option("--edges", cent_edges, "edge list file")->required();
  cent->add_option("--nodes", cent_nodes,
                   "node count (default: max id + 1)");
  cent->add_option("--rho", rho, "pagerank damping");
  cent->add_option("--out", cent_out, "output path (default stdout)");

  // --- eval -------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "re-score a saved prediction file");
  std::string pred_path, eval_labels, eval_splits, eval_split = "test";
  eval->add_option("--predictions", pred_path, "node<TAB>class file")->required();
  eval->add_option("--labels", eval_labels, "ground-truth label file")->required();
  eval->add_option("--splits", eval_splits,
                   "optional split file to restrict scoring");
  eval->add_option("--split", eval_split, "split tag to score (default test)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cfg.density_pool = density_pool == "all" ? age::DensityPool::all_unlabeled
                                               : age::DensityPool::candidates;
      return cmd_run(run_data, cfg, strategy, gamma);
    }
    if (cent->parsed()) {
      return cmd_centrality(cent_edges, metric, cent_nodes, rho, cent_out);
    }
    if (eval->parsed()) {
      return cmd_eval(pred_path, eval_labels, eval_splits, eval_split);
    }
  } catch (const age::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
