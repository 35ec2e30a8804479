#include "age/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>
#include <tuple>

namespace age {

namespace {

// Stream purposes under each trial's (base_seed, trial_index) root.
enum StreamPurpose : std::uint64_t {
  kStreamValidation = 0,
  kStreamInitialLabels = 1,
  kStreamWeightInit = 2,
  kStreamDropout = 3,
  kStreamQuery = 4,
  kStreamReinit = 5,
};

SeededRng trial_stream(std::uint64_t base_seed, int trial_index,
                       StreamPurpose purpose) {
  return SeededRng(base_seed, static_cast<std::uint64_t>(trial_index) *
                                  SeededRng::kStreamFanout +
                                  purpose);
}

std::vector<int> sorted_difference(std::span<const int> a,
                                   std::span<const int> b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

struct TrainLoopOutput {
  ForwardCache final_eval;
  int epochs = 0;
};

/// Epoch loop of the interleaved framework: train one epoch, then (while
/// budget remains) query once; stop on max_epochs or once the budget is
/// exhausted and the validation loss has stalled for early_stop_window
/// epochs.
TrainLoopOutput train_loop(GcnModel& model, const ExperimentConfig& config,
                           const PreparedDataset& prepared, QueryState& qs,
                           const TrialPlan& plan, SeededRng& dropout_rng,
                           SeededRng& query_rng, TrialResult& result) {
  const Dataset& ds = prepared.data;
  const Oracle oracle{&ds.labels};
  const std::vector<int> test_nodes = ds.nodes_with_tag(SplitTag::test);
  const bool interleaved = qs.strategy.queries_during_training();

  TrainLoopOutput out;
  double best_val = std::numeric_limits<double>::infinity();
  int epochs_since_improve = 0;

  for (int epoch = 1; epoch <= config.gcn.max_epochs; ++epoch) {
    EpochResult er = train_epoch(model, ds, prepared.a_hat, qs.labeled,
                                 plan.validation, config.gcn, dropout_rng);
    result.loss_curve.emplace_back(er.train_loss, er.val_loss);
    if (!test_nodes.empty()) {
      const std::vector<int> preds = argmax_rows(er.eval.z, test_nodes);
      std::vector<int> truths(test_nodes.size());
      for (std::size_t i = 0; i < test_nodes.size(); ++i) {
        truths[i] = ds.labels[test_nodes[i]];
      }
      result.micro_curve.push_back(micro_f1(preds, truths, ds.n_classes));
      result.macro_curve.push_back(macro_f1(preds, truths, ds.n_classes));
    }
    out.epochs = epoch;

    if (interleaved && qs.t < qs.budget_total && !qs.candidates.empty()) {
      const int t_before = qs.t;
      Selection sel =
          select_next(qs, er.eval.z, embeddings(er.eval), prepared.pagerank_scores,
                      query_rng, {config.batch_size, config.density_pool});
      for (std::size_t i = 0; i < sel.nodes.size(); ++i) {
        const int node = sel.nodes[i];
        if (ds.split[node] != SplitTag::train_pool ||
            std::binary_search(plan.validation.begin(), plan.validation.end(),
                               node)) {
          throw Error("query selected a non-train-pool node " +
                      std::to_string(node));
        }
        (void)oracle.label(node);  // ground-truth lookup; labels live in ds
        result.selected_nodes.push_back(node);
        result.query_log += query_log_line(t_before + static_cast<int>(i) + 1,
                                           node, sel.weights, sel.scores[i]);
        result.query_log += '\n';
      }
    }

    const bool budget_exhausted = !interleaved || qs.t >= qs.budget_total;
    if (std::isfinite(er.val_loss)) {
      if (er.val_loss < best_val) {
        best_val = er.val_loss;
        epochs_since_improve = 0;
      } else {
        ++epochs_since_improve;
      }
      if (budget_exhausted && epochs_since_improve >= config.gcn.early_stop_window) {
        out.final_eval = std::move(er.eval);
        return out;
      }
    }
    if (epoch == config.gcn.max_epochs) out.final_eval = std::move(er.eval);
  }
  return out;
}

void evaluate_test(const Dataset& ds, const ForwardCache& eval,
                   TrialResult& result) {
  const std::vector<int> test_nodes = ds.nodes_with_tag(SplitTag::test);
  if (test_nodes.empty()) return;
  const std::vector<int> preds = argmax_rows(eval.z, test_nodes);
  std::vector<int> truths(test_nodes.size());
  for (std::size_t i = 0; i < test_nodes.size(); ++i) {
    truths[i] = ds.labels[test_nodes[i]];
  }
  result.macro_f1 = macro_f1(preds, truths, ds.n_classes);
  result.micro_f1 = micro_f1(preds, truths, ds.n_classes);
}

}  // namespace

int ExperimentConfig::resolved_budget(int n_classes) const {
  return budget >= 0 ? budget : 20 * n_classes - initial_per_class * n_classes;
}

void ExperimentConfig::validate(const Dataset& ds) const {
  gcn.validate();
  strategy.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (initial_per_class < 0) throw ConfigError("initial_per_class must be >= 0");
  if (validation_size < 0) throw ConfigError("validation_size must be >= 0");
  const int b = resolved_budget(ds.n_classes);
  if (b < 0) throw ConfigError("budget resolves to a negative value");
  if (b > gcn.max_epochs * batch_size) {
    throw ConfigError("budget " + std::to_string(b) + " exceeds max_epochs*batch_size = " +
                      std::to_string(gcn.max_epochs * batch_size) +
                      "; queries could not all be issued");
  }
  const int pool_total = static_cast<int>(ds.nodes_with_tag(SplitTag::train_pool).size());
  const bool file_validation = !ds.nodes_with_tag(SplitTag::validation).empty();
  const int pool_after_val = file_validation ? pool_total : pool_total - validation_size;
  if (pool_after_val < 0) {
    throw ConfigError("validation_size exceeds the training pool");
  }
  const int total_labels = initial_per_class * ds.n_classes + b;
  if (total_labels > pool_after_val) {
    throw ConfigError("initial labels + budget (" + std::to_string(total_labels) +
                      ") exceed the per-trial training pool (" +
                      std::to_string(pool_after_val) + ")");
  }
  if (strategy.kind == Strategy::gcn_balanced && total_labels % ds.n_classes != 0) {
    throw ConfigError("gcn baseline needs initial+budget divisible by the class count");
  }
}

PreparedDataset PreparedDataset::prepare(Dataset ds) {
  NormalizedAdjacency a_hat = normalize_adjacency(ds.graph);
  CentralityScores pr = pagerank(ds.graph);
  return PreparedDataset{std::move(ds), std::move(a_hat), std::move(pr)};
}

std::vector<int> sample_initial_labels(const Dataset& ds, int per_class,
                                       SeededRng& rng,
                                       std::span<const int> pool) {
  std::vector<int> out;
  if (per_class == 0) return out;
  // Classes are processed in ascending order, pools in ascending node order,
  // so the draw sequence is reproducible.
  for (int c = 0; c < ds.n_classes; ++c) {
    std::vector<int> class_pool;
    for (int v : pool) {
      if (ds.labels[v] == c) class_pool.push_back(v);
    }
    if (static_cast<int>(class_pool.size()) < per_class) {
      throw ConfigError("class " + std::to_string(c) + " has only " +
                        std::to_string(class_pool.size()) +
                        " training-pool nodes, need " + std::to_string(per_class));
    }
    for (int v : sample_without_replacement(class_pool, per_class, rng)) {
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TrialPlan plan_trial(const ExperimentConfig& config, const Dataset& ds,
                     int trial_index) {
  TrialPlan plan{.validation = {},
                 .pool = {},
                 .initial = {},
                 .init_rng = trial_stream(config.base_seed, trial_index, kStreamWeightInit),
                 .dropout_rng = trial_stream(config.base_seed, trial_index, kStreamDropout),
                 .query_rng = trial_stream(config.base_seed, trial_index, kStreamQuery),
                 .reinit_rng = trial_stream(config.base_seed, trial_index, kStreamReinit)};

  const std::vector<int> train_pool = ds.nodes_with_tag(SplitTag::train_pool);
  plan.validation = ds.nodes_with_tag(SplitTag::validation);
  if (plan.validation.empty() && config.validation_size > 0) {
    SeededRng val_rng = trial_stream(config.base_seed, trial_index, kStreamValidation);
    plan.validation =
        sample_without_replacement(train_pool, config.validation_size, val_rng);
    plan.pool = sorted_difference(train_pool, plan.validation);
  } else {
    plan.pool = train_pool;
  }

  SeededRng label_rng = trial_stream(config.base_seed, trial_index, kStreamInitialLabels);
  const int b = config.resolved_budget(ds.n_classes);
  const int total = config.initial_per_class * ds.n_classes + b;
  switch (config.strategy.kind) {
    case Strategy::random:
      plan.initial = sample_without_replacement(plan.pool, total, label_rng);
      break;
    case Strategy::gcn_balanced:
      plan.initial =
          sample_initial_labels(ds, total / ds.n_classes, label_rng, plan.pool);
      break;
    default:
      plan.initial = sample_initial_labels(ds, config.initial_per_class,
                                           label_rng, plan.pool);
      break;
  }
  return plan;
}

PipelineSelection pipeline_select(const ExperimentConfig& config,
                                  const PreparedDataset& prepared,
                                  TrialPlan& plan) {
  const Dataset& ds = prepared.data;
  const int budget = config.resolved_budget(ds.n_classes);
  PipelineSelection out;

  // Phase 1: converge on the initial labels alone.
  GcnModel model = GcnModel::init(plan.init_rng, ds.feature_dim(),
                                  config.gcn.hidden_dim, ds.n_classes);
  QueryState qs = QueryState::make(plan.pool, plan.initial, 0,
                                   StrategyKind{Strategy::pipeline, 0.0});
  TrialResult scratch;
  TrainLoopOutput converged = train_loop(model, config, prepared, qs, plan,
                                         plan.dropout_rng, plan.query_rng, scratch);
  out.epochs_phase1 = converged.epochs;

  // Greedy picks from the frozen outputs; percentiles and the density
  // clustering are recomputed as the candidate pool shrinks.
  QueryState pick_state = QueryState::make(plan.pool, plan.initial, budget,
                                           StrategyKind{Strategy::pipeline, 0.0});
  const DenseMatrix& z = converged.final_eval.z;
  const DenseMatrix& emb = embeddings(converged.final_eval);
  while (pick_state.t < budget && !pick_state.candidates.empty()) {
    const int t_before = pick_state.t;
    Selection sel = select_next(pick_state, z, emb, prepared.pagerank_scores,
                                plan.query_rng, {1, config.density_pool});
    out.nodes.push_back(sel.nodes[0]);
    out.query_log += query_log_line(t_before + 1, sel.nodes[0], sel.weights,
                                    sel.scores[0]);
    out.query_log += '\n';
  }
  return out;
}

TrialResult run_trial(const ExperimentConfig& config,
                      const PreparedDataset& prepared, int trial_index) {
  const Dataset& ds = prepared.data;
  TrialResult result;
  try {
    TrialPlan plan = plan_trial(config, ds, trial_index);
    const int budget = config.resolved_budget(ds.n_classes);

    // Pipeline with a zero budget has nothing to select; it degenerates to
    // one plain training run on the initial labels.
    if (config.strategy.kind == Strategy::pipeline && budget > 0) {
      PipelineSelection ps = pipeline_select(config, prepared, plan);
      result.selected_nodes = ps.nodes;
      result.query_log = std::move(ps.query_log);

      std::vector<int> labeled = plan.initial;
      labeled.insert(labeled.end(), ps.nodes.begin(), ps.nodes.end());
      std::sort(labeled.begin(), labeled.end());
      GcnModel model = GcnModel::init(plan.reinit_rng, ds.feature_dim(),
                                      config.gcn.hidden_dim, ds.n_classes);
      QueryState qs = QueryState::make(plan.pool, labeled, 0,
                                       StrategyKind{Strategy::pipeline, 0.0});
      TrainLoopOutput done = train_loop(model, config, prepared, qs, plan,
                                        plan.dropout_rng, plan.query_rng, result);
      result.epochs_run = ps.epochs_phase1 + done.epochs;
      evaluate_test(ds, done.final_eval, result);
      return result;
    }

    const bool interleaved = config.strategy.queries_during_training();
    GcnModel model = GcnModel::init(plan.init_rng, ds.feature_dim(),
                                    config.gcn.hidden_dim, ds.n_classes);
    QueryState qs = QueryState::make(plan.pool, plan.initial,
                                     interleaved ? budget : 0, config.strategy);
    TrainLoopOutput done = train_loop(model, config, prepared, qs, plan,
                                      plan.dropout_rng, plan.query_rng, result);
    result.epochs_run = done.epochs;
    evaluate_test(ds, done.final_eval, result);
  } catch (const NumericError& e) {
    result.failed = true;
    result.fail_reason = e.what();
  }
  return result;
}

double macro_f1(std::span<const int> predictions, std::span<const int> truths,
                int n_classes) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    throw UsageError("macro_f1: need aligned non-empty vectors");
  }
  std::vector<long> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truths[i]) {
      ++tp[predictions[i]];
    } else {
      ++fp[predictions[i]];
      ++fn[truths[i]];
    }
  }
  double sum = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    const long denom = 2 * tp[c] + fp[c] + fn[c];
    if (denom > 0) sum += 2.0 * tp[c] / denom;
  }
  return sum / n_classes;
}

double micro_f1(std::span<const int> predictions, std::span<const int> truths,
                int n_classes) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    throw UsageError("micro_f1: need aligned non-empty vectors");
  }
  (void)n_classes;
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truths[i]) {
      ++tp;
    } else {
      ++fp;
      ++fn;
    }
  }
  const long denom = 2 * tp + fp + fn;
  return denom > 0 ? 2.0 * tp / denom : 0.0;
}

std::vector<int> argmax_rows(const DenseMatrix& z, std::span<const int> nodes) {
  std::vector<int> out;
  out.reserve(nodes.size());
  for (int v : nodes) {
    const double* row = z.row(v);
    int best = 0;
    for (int c = 1; c < z.cols(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    out.push_back(best);
  }
  return out;
}

namespace {

void aggregate(ExperimentReport& report) {
  std::vector<double> macros, micros, epochs;
  for (const TrialResult& t : report.trials) {
    if (t.failed) {
      ++report.failed_trials;
      continue;
    }
    macros.push_back(t.macro_f1);
    micros.push_back(t.micro_f1);
    epochs.push_back(t.epochs_run);
  }
  auto mean_std = [](const std::vector<double>& v) -> std::pair<double, double> {
    if (v.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
    return {mean, sd};
  };
  std::tie(report.mean_macro, report.std_macro) = mean_std(macros);
  std::tie(report.mean_micro, report.std_micro) = mean_std(micros);
  std::tie(report.mean_epochs, report.std_epochs) = mean_std(epochs);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open for writing");
  out << content;
}

}  // namespace

std::string render_csv(const ExperimentConfig& config,
                       const ExperimentReport& report) {
  const std::string name = config.strategy.name();
  std::string csv = "strategy,trial,macro_f1,micro_f1,epochs,seed\n";
  char buf[256];
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const TrialResult& t = report.trials[i];
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%.6f,%d,%llu\n", name.c_str(), i,
                  t.macro_f1, t.micro_f1, t.epochs_run,
                  static_cast<unsigned long long>(config.base_seed));
    csv += buf;
  }
  std::snprintf(buf, sizeof buf, "%s,MEAN,%.6f,%.6f,%.2f,%llu\n", name.c_str(),
                report.mean_macro, report.mean_micro, report.mean_epochs,
                static_cast<unsigned long long>(config.base_seed));
  csv += buf;
  std::snprintf(buf, sizeof buf, "%s,STD,%.6f,%.6f,%.2f,%llu\n", name.c_str(),
                report.std_macro, report.std_micro, report.std_epochs,
                static_cast<unsigned long long>(config.base_seed));
  csv += buf;
  return csv;
}

std::string query_log_path(const std::string& csv_path, int trial_index) {
  std::string stem = csv_path;
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") {
    stem.resize(stem.size() - 4);
  }
  return stem + ".queries.trial" + std::to_string(trial_index) + ".tsv";
}

std::string render_plot(const ExperimentConfig& config,
                        const ExperimentReport& report) {
  // Mean test-F1 per epoch; trials that stopped early hold their last value.
  std::size_t max_len = 0;
  for (const TrialResult& t : report.trials) {
    if (!t.failed) max_len = std::max(max_len, t.micro_curve.size());
  }
  auto mean_curve = [&](bool micro) {
    std::vector<double> mean(max_len, 0.0);
    int n = 0;
    for (const TrialResult& t : report.trials) {
      const auto& curve = micro ? t.micro_curve : t.macro_curve;
      if (t.failed || curve.empty()) continue;
      ++n;
      for (std::size_t e = 0; e < max_len; ++e) {
        mean[e] += curve[std::min(e, curve.size() - 1)];
      }
    }
    if (n > 0) {
      for (double& x : mean) x /= n;
    }
    return mean;
  };
  const std::vector<double> micro = mean_curve(true);
  const std::vector<double> macro = mean_curve(false);

  const double w = 720, h = 480, ml = 60, mr = 20, mt = 40, mb = 50;
  const double pw = w - ml - mr, ph = h - mt - mb;
  char buf[256];
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\">\n";
  svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
                "mean test F1 per epoch - %s</text>\n",
                ml, config.strategy.name().c_str());
  svg += buf;
  for (int i = 0; i <= 5; ++i) {
    const double y = mt + ph * (1.0 - i / 5.0);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#ddd\"/>\n<text x=\"%.1f\" y=\"%.1f\" "
                  "font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
                  "%.1f</text>\n",
                  ml, y, w - mr, y, ml - 6, y + 4, i / 5.0);
    svg += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"12\" text-anchor=\"middle\">epoch</text>\n",
                ml + pw / 2, h - 12);
  svg += buf;
  auto polyline = [&](const std::vector<double>& curve, const char* color,
                      const char* dash) {
    if (curve.empty()) return;
    std::string pts;
    for (std::size_t e = 0; e < curve.size(); ++e) {
      const double x =
          ml + (curve.size() > 1 ? pw * e / (curve.size() - 1) : pw / 2);
      const double y = mt + ph * (1.0 - std::clamp(curve[e], 0.0, 1.0));
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", x, y);
      pts += buf;
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\"";
    if (dash[0]) {
      svg += " stroke-dasharray=\"";
      svg += dash;
      svg += "\"";
    }
    svg += " points=\"" + pts + "\"/>\n";
  };
  polyline(micro, "#1f77b4", "");
  polyline(macro, "#d62728", "5,3");
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"12\" fill=\"#1f77b4\">micro-F1</text>\n"
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                "font-size=\"12\" fill=\"#d62728\">macro-F1</text>\n",
                w - mr - 80, mt + 16, w - mr - 80, mt + 32);
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const PreparedDataset& prepared) {
  config.validate(prepared.data);
  ExperimentReport report;
  report.trials.resize(config.trials);

  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, config.trials));
  if (threads == 1) {
    for (int i = 0; i < config.trials; ++i) {
      report.trials[i] = run_trial(config, prepared, i);
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= config.trials) return;
        report.trials[i] = run_trial(config, prepared, i);
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  aggregate(report);

  if (!config.out_csv.empty()) {
    write_file(config.out_csv, render_csv(config, report));
    for (int i = 0; i < config.trials; ++i) {
      write_file(query_log_path(config.out_csv, i), report.trials[i].query_log);
    }
  }
  if (!config.out_plot.empty()) {
    write_file(config.out_plot, render_plot(config, report));
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  PreparedDataset prepared =
      PreparedDataset::prepare(load_dataset(config.paths, config.load));
  return run_experiment(config, prepared);
}

}  // namespace age
