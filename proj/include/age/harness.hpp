#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "age/active.hpp"
#include "age/centrality.hpp"
#include "age/dataset.hpp"
#include "age/gcn.hpp"

namespace age {

struct ExperimentConfig {
  DatasetPaths paths;
  LoadOptions load;
  StrategyKind strategy;
  int initial_per_class = 4;
  int budget = -1;  // -1 resolves to 20*C - initial_per_class*C
  int trials = 10;
  std::uint64_t base_seed = 0;
  int batch_size = 1;
  int validation_size = 500;  // ignored when the splits file tags validation
  DensityPool density_pool = DensityPool::candidates;
  GcnConfig gcn;
  int threads = 0;  // 0 = hardware concurrency, capped at the trial count
  std::string out_csv;   // empty = don't write
  std::string out_plot;  // empty = don't write

  int resolved_budget(int n_classes) const;
  void validate(const Dataset& ds) const;
};

/// Simulated labeler backed by the dataset's ground truth.
struct Oracle {
  const std::vector<int>* labels = nullptr;
  int label(int node) const { return (*labels)[node]; }
};

struct TrialResult {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::vector<int> selected_nodes;  // oracle queries in issue order
  std::vector<std::pair<double, double>> loss_curve;  // (train, val) per epoch
  std::vector<double> micro_curve;  // test micro-F1 per epoch
  std::vector<double> macro_curve;  // test macro-F1 per epoch
  int epochs_run = 0;
  bool failed = false;
  std::string fail_reason;
  std::string query_log;  // "t<TAB>node<TAB>alpha<TAB>beta<TAB>gamma<TAB>score" lines
};

/// Dataset plus the per-dataset caches shared by every trial.
struct PreparedDataset {
  Dataset data;
  NormalizedAdjacency a_hat;
  CentralityScores pagerank_scores;

  static PreparedDataset prepare(Dataset ds);
};

/// Everything derived from (config, dataset, trial_index) before training:
/// the trial's validation carve-out, its labeled/candidate pool, the initial
/// labels, and one rng stream per purpose.
struct TrialPlan {
  std::vector<int> validation;
  std::vector<int> pool;     // train pool minus validation, sorted
  std::vector<int> initial;  // initial labeled nodes, sorted
  SeededRng init_rng;
  SeededRng dropout_rng;
  SeededRng query_rng;
  SeededRng reinit_rng;  // pipeline retraining
};

TrialPlan plan_trial(const ExperimentConfig& config, const Dataset& ds,
                     int trial_index);

/// Exactly per_class nodes of every class drawn uniformly without
/// replacement from `pool`.
std::vector<int> sample_initial_labels(const Dataset& ds, int per_class,
                                       SeededRng& rng,
                                       std::span<const int> pool);

struct PipelineSelection {
  std::vector<int> nodes;
  int epochs_phase1 = 0;
  std::string query_log;
};

/// The non-interleaved control: train to convergence on the initial labels,
/// then greedily pick B nodes from the frozen model's scores (time weights
/// resampled as t advances 1..B) without retraining between picks. The
/// caller retrains from scratch on initial + selected.
PipelineSelection pipeline_select(const ExperimentConfig& config,
                                  const PreparedDataset& prepared,
                                  TrialPlan& plan);

TrialResult run_trial(const ExperimentConfig& config,
                      const PreparedDataset& prepared, int trial_index);

/// Unweighted mean over all `n_classes` per-class F1 scores; a class with no
/// predictions and no truth occurrences contributes 0.
double macro_f1(std::span<const int> predictions, std::span<const int> truths,
                int n_classes);

/// F1 from globally pooled counts; equals accuracy for single-label
/// classification.
double micro_f1(std::span<const int> predictions, std::span<const int> truths,
                int n_classes);

/// Argmax class per listed node.
std::vector<int> argmax_rows(const DenseMatrix& z, std::span<const int> nodes);

struct ExperimentReport {
  std::vector<TrialResult> trials;
  double mean_macro = 0.0, std_macro = 0.0;
  double mean_micro = 0.0, std_micro = 0.0;
  double mean_epochs = 0.0, std_epochs = 0.0;
  int failed_trials = 0;
};

/// CSV with the frozen schema
///   strategy,trial,macro_f1,micro_f1,epochs,seed
/// one row per trial followed by a MEAN and a STD row.
std::string render_csv(const ExperimentConfig& config,
                       const ExperimentReport& report);

/// Self-contained SVG of the mean test-F1 curves.
std::string render_plot(const ExperimentConfig& config,
                        const ExperimentReport& report);

/// Path of trial k's query log next to the csv path:
/// "<csv minus .csv>.queries.trial<k>.tsv".
std::string query_log_path(const std::string& csv_path, int trial_index);

/// Runs all trials (concurrently when threads allow; results are a pure
/// function of config + dataset regardless), aggregates, and writes the
/// configured outputs.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const PreparedDataset& prepared);

/// Loads the dataset from config.paths, prepares caches, and runs.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace age
