#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lgd/baselines.hpp"
#include "lgd/core_model.hpp"
#include "lgd/langevin.hpp"
#include "lgd/metalearn.hpp"
#include "lgd/priors.hpp"
#include "lgd/svg_plot.hpp"

namespace lgd {

inline const std::vector<std::string> kAllMethods = {"plain_gd", "oracle_gd", "oracle_lgd", "oracle_lgd_long",
                                                     "meta_lgd", "bayes_oracle"};

struct ExperimentConfig {
  std::string name = "isotropic";
  /// For the diagonal family with no explicit variances, v_i ~ U[diag_range] drawn from the seed.
  PriorSpec prior{IsotropicGaussian{0.1}, 10};
  std::pair<double, double> diag_range{0.05, 0.5};

  int total_tasks = 250;
  /// The first `train_tasks` are meta-training tasks, the last `eval_tasks` are held out.
  int train_tasks = 50;
  int eval_tasks = 200;
  /// Rows per task; the last n_v are validation rows, the rest are available for training.
  Index n_total = 500;
  Index n_v = 400;
  /// Variance of each input coordinate.
  double input_scale = 1.0;
  double noise_std = 1.0;
  std::vector<Index> n_train_grid{1, 2, 5, 10, 20, 50, 100};
  std::vector<std::string> methods{"plain_gd", "oracle_gd", "oracle_lgd", "oracle_lgd_long", "meta_lgd"};

  LgdConfig lgd;
  GdConfig gd;
  MetaConfig meta;

  std::uint64_t seed = 0;
  int threads = 1;
  /// Test hook: every w* is 0.
  bool zero_ground_truth = false;

  void validate() const;
  /// Prior with diagonal variances filled in from the seed when they were not given.
  PriorSpec resolved_prior() const;
  Index max_train() const { return n_total - n_v; }
};

/// Paper settings for "isotropic", "diagonal" or "softplus".
ExperimentConfig preset_config(const std::string& name);
/// Reads a JSON experiment config. Keys that are absent keep the values of the
/// preset named by "preset" (or "name"), defaulting to isotropic.
ExperimentConfig config_from_json_string(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json_string(const ExperimentConfig& config);

/// Desk-scale reduction: evaluate on the first 50 held-out tasks only.
void apply_fast(ExperimentConfig& config);

/// Seed of the stream that generates task t.
std::uint64_t task_seed(const ExperimentConfig& config, std::size_t t);
/// Langevin noise seed of task t (shared by every LGD method on that task).
std::uint64_t noise_seed(const ExperimentConfig& config, std::size_t t);

std::vector<Task> generate_tasks(const ExperimentConfig& config);

struct MetaFit {
  Index n_train = 0;
  std::optional<HyperParams> phi;
  double train_loss = 0.0;
  std::vector<MetaTraceRow> trace;
  std::string error;
};

/// Meta-trains one hyperparameter pair per grid value on the training tasks truncated to n.
std::vector<MetaFit> meta_train_grid(const ExperimentConfig& config, const std::vector<Task>& tasks);

/// Predictor for a named method on held-out tasks. `phi` is required for meta_lgd.
/// Task indices passed to the predictor are offsets into the held-out range.
Predictor method_predictor(const std::string& method, const ExperimentConfig& config, const PriorSpec& prior,
                           const std::optional<HyperParams>& phi = std::nullopt);

/// The held-out tasks used for evaluation.
std::vector<Task> eval_split(const ExperimentConfig& config, const std::vector<Task>& tasks);
std::vector<Task> train_split(const ExperimentConfig& config, const std::vector<Task>& tasks);

struct ExperimentResult {
  std::vector<CurveRow> rows;
  /// Per-task MSE behind each row, aligned with `rows` (empty for failed cells).
  std::vector<std::vector<double>> task_mse;
  std::vector<MetaFit> meta;
  /// "method n=..: message" for cells that failed; their rows carry NaN.
  std::vector<std::string> failures;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<Task>& tasks);

/// results.csv, curves.svg, meta_params.json, meta_trace_n<N>.csv and failures.txt (if any).
void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                              const std::filesystem::path& out_dir);

}  // namespace lgd
