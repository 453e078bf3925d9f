#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lgd/core_model.hpp"
#include "lgd/priors.hpp"

namespace lgd {

/// phi = (theta, eta), optimized as (log theta, log eta).
struct HyperParams {
  Vector log_theta;
  double log_eta = 0.0;

  static HyperParams from_natural(const Vector& theta, double eta);
  Vector theta() const { return log_theta.array().exp(); }
  double eta() const;
  double sqrt_eta() const;
  Index size() const { return log_theta.size() + 1; }

  /// (log theta_1..h, log eta).
  Vector packed() const;
  static HyperParams unpack(const Vector& packed);
};

/// Regularizer family with its fixed constants; theta is supplied by HyperParams.
struct RegFamily {
  RegKind kind = RegKind::kIsotropic;
  double beta = 0.0;

  Index hyper_dim(Index d) const;
  Regularizer regularizer(const Vector& theta) const;
};

RegFamily reg_family(const PriorSpec& prior);

enum class GradMode { kForwardDual, kFiniteDiff };

GradMode grad_mode_from_string(const std::string& name);
std::string to_string(GradMode mode);

struct MetaConfig {
  int steps = 50;
  double adam_lr = 0.4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double eta_min = 1e-7;
  double eta_max = 1.2e-3;
  std::int64_t burn_in = 500;
  std::int64_t averaging = 5000;
  std::uint64_t base_seed = 0;
  GradMode grad_mode = GradMode::kForwardDual;
  /// Initial theta (all ones when unset) and eta (geometric mean of the clamp when unset).
  std::optional<Vector> theta0;
  std::optional<double> eta0;
  /// Central-difference step in log space.
  double fd_step = 1e-3;
  /// A diverged or oversized task loss is replaced by cap_factor times its zero-predictor loss.
  double cap_factor = 1e3;
  /// When a step makes any chain diverge, return to the previous point, halve
  /// the Adam learning rate and restart the moment estimates. Without it a
  /// step on which every task diverges aborts training.
  bool backtrack_on_divergence = true;
  int threads = 1;

  void validate() const;
  HyperParams initial(Index h) const;
};

/// One noise seed per task: derive_seed(base_seed, t).
std::vector<std::uint64_t> task_seeds(std::uint64_t base_seed, std::size_t count);

/// Loss cap C for one task: cap_factor * ||yv||^2 / n_v, or cap_factor when yv = 0.
double loss_cap(const Task& task, double cap_factor);

struct LossReport {
  double loss = 0.0;
  /// Tasks whose chain produced a non-finite iterate.
  int diverged = 0;
  /// Tasks whose loss was replaced by the cap (includes diverged ones).
  int capped = 0;
};

/// Mean over tasks of the validation MSE of lgd_predict at phi with seed seeds[t].
LossReport validation_loss(const HyperParams& phi, const RegFamily& family, const std::vector<Task>& tasks,
                           const std::vector<std::uint64_t>& seeds, const MetaConfig& config);

struct HypergradResult {
  double loss = 0.0;
  /// d loss / d (log theta_1..h, log eta).
  Vector grad;
  int diverged = 0;
  int capped = 0;
  /// Set when any task (or finite-difference probe) hit the cap; those tasks contribute zero gradient.
  bool flagged = false;
};

/// Gradient of validation_loss in log space with the noise held fixed.
HypergradResult hypergrad(const HyperParams& phi, const RegFamily& family, const std::vector<Task>& tasks,
                          const std::vector<std::uint64_t>& seeds, const MetaConfig& config);

struct MetaTraceRow {
  int step = 0;
  double loss = 0.0;
  Vector log_theta;
  double log_eta = 0.0;
  int divergence_count = 0;
};

struct MetaResult {
  HyperParams best;
  double best_loss = 0.0;
  std::vector<MetaTraceRow> trace;
};

class MetaTrainError : public std::runtime_error {
 public:
  MetaTrainError(const std::string& what, std::vector<MetaTraceRow> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<MetaTraceRow>& trace() const { return trace_; }

 private:
  std::vector<MetaTraceRow> trace_;
};

/// Adam on (log theta, log eta) for `steps` updates, projecting log eta onto the
/// clamp after each update. Evaluates steps + 1 points and returns the best seen.
/// Throws MetaTrainError when every task diverges at the initial point (or at
/// any point when backtracking is disabled).
MetaResult meta_train(const std::vector<Task>& tasks, const RegFamily& family, const MetaConfig& config);

void write_trace_csv(const std::filesystem::path& path, const std::vector<MetaTraceRow>& trace);

/// Predicts yv for a task whose training split was already truncated; `task_index`
/// is the position in the evaluated task list.
using Predictor = std::function<Vector(const Task& task, std::size_t task_index)>;

struct CurvePoint {
  Index n_train = 0;
  double mean_mse = 0.0;
  double stderr_mse = 0.0;
  Index n_tasks = 0;
  /// Tasks whose method threw DivergenceError; their MSE enters as the loss cap.
  int diverged = 0;
  /// Per-task MSE in task order, for paired comparisons between methods.
  std::vector<double> task_mse;
};

/// For each n in the grid: truncate every task to n training rows, predict, and
/// average the validation MSE over tasks.
std::vector<CurvePoint> evaluate_learning_curve(const Predictor& predictor, const std::vector<Task>& tasks,
                                                const std::vector<Index>& n_train_grid, int threads = 1,
                                                double cap_factor = 1e3);

}  // namespace lgd
