#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "lgd/core_model.hpp"

namespace lgd {

/// Homogeneous ULA run: B burn-in steps, then b averaging steps.
struct LgdConfig {
  std::int64_t burn_in = 500;
  std::int64_t averaging = 5000;
  double step_size = 9e-4;
  std::uint64_t seed = 0;
  bool record_chain = false;
  /// w_(0); zero when unset.
  std::optional<Vector> initial;
  /// Test hook: false replaces every noise draw by 0.
  bool inject_noise = true;

  void validate() const;
};

/// Iterate w_(k) plus the running sum of f(Xv; w_(j)) over B < j <= k.
struct ChainState {
  Vector w;
  std::int64_t k = 0;
  Vector prediction_sum;
};

struct LgdResult {
  Vector predictions;
  /// w_(0), ..., w_(B+b); empty unless record_chain is set.
  std::vector<Vector> chain;
};

/// w - eta * grad + sqrt(2 eta) * noise. Throws DivergenceError(step_index)
/// if any coordinate of the result is non-finite.
Vector ula_step(const Vector& w, const Vector& grad, double step_size, const Vector& noise,
                std::int64_t step_index = 0);

/// Langevin gradient descent: B + b ULA steps on the potential
/// l(f(X; w), y) + neg_log_prior(w), then the mean of f(Xv; w_(k)) over
/// k = B+1..B+b. Noise xi_(k) is a pure function of (seed, k), so the output
/// is bit-reproducible. Throws DivergenceError on a non-finite iterate.
LgdResult lgd_predict(const Task& task, const RegressionModel& model, const Loss& loss, const Regularizer& reg,
                      const LgdConfig& config);

/// ChainState after `steps` updates of the generic (non-specialized) path.
ChainState lgd_advance(const Task& task, const RegressionModel& model, const Loss& loss, const Regularizer& reg,
                       const LgdConfig& config, std::int64_t steps);

using GradientFn = std::function<void(const Vector& z, Vector& grad)>;

struct UlaRun {
  /// Mean of z_(k) over k = B+1..B+b.
  Vector average;
  std::vector<Vector> chain;
};

/// ULA on an arbitrary potential given by its gradient.
UlaRun run_ula(const GradientFn& grad, Index dim, const LgdConfig& config);

struct ChainMoments {
  Vector mean;
  Vector variance;
  std::int64_t samples = 0;
  /// Set when only one post-burn-in iterate exists; variance is then 0.
  bool degenerate = false;
};

/// Mean and per-coordinate sample variance of w_(B+1..) in a recorded chain.
ChainMoments chain_moments(const std::vector<Vector>& chain, std::int64_t burn_in);

/// CSV with columns step,k,w_1..w_d; `step` is the phase (init, burn_in, averaging).
void write_chain_csv(const std::filesystem::path& path, const std::vector<Vector>& chain, std::int64_t burn_in);

}  // namespace lgd
