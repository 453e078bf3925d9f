#pragma once

#include <cstdint>

#include "lgd/core_model.hpp"
#include "lgd/langevin.hpp"

namespace lgd {

struct GdConfig {
  std::int64_t iterations = 5500;
  double step_size = 9e-4;

  void validate() const;
};

/// K noiseless steps w <- w - eta * grad U(w) from w = 0; returns the last iterate.
Vector gd_minimize(const Task& task, const RegressionModel& model, const Loss& loss, const Regularizer& reg,
                   const GdConfig& config);

/// Solves (X^T X + diag(precision)) w = X^T y by Cholesky. For a Gaussian prior
/// with these precisions and unit noise this is the posterior mean.
Vector ridge_posterior_mean(const Matrix& X, const Vector& y, const Vector& precision);
Vector ridge_posterior_mean(const Matrix& X, const Vector& y, double precision);

/// Posterior mean of w under exp(-(1/2)||y - Xw||^2 - neg_log_prior(w)) by
/// tensor-grid quadrature; d <= 2 only.
Vector posterior_mean_quadrature(const Matrix& X, const Vector& y, const Regularizer& reg, int nodes_per_axis = 512);

/// Bayes-optimal validation predictions E[Xv w* | X, y] for the given prior:
/// closed form for Gaussian families, quadrature for softplus with d <= 2.
/// Throws ConfigError for softplus with d > 2 (use reference_lgd_predict).
Vector bayes_oracle_predict(const Task& task, const PriorSpec& prior);

/// Oracle-regularized LGD with 10x the burn-in and averaging lengths of `base`.
Vector reference_lgd_predict(const Task& task, const PriorSpec& prior, const LgdConfig& base);

}  // namespace lgd
