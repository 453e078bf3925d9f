#pragma once

#include <optional>

#include "lgd/priors.hpp"
#include "lgd/types.hpp"

namespace lgd {

/// One regression problem: training pair (X, y) and validation pair (Xv, yv).
/// `ground_truth` holds w* for synthetic tasks.
struct Task {
  Matrix X;
  Vector y;
  Matrix Xv;
  Vector yv;
  std::optional<Vector> ground_truth;

  Index n() const { return X.rows(); }
  Index n_v() const { return Xv.rows(); }
  Index d_x() const { return X.cols(); }

  /// Throws DimensionError on inconsistent shapes or empty splits.
  void validate() const;

  /// Copy restricted to the first `n_train` training rows.
  Task truncated(Index n_train) const;
};

/// Regression function f(X; w) evaluated row-wise, with its Jacobian action.
class RegressionModel {
 public:
  virtual ~RegressionModel() = default;

  virtual Index param_dim(Index d_x) const = 0;
  virtual Vector predict(const Matrix& X, const Vector& w) const = 0;
  /// J(X; w)^T v, where J is the n x d Jacobian of f(X; w) with respect to w.
  virtual Vector jacobian_transpose_product(const Matrix& X, const Vector& w, const Vector& v) const = 0;
};

/// f(x; w) = x w.
class LinearModel final : public RegressionModel {
 public:
  Index param_dim(Index d_x) const override { return d_x; }
  Vector predict(const Matrix& X, const Vector& w) const override;
  Vector jacobian_transpose_product(const Matrix& X, const Vector& w, const Vector& v) const override;
};

/// Loss l(y_pred, y_true) summed over entries.
class Loss {
 public:
  virtual ~Loss() = default;
  virtual double value(const Vector& y_pred, const Vector& y_true) const = 0;
  virtual Vector grad_pred(const Vector& y_pred, const Vector& y_true) const = 0;
};

enum class LossScale { kHalf, kFull };

/// ||y_pred - y_true||^2, optionally halved. The sampler potential uses kHalf so
/// that exp(-U) is the posterior under unit observation noise.
class SquaredLoss final : public Loss {
 public:
  explicit SquaredLoss(LossScale scale = LossScale::kHalf) : scale_(scale) {}

  double value(const Vector& y_pred, const Vector& y_true) const override;
  Vector grad_pred(const Vector& y_pred, const Vector& y_true) const override;

  LossScale scale() const { return scale_; }
  /// Multiplier on (y_pred - y_true) in the gradient: 1 for half, 2 for full.
  double grad_factor() const { return scale_ == LossScale::kHalf ? 1.0 : 2.0; }

 private:
  LossScale scale_;
};

Vector predict(const RegressionModel& model, const Matrix& X, const Vector& w);
double loss_value(const Loss& loss, const Vector& y_pred, const Vector& y_true);
Vector loss_grad_pred(const Loss& loss, const Vector& y_pred, const Vector& y_true);

/// Reported validation metric: (1/n_v) sum_i (y_pred_i - y_true_i)^2.
double mean_squared_error(const Vector& y_pred, const Vector& y_true);

/// grad_w f(X; w)^T grad_{y'} l(y, f(X; w)) + r(w; theta), computed literally.
Vector potential_grad(const RegressionModel& model, const Loss& loss, const Task& task,
                      const Regularizer& reg, const Vector& w);

/// l(f(X; w), y) + neg_log_prior(w); the scalar whose gradient is potential_grad.
double potential_value(const RegressionModel& model, const Loss& loss, const Task& task,
                       const Regularizer& reg, const Vector& w);

/// Reusable gradient of the sampler potential on a fixed training set. For the
/// linear model with squared loss the data term is evaluated through the Gram
/// matrix X^T X and X^T y, which is algebraically identical to potential_grad.
class PotentialGradient {
 public:
  PotentialGradient(const RegressionModel& model, const Loss& loss, const Matrix& X, const Vector& y,
                    Regularizer reg);

  void operator()(const Vector& w, Vector& out) const;

  bool quadratic() const { return quadratic_; }
  const Matrix& gram() const { return gram_; }
  const Vector& xty() const { return xty_; }
  double data_scale() const { return data_scale_; }
  const Regularizer& regularizer() const { return reg_; }
  Index dim() const { return dim_; }

 private:
  const RegressionModel* model_;
  const Loss* loss_;
  const Matrix* X_;
  const Vector* y_;
  Regularizer reg_;
  Index dim_;
  bool quadratic_ = false;
  Matrix gram_;
  Vector xty_;
  double data_scale_ = 1.0;
};

}  // namespace lgd
