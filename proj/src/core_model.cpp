#include "lgd/core_model.hpp"

#include <string>

#include "lgd/error.hpp"

namespace lgd {

void require_dim(const char* what, long expected, long actual) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(expected) + ", got " +
                         std::to_string(actual));
  }
}

void Task::validate() const {
  require_dim("task: rows of y vs rows of X", X.rows(), y.size());
  require_dim("task: rows of yv vs rows of Xv", Xv.rows(), yv.size());
  require_dim("task: columns of Xv vs columns of X", X.cols(), Xv.cols());
  if (X.rows() < 1 || Xv.rows() < 1 || X.cols() < 1) {
    throw DimensionError("task: need n >= 1, n_v >= 1 and d_x >= 1 (got n=" + std::to_string(X.rows()) +
                         ", n_v=" + std::to_string(Xv.rows()) + ", d_x=" + std::to_string(X.cols()) + ")");
  }
}

Task Task::truncated(Index n_train) const {
  if (n_train < 1 || n_train > n()) {
    throw DimensionError("task: cannot truncate " + std::to_string(n()) + " training rows to " +
                         std::to_string(n_train));
  }
  Task out;
  out.X = X.topRows(n_train);
  out.y = y.head(n_train);
  out.Xv = Xv;
  out.yv = yv;
  out.ground_truth = ground_truth;
  return out;
}

Vector LinearModel::predict(const Matrix& X, const Vector& w) const {
  require_dim("predict: columns of X vs length of w", w.size(), X.cols());
  return X * w;
}

Vector LinearModel::jacobian_transpose_product(const Matrix& X, const Vector& w, const Vector& v) const {
  require_dim("jacobian: columns of X vs length of w", w.size(), X.cols());
  require_dim("jacobian: rows of X vs length of v", X.rows(), v.size());
  return X.transpose() * v;
}

double SquaredLoss::value(const Vector& y_pred, const Vector& y_true) const {
  require_dim("loss: prediction vs target length", y_true.size(), y_pred.size());
  const double full = (y_pred - y_true).squaredNorm();
  return scale_ == LossScale::kHalf ? 0.5 * full : full;
}

Vector SquaredLoss::grad_pred(const Vector& y_pred, const Vector& y_true) const {
  require_dim("loss gradient: prediction vs target length", y_true.size(), y_pred.size());
  return grad_factor() * (y_pred - y_true);
}

Vector predict(const RegressionModel& model, const Matrix& X, const Vector& w) {
  return model.predict(X, w);
}

double loss_value(const Loss& loss, const Vector& y_pred, const Vector& y_true) {
  return loss.value(y_pred, y_true);
}

Vector loss_grad_pred(const Loss& loss, const Vector& y_pred, const Vector& y_true) {
  return loss.grad_pred(y_pred, y_true);
}

double mean_squared_error(const Vector& y_pred, const Vector& y_true) {
  require_dim("mse: prediction vs target length", y_true.size(), y_pred.size());
  if (y_true.size() == 0) throw DimensionError("mse: empty vectors");
  return (y_pred - y_true).squaredNorm() / static_cast<double>(y_true.size());
}

Vector potential_grad(const RegressionModel& model, const Loss& loss, const Task& task,
                      const Regularizer& reg, const Vector& w) {
  require_dim("potential_grad: parameter dimension", model.param_dim(task.d_x()), w.size());
  const Vector pred = model.predict(task.X, w);
  Vector g = model.jacobian_transpose_product(task.X, w, loss.grad_pred(pred, task.y));
  add_reg_grad(reg, w, g);
  return g;
}

double potential_value(const RegressionModel& model, const Loss& loss, const Task& task,
                       const Regularizer& reg, const Vector& w) {
  return loss.value(model.predict(task.X, w), task.y) + neg_log_prior(reg, w);
}

PotentialGradient::PotentialGradient(const RegressionModel& model, const Loss& loss, const Matrix& X,
                                     const Vector& y, Regularizer reg)
    : model_(&model), loss_(&loss), X_(&X), y_(&y), reg_(std::move(reg)), dim_(model.param_dim(X.cols())) {
  require_dim("potential: rows of X vs length of y", X.rows(), y.size());
  reg_.validate(dim_);
  const auto* squared = dynamic_cast<const SquaredLoss*>(&loss);
  if (dynamic_cast<const LinearModel*>(&model) != nullptr && squared != nullptr) {
    quadratic_ = true;
    gram_ = X.transpose() * X;
    xty_ = X.transpose() * y;
    data_scale_ = squared->grad_factor();
  }
}

void PotentialGradient::operator()(const Vector& w, Vector& out) const {
  if (quadratic_) {
    out.noalias() = gram_ * w;
    out -= xty_;
    out *= data_scale_;
  } else {
    out = model_->jacobian_transpose_product(*X_, w, loss_->grad_pred(model_->predict(*X_, w), *y_));
  }
  add_reg_grad(reg_, w, out);
}

}  // namespace lgd
