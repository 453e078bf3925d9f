#include "lgd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgd/error.hpp"

namespace lgd {

void GdConfig::validate() const {
  if (iterations < 1) throw ConfigError("gd: iteration count K must be >= 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("gd: step size must be > 0");
}

Vector gd_minimize(const Task& task, const RegressionModel& model, const Loss& loss, const Regularizer& reg,
                   const GdConfig& config) {
  task.validate();
  config.validate();
  const PotentialGradient potential(model, loss, task.X, task.y, reg);
  Vector w = Vector::Zero(potential.dim());
  Vector g(w.size());
  for (std::int64_t k = 0; k < config.iterations; ++k) {
    potential(w, g);
    w -= config.step_size * g;
    if (!w.allFinite()) throw DivergenceError(k + 1, config.step_size);
  }
  return w;
}

Vector ridge_posterior_mean(const Matrix& X, const Vector& y, const Vector& precision) {
  require_dim("ridge: rows of X vs length of y", X.rows(), y.size());
  require_dim("ridge: precision length", X.cols(), precision.size());
  if (!(precision.array() > 0.0).all()) throw ConfigError("ridge: prior precision entries must be > 0");
  Matrix system = X.transpose() * X;
  system.diagonal() += precision;
  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) throw NumericalError("ridge: system is not symmetric positive definite");
  return llt.solve(X.transpose() * y);
}

Vector ridge_posterior_mean(const Matrix& X, const Vector& y, double precision) {
  return ridge_posterior_mean(X, y, Vector::Constant(X.cols(), precision));
}

namespace {

// U(w) = 1/2 w^T G w - c^T w + neg_log_prior(w), dropping the constant 1/2 y^T y.
struct QuadraturePotential {
  Matrix gram;
  Vector xty;
  const Regularizer* reg;

  double value(const Vector& w) const { return 0.5 * w.dot(gram * w) - xty.dot(w) + neg_log_prior(*reg, w); }
};

Vector find_mode(const QuadraturePotential& u) {
  const Index d = u.xty.size();
  Vector w = Vector::Zero(d);
  for (int iter = 0; iter < 200; ++iter) {
    Vector g = u.gram * w - u.xty;
    add_reg_grad(*u.reg, w, g);
    const RegJacobians jac = reg_grad_jacobians(*u.reg, w);
    Matrix hessian = u.gram;
    hessian.diagonal() += jac.dw_diag;
    const Vector step = hessian.llt().solve(g);
    double t = 1.0;
    const double f0 = u.value(w);
    while (t > 1e-12 && u.value(w - t * step) > f0 - 0.25 * t * g.dot(step)) t *= 0.5;
    w -= t * step;
    if (t * step.norm() < 1e-14 * (1.0 + w.norm())) break;
  }
  return w;
}

struct Box {
  Vector lo;
  Vector hi;
};

// Evaluates -U on the tensor grid; calls visit(point, log_density).
template <typename Visit>
void for_each_node(const Box& box, int nodes, Visit&& visit) {
  const Index d = box.lo.size();
  const Vector step = (box.hi - box.lo) / static_cast<double>(nodes - 1);
  Vector w(d);
  const long total = d == 1 ? nodes : static_cast<long>(nodes) * nodes;
  for (long flat = 0; flat < total; ++flat) {
    const long i = flat % nodes;
    w[0] = box.lo[0] + step[0] * static_cast<double>(i);
    long j = 0;
    if (d == 2) {
      j = flat / nodes;
      w[1] = box.lo[1] + step[1] * static_cast<double>(j);
    }
    visit(w, i, j);
  }
}

}  // namespace

Vector posterior_mean_quadrature(const Matrix& X, const Vector& y, const Regularizer& reg, int nodes_per_axis) {
  require_dim("quadrature: rows of X vs length of y", X.rows(), y.size());
  const Index d = X.cols();
  if (d < 1 || d > 2) throw ConfigError("quadrature posterior mean supports d <= 2, got d=" + std::to_string(d));
  if (nodes_per_axis < 16) throw ConfigError("quadrature: need at least 16 nodes per axis");
  reg.validate(d);

  const QuadraturePotential u{X.transpose() * X, X.transpose() * y, &reg};
  const Vector mode = find_mode(u);
  const double u_mode = u.value(mode);

  // Strong convexity bounds the density by a Gaussian of variance 1/m around the mode.
  const double m = Eigen::SelfAdjointEigenSolver<Matrix>(u.gram).eigenvalues().minCoeff() +
                   reg_strong_convexity(reg);
  if (!(m > 0.0)) throw NumericalError("quadrature: potential is not strongly convex");
  const double half_width = 12.0 / std::sqrt(m);
  Box box{mode.array() - half_width, mode.array() + half_width};

  // Pass 1 on the wide box: shrink to the nodes carrying non-negligible mass.
  constexpr double kLogCutoff = 40.0;
  std::vector<int> active_lo(d, nodes_per_axis), active_hi(d, -1);
  for_each_node(box, nodes_per_axis, [&](const Vector& w, long i, long j) {
    if (u_mode - u.value(w) > -kLogCutoff) {
      active_lo[0] = std::min<int>(active_lo[0], static_cast<int>(i));
      active_hi[0] = std::max<int>(active_hi[0], static_cast<int>(i));
      if (d == 2) {
        active_lo[1] = std::min<int>(active_lo[1], static_cast<int>(j));
        active_hi[1] = std::max<int>(active_hi[1], static_cast<int>(j));
      }
    }
  });
  const Vector coarse = (box.hi - box.lo) / static_cast<double>(nodes_per_axis - 1);
  Box refined = box;
  for (Index a = 0; a < d; ++a) {
    refined.lo[a] = box.lo[a] + coarse[a] * std::max(0, active_lo[a] - 1);
    refined.hi[a] = box.lo[a] + coarse[a] * std::min(nodes_per_axis - 1, active_hi[a] + 1);
  }

  // Pass 2: trapezoid rule on the refined box.
  double mass = 0.0;
  Vector first = Vector::Zero(d);
  for_each_node(refined, nodes_per_axis, [&](const Vector& w, long i, long j) {
    double weight = (i == 0 || i == nodes_per_axis - 1) ? 0.5 : 1.0;
    if (d == 2 && (j == 0 || j == nodes_per_axis - 1)) weight *= 0.5;
    const double p = weight * std::exp(u_mode - u.value(w));
    mass += p;
    first += p * w;
  });
  return first / mass;
}

Vector bayes_oracle_predict(const Task& task, const PriorSpec& prior) {
  task.validate();
  prior.validate();
  require_dim("bayes oracle: prior dimension vs task features", task.d_x(), prior.dim);
  if (const auto* iso = std::get_if<IsotropicGaussian>(&prior.family)) {
    return task.Xv * ridge_posterior_mean(task.X, task.y, 1.0 / iso->variance);
  }
  if (const auto* diag = std::get_if<DiagonalGaussian>(&prior.family)) {
    return task.Xv * ridge_posterior_mean(task.X, task.y, Vector(diag->variances.cwiseInverse()));
  }
  if (prior.dim > 2) {
    throw ConfigError("bayes oracle: softplus prior has no closed form and quadrature is limited to d <= 2 (d=" +
                      std::to_string(prior.dim) + "); use reference_lgd_predict");
  }
  return task.Xv * posterior_mean_quadrature(task.X, task.y, oracle_regularizer(prior));
}

Vector reference_lgd_predict(const Task& task, const PriorSpec& prior, const LgdConfig& base) {
  LgdConfig config = base;
  config.burn_in *= 10;
  config.averaging *= 10;
  config.record_chain = false;
  const LinearModel model;
  const SquaredLoss loss(LossScale::kHalf);
  return lgd_predict(task, model, loss, oracle_regularizer(prior), config).predictions;
}

}  // namespace lgd
