#include "lgd/metalearn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "lgd/error.hpp"
#include "lgd/langevin.hpp"
#include "lgd/parallel.hpp"
#include "lgd/rng.hpp"
#include "ula_kernel.hpp"

namespace lgd {

HyperParams HyperParams::from_natural(const Vector& theta, double eta) {
  if (!(theta.array() > 0.0).all()) throw ConfigError("hyperparameters: theta entries must be > 0");
  if (!(eta > 0.0)) throw ConfigError("hyperparameters: eta must be > 0");
  return {theta.array().log().matrix(), std::log(eta)};
}

double HyperParams::eta() const { return std::exp(log_eta); }

double HyperParams::sqrt_eta() const { return std::exp(0.5 * log_eta); }

Vector HyperParams::packed() const {
  Vector out(size());
  out.head(log_theta.size()) = log_theta;
  out[log_theta.size()] = log_eta;
  return out;
}

HyperParams HyperParams::unpack(const Vector& packed) {
  if (packed.size() < 2) throw DimensionError("hyperparameters: packed vector needs at least 2 entries");
  return {packed.head(packed.size() - 1), packed[packed.size() - 1]};
}

Index RegFamily::hyper_dim(Index d) const { return Regularizer{kind, Vector(), beta}.hyper_dim(d); }

Regularizer RegFamily::regularizer(const Vector& theta) const { return Regularizer{kind, theta, beta}; }

RegFamily reg_family(const PriorSpec& prior) { return {regularizer_kind(prior), family_beta(prior)}; }

GradMode grad_mode_from_string(const std::string& name) {
  if (name == "forward_dual") return GradMode::kForwardDual;
  if (name == "finite_diff") return GradMode::kFiniteDiff;
  throw ConfigError("unknown grad_mode '" + name + "' (expected forward_dual or finite_diff)");
}

std::string to_string(GradMode mode) { return mode == GradMode::kForwardDual ? "forward_dual" : "finite_diff"; }

void MetaConfig::validate() const {
  if (steps < 1) throw ConfigError("meta: steps must be >= 1");
  if (!(adam_lr > 0.0)) throw ConfigError("meta: adam_lr must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("meta: Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("meta: adam_eps must be > 0");
  if (!(eta_min > 0.0 && eta_min < eta_max)) throw ConfigError("meta: eta clamp needs 0 < lo < hi");
  if (burn_in < 0 || averaging < 1) throw ConfigError("meta: need B >= 0 and b >= 1");
  if (!(fd_step > 0.0)) throw ConfigError("meta: fd_step must be > 0");
  if (!(cap_factor > 0.0)) throw ConfigError("meta: cap_factor must be > 0");
  if (theta0 && !(theta0->array() > 0.0).all()) throw ConfigError("meta: theta0 entries must be > 0");
  if (eta0 && !(*eta0 >= eta_min && *eta0 <= eta_max)) throw ConfigError("meta: eta0 must lie inside the clamp");
}

HyperParams MetaConfig::initial(Index h) const {
  Vector theta = Vector::Ones(h);
  if (theta0) {
    require_dim("meta: theta0 length", h, theta0->size());
    theta = *theta0;
  }
  return HyperParams::from_natural(theta, eta0 ? *eta0 : std::sqrt(eta_min * eta_max));
}

std::vector<std::uint64_t> task_seeds(std::uint64_t base_seed, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t t = 0; t < count; ++t) seeds[t] = derive_seed(base_seed, t);
  return seeds;
}

double loss_cap(const Task& task, double cap_factor) {
  const double zero_loss = task.yv.squaredNorm() / static_cast<double>(task.n_v());
  return zero_loss > 0.0 ? cap_factor * zero_loss : cap_factor;
}

namespace {

void check_inputs(const HyperParams& phi, const RegFamily& family, const std::vector<Task>& tasks,
                  const std::vector<std::uint64_t>& seeds, const MetaConfig& config) {
  if (tasks.empty()) throw ConfigError("meta: need at least one task");
  if (seeds.size() != tasks.size()) {
    throw DimensionError("meta: " + std::to_string(seeds.size()) + " seeds for " + std::to_string(tasks.size()) +
                         " tasks");
  }
  const Index d = tasks.front().d_x();
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    tasks[t].validate();
    if (tasks[t].d_x() != d) throw DimensionError("meta: task " + std::to_string(t) + " has a different d_x");
  }
  require_dim("meta: hyperparameter count", family.hyper_dim(d), phi.log_theta.size());
  config.validate();
}

LgdConfig chain_config(const MetaConfig& config, double eta, std::uint64_t seed) {
  LgdConfig out;
  out.burn_in = config.burn_in;
  out.averaging = config.averaging;
  out.step_size = eta;
  out.seed = seed;
  return out;
}

struct TaskLoss {
  double mse = 0.0;
  bool diverged = false;
  bool capped = false;
};

TaskLoss task_loss(const Task& task, const Regularizer& reg, double eta, std::uint64_t seed,
                   const MetaConfig& config) {
  const LinearModel model;
  const SquaredLoss loss(LossScale::kHalf);
  const double cap = loss_cap(task, config.cap_factor);
  try {
    const Vector pred = lgd_predict(task, model, loss, reg, chain_config(config, eta, seed)).predictions;
    const double mse = mean_squared_error(pred, task.yv);
    if (!(mse <= cap)) return {cap, false, true};
    return {mse, false, false};
  } catch (const DivergenceError&) {
    return {cap, true, true};
  }
}

struct TaskGrad {
  TaskLoss value;
  Vector grad;
};

// Forward-mode derivative of one task's loss. The tangent T = dw/d(log theta, log eta)
// is carried as a d x (h+1) matrix next to the iterate; the iterate itself is
// updated with exactly the operations of lgd_predict so the loss matches bitwise.
TaskGrad task_hypergrad(const Task& task, const Regularizer& reg, double eta, std::uint64_t seed,
                        const MetaConfig& config) {
  const LinearModel model;
  const SquaredLoss loss(LossScale::kHalf);
  const PotentialGradient potential(model, loss, task.X, task.y, reg);
  const Index d = potential.dim();
  const Index h = reg.hyper_dim(d);
  const Index p = h + 1;
  const double cap = loss_cap(task, config.cap_factor);
  const double noise_scale = detail::noise_scale(eta);
  const Vector& theta = reg.theta;

  Vector w = Vector::Zero(d);
  Vector g(d), xi(d), w_sum = Vector::Zero(d), dw(d);
  Matrix tangent = Matrix::Zero(d, p), dg(d, p), tangent_sum = Matrix::Zero(d, p), dtheta = Matrix::Zero(d, h);
  const std::int64_t total = config.burn_in + config.averaging;
  for (std::int64_t k = 0; k < total; ++k) {
    potential(w, g);
    reg_grad_jacobians_into(reg, w, dw, dtheta);
    // d g / d phi = H T + (d r / d theta) diag(theta) on the theta columns.
    dg.noalias() = potential.gram() * tangent;
    dg *= potential.data_scale();
    dg += dw.asDiagonal() * tangent;
    dg.leftCols(h) += dtheta * theta.asDiagonal();
    fill_langevin_noise(seed, static_cast<std::uint64_t>(k), std::span<double>(xi.data(), xi.size()));
    tangent -= eta * dg;
    tangent.col(h) -= eta * g;
    tangent.col(h) += (0.5 * noise_scale) * xi;
    detail::ula_update(w, g, eta, noise_scale, xi);
    if (!w.allFinite()) return {{cap, true, true}, Vector::Zero(p)};
    if (k + 1 > config.burn_in) {
      w_sum += w;
      tangent_sum += tangent;
    }
  }
  const double inv_b = 1.0 / static_cast<double>(config.averaging);
  const Vector pred = task.Xv * (w_sum * inv_b);
  const double mse = mean_squared_error(pred, task.yv);
  if (!(mse <= cap) || !tangent_sum.allFinite()) return {{cap, false, true}, Vector::Zero(p)};
  const Vector resid = pred - task.yv;
  const Matrix dpred = task.Xv * (tangent_sum * inv_b);
  Vector grad = (2.0 / static_cast<double>(task.n_v())) * (dpred.transpose() * resid);
  return {{mse, false, false}, std::move(grad)};
}

}  // namespace

LossReport validation_loss(const HyperParams& phi, const RegFamily& family, const std::vector<Task>& tasks,
                           const std::vector<std::uint64_t>& seeds, const MetaConfig& config) {
  check_inputs(phi, family, tasks, seeds, config);
  const Regularizer reg = family.regularizer(phi.theta());
  const double eta = phi.eta();
  std::vector<TaskLoss> per_task(tasks.size());
  parallel_for(tasks.size(), config.threads,
               [&](std::size_t t) { per_task[t] = task_loss(tasks[t], reg, eta, seeds[t], config); });
  LossReport report;
  for (const TaskLoss& r : per_task) {
    report.loss += r.mse;
    report.diverged += r.diverged ? 1 : 0;
    report.capped += r.capped ? 1 : 0;
  }
  report.loss /= static_cast<double>(tasks.size());
  return report;
}

HypergradResult hypergrad(const HyperParams& phi, const RegFamily& family, const std::vector<Task>& tasks,
                          const std::vector<std::uint64_t>& seeds, const MetaConfig& config) {
  check_inputs(phi, family, tasks, seeds, config);
  HypergradResult out;
  const Index p = phi.size();
  out.grad = Vector::Zero(p);

  if (config.grad_mode == GradMode::kFiniteDiff) {
    const LossReport centre = validation_loss(phi, family, tasks, seeds, config);
    out.loss = centre.loss;
    out.diverged = centre.diverged;
    out.capped = centre.capped;
    out.flagged = centre.capped > 0;
    const Vector base = phi.packed();
    for (Index i = 0; i < p; ++i) {
      Vector plus = base, minus = base;
      plus[i] += config.fd_step;
      minus[i] -= config.fd_step;
      const LossReport lp = validation_loss(HyperParams::unpack(plus), family, tasks, seeds, config);
      const LossReport lm = validation_loss(HyperParams::unpack(minus), family, tasks, seeds, config);
      out.flagged = out.flagged || lp.capped > 0 || lm.capped > 0;
      out.grad[i] = (lp.loss - lm.loss) / (2.0 * config.fd_step);
    }
    return out;
  }

  const Regularizer reg = family.regularizer(phi.theta());
  const double eta = phi.eta();
  std::vector<TaskGrad> per_task(tasks.size());
  parallel_for(tasks.size(), config.threads,
               [&](std::size_t t) { per_task[t] = task_hypergrad(tasks[t], reg, eta, seeds[t], config); });
  for (const TaskGrad& r : per_task) {
    out.loss += r.value.mse;
    out.grad += r.grad;
    out.diverged += r.value.diverged ? 1 : 0;
    out.capped += r.value.capped ? 1 : 0;
  }
  const double inv_t = 1.0 / static_cast<double>(tasks.size());
  out.loss *= inv_t;
  out.grad *= inv_t;
  out.flagged = out.capped > 0;
  return out;
}

MetaResult meta_train(const std::vector<Task>& tasks, const RegFamily& family, const MetaConfig& config) {
  config.validate();
  if (tasks.empty()) throw ConfigError("meta_train: need at least one task");
  const Index h = family.hyper_dim(tasks.front().d_x());
  const std::vector<std::uint64_t> seeds = task_seeds(config.base_seed, tasks.size());
  const double log_lo = std::log(config.eta_min);
  const double log_hi = std::log(config.eta_max);

  HyperParams phi = config.initial(h);
  phi.log_eta = std::clamp(phi.log_eta, log_lo, log_hi);
  Vector params = phi.packed();
  Vector m1 = Vector::Zero(params.size());
  Vector m2 = Vector::Zero(params.size());

  MetaResult result;
  result.best_loss = std::numeric_limits<double>::infinity();
  Vector previous = params;
  double lr = config.adam_lr;
  int adam_t = 0;
  for (int step = 0; step <= config.steps; ++step) {
    phi = HyperParams::unpack(params);
    HypergradResult eval;
    if (step < config.steps) {
      eval = hypergrad(phi, family, tasks, seeds, config);
    } else {
      const LossReport last = validation_loss(phi, family, tasks, seeds, config);
      eval.loss = last.loss;
      eval.diverged = last.diverged;
    }
    result.trace.push_back({step, eval.loss, phi.log_theta, phi.log_eta, eval.diverged});
    const bool can_backtrack = config.backtrack_on_divergence && step > 0;
    if (eval.diverged == static_cast<int>(tasks.size()) && !can_backtrack) {
      throw MetaTrainError("meta_train: every task diverged at step " + std::to_string(step) +
                               " (eta=" + std::to_string(phi.eta()) + ")",
                           result.trace);
    }
    if (eval.loss < result.best_loss) {
      result.best_loss = eval.loss;
      result.best = phi;
    }
    if (step == config.steps) break;

    if (eval.diverged > 0 && can_backtrack) {
      params = previous;
      lr *= 0.5;
      adam_t = 0;
      m1.setZero();
      m2.setZero();
      continue;
    }
    previous = params;
    const double t = static_cast<double>(++adam_t);
    m1 = config.adam_beta1 * m1 + (1.0 - config.adam_beta1) * eval.grad;
    m2 = config.adam_beta2 * m2 + (1.0 - config.adam_beta2) * eval.grad.cwiseAbs2();
    const Vector m1_hat = m1 / (1.0 - std::pow(config.adam_beta1, t));
    const Vector m2_hat = m2 / (1.0 - std::pow(config.adam_beta2, t));
    params.array() -= lr * m1_hat.array() / (m2_hat.array().sqrt() + config.adam_eps);
    params[h] = std::clamp(params[h], log_lo, log_hi);
  }
  return result;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<MetaTraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  const Index h = trace.empty() ? 0 : trace.front().log_theta.size();
  out << "step,loss";
  for (Index i = 1; i <= h; ++i) out << ",log_theta_" << i;
  out << ",log_eta,divergence_count\n";
  out.precision(17);
  for (const MetaTraceRow& row : trace) {
    out << row.step << ',' << row.loss;
    for (Index i = 0; i < h; ++i) out << ',' << row.log_theta[i];
    out << ',' << row.log_eta << ',' << row.divergence_count << '\n';
  }
}

std::vector<CurvePoint> evaluate_learning_curve(const Predictor& predictor, const std::vector<Task>& tasks,
                                                const std::vector<Index>& n_train_grid, int threads,
                                                double cap_factor) {
  if (tasks.empty()) throw ConfigError("learning curve: no tasks");
  if (n_train_grid.empty()) throw ConfigError("learning curve: empty n_train grid");
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (const Index n : n_train_grid) {
      if (n < 1 || n > tasks[t].n()) {
        throw ConfigError("learning curve: n_train=" + std::to_string(n) + " but task " + std::to_string(t) +
                          " has " + std::to_string(tasks[t].n()) + " training rows");
      }
    }
  }
  const std::size_t count = tasks.size();
  std::vector<double> mse(n_train_grid.size() * count);
  std::vector<char> diverged(mse.size(), 0);
  parallel_for(mse.size(), threads, [&](std::size_t cell) {
    const std::size_t g = cell / count;
    const std::size_t t = cell % count;
    const Task task = tasks[t].truncated(n_train_grid[g]);
    try {
      mse[cell] = std::min(mean_squared_error(predictor(task, t), task.yv), loss_cap(task, cap_factor));
    } catch (const DivergenceError&) {
      mse[cell] = loss_cap(task, cap_factor);
      diverged[cell] = 1;
    }
  });

  std::vector<CurvePoint> curve;
  for (std::size_t g = 0; g < n_train_grid.size(); ++g) {
    CurvePoint point;
    point.n_train = n_train_grid[g];
    point.n_tasks = static_cast<Index>(count);
    double sum = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
      sum += mse[g * count + t];
      point.diverged += diverged[g * count + t];
    }
    point.mean_mse = sum / static_cast<double>(count);
    point.task_mse.assign(mse.begin() + static_cast<std::ptrdiff_t>(g * count),
                          mse.begin() + static_cast<std::ptrdiff_t>((g + 1) * count));
    if (count > 1) {
      double ss = 0.0;
      for (std::size_t t = 0; t < count; ++t) {
        const double dev = mse[g * count + t] - point.mean_mse;
        ss += dev * dev;
      }
      point.stderr_mse = std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count));
    }
    curve.push_back(point);
  }
  return curve;
}

}  // namespace lgd
