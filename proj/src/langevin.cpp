#include "lgd/langevin.hpp"

#include <fstream>

#include "lgd/error.hpp"
#include "lgd/rng.hpp"
#include "ula_kernel.hpp"

namespace lgd {
namespace {

void draw_noise(const LgdConfig& config, std::int64_t k, Vector& xi) {
  if (config.inject_noise) {
    fill_langevin_noise(config.seed, static_cast<std::uint64_t>(k), std::span<double>(xi.data(), xi.size()));
  } else {
    xi.setZero();
  }
}

Vector initial_iterate(const LgdConfig& config, Index dim) {
  if (!config.initial) return Vector::Zero(dim);
  require_dim("lgd: initial iterate", dim, config.initial->size());
  return *config.initial;
}

// Runs B+b steps; `on_iterate(w, k)` sees every iterate w_(k), k >= 1.
template <typename OnIterate>
void run_chain(const GradientFn& grad_fn, Vector& w, const LgdConfig& config, OnIterate&& on_iterate) {
  const Index dim = w.size();
  const double scale = detail::noise_scale(config.step_size);
  const std::int64_t total = config.burn_in + config.averaging;
  Vector g(dim);
  Vector xi(dim);
  for (std::int64_t k = 0; k < total; ++k) {
    grad_fn(w, g);
    draw_noise(config, k, xi);
    detail::ula_update(w, g, config.step_size, scale, xi);
    if (!w.allFinite()) throw DivergenceError(k + 1, config.step_size);
    on_iterate(w, k + 1);
  }
}

}  // namespace

void LgdConfig::validate() const {
  if (burn_in < 0) throw ConfigError("lgd: burn-in B must be >= 0");
  if (averaging < 1) throw ConfigError("lgd: averaging steps b must be >= 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("lgd: step size must be > 0");
}

Vector ula_step(const Vector& w, const Vector& grad, double step_size, const Vector& noise, std::int64_t step_index) {
  require_dim("ula_step: gradient length", w.size(), grad.size());
  require_dim("ula_step: noise length", w.size(), noise.size());
  Vector out = w;
  detail::ula_update(out, grad, step_size, detail::noise_scale(step_size), noise);
  if (!out.allFinite()) throw DivergenceError(step_index, step_size);
  return out;
}

LgdResult lgd_predict(const Task& task, const RegressionModel& model, const Loss& loss, const Regularizer& reg,
                      const LgdConfig& config) {
  task.validate();
  config.validate();
  const PotentialGradient potential(model, loss, task.X, task.y, reg);
  const GradientFn grad_fn = [&potential](const Vector& w, Vector& g) { potential(w, g); };

  LgdResult result;
  Vector w = initial_iterate(config, potential.dim());
  if (config.record_chain) {
    result.chain.reserve(static_cast<std::size_t>(config.burn_in + config.averaging + 1));
    result.chain.push_back(w);
  }
  const double inv_b = 1.0 / static_cast<double>(config.averaging);

  if (potential.quadratic()) {
    // Linear model: the mean of Xv w_(k) equals Xv times the mean iterate.
    Vector w_sum = Vector::Zero(w.size());
    run_chain(grad_fn, w, config, [&](const Vector& wk, std::int64_t k) {
      if (config.record_chain) result.chain.push_back(wk);
      if (k > config.burn_in) w_sum += wk;
    });
    result.predictions = task.Xv * (w_sum * inv_b);
  } else {
    Vector prediction_sum = Vector::Zero(task.n_v());
    run_chain(grad_fn, w, config, [&](const Vector& wk, std::int64_t k) {
      if (config.record_chain) result.chain.push_back(wk);
      if (k > config.burn_in) prediction_sum += model.predict(task.Xv, wk);
    });
    result.predictions = prediction_sum * inv_b;
  }
  return result;
}

ChainState lgd_advance(const Task& task, const RegressionModel& model, const Loss& loss, const Regularizer& reg,
                       const LgdConfig& config, std::int64_t steps) {
  task.validate();
  config.validate();
  if (steps < 0 || steps > config.burn_in + config.averaging) {
    throw ConfigError("lgd_advance: steps must lie in [0, B+b]");
  }
  const PotentialGradient potential(model, loss, task.X, task.y, reg);
  const GradientFn grad_fn = [&potential](const Vector& w, Vector& g) { potential(w, g); };
  ChainState state{initial_iterate(config, potential.dim()), 0, Vector::Zero(task.n_v())};
  LgdConfig partial = config;
  partial.burn_in = std::min(config.burn_in, steps);
  partial.averaging = steps - partial.burn_in;
  if (steps == 0) return state;
  run_chain(grad_fn, state.w, partial, [&](const Vector& wk, std::int64_t k) {
    state.k = k;
    if (k > config.burn_in) state.prediction_sum += model.predict(task.Xv, wk);
  });
  return state;
}

UlaRun run_ula(const GradientFn& grad, Index dim, const LgdConfig& config) {
  config.validate();
  UlaRun run;
  Vector z = initial_iterate(config, dim);
  if (config.record_chain) {
    run.chain.reserve(static_cast<std::size_t>(config.burn_in + config.averaging + 1));
    run.chain.push_back(z);
  }
  Vector sum = Vector::Zero(dim);
  run_chain(grad, z, config, [&](const Vector& zk, std::int64_t k) {
    if (config.record_chain) run.chain.push_back(zk);
    if (k > config.burn_in) sum += zk;
  });
  run.average = sum / static_cast<double>(config.averaging);
  return run;
}

ChainMoments chain_moments(const std::vector<Vector>& chain, std::int64_t burn_in) {
  if (burn_in < 0) throw ConfigError("chain_moments: burn-in must be >= 0");
  if (static_cast<std::int64_t>(chain.size()) <= burn_in + 1) {
    throw ConfigError("chain_moments: chain of " + std::to_string(chain.size()) +
                      " iterates has nothing after burn-in " + std::to_string(burn_in));
  }
  const Index dim = chain.front().size();
  ChainMoments out{Vector::Zero(dim), Vector::Zero(dim), 0, false};
  Vector m2 = Vector::Zero(dim);
  // Welford update over k = B+1..end.
  for (std::size_t k = static_cast<std::size_t>(burn_in) + 1; k < chain.size(); ++k) {
    ++out.samples;
    const Vector delta = chain[k] - out.mean;
    out.mean += delta / static_cast<double>(out.samples);
    m2 += delta.cwiseProduct(chain[k] - out.mean);
  }
  if (out.samples == 1) {
    out.degenerate = true;
  } else {
    out.variance = m2 / static_cast<double>(out.samples - 1);
  }
  return out;
}

void write_chain_csv(const std::filesystem::path& path, const std::vector<Vector>& chain, std::int64_t burn_in) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  const Index dim = chain.empty() ? 0 : chain.front().size();
  out << "step,k";
  for (Index j = 1; j <= dim; ++j) out << ",w_" << j;
  out << '\n';
  out.precision(17);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const char* phase = k == 0 ? "init" : (static_cast<std::int64_t>(k) <= burn_in ? "burn_in" : "averaging");
    out << phase << ',' << k;
    for (Index j = 0; j < dim; ++j) out << ',' << chain[k][j];
    out << '\n';
  }
}

}  // namespace lgd
