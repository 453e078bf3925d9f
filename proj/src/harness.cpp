#include "lgd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lgd/error.hpp"
#include "lgd/parallel.hpp"
#include "lgd/rng.hpp"

namespace lgd {
namespace {

using json = nlohmann::json;

// Independent streams derived from the experiment seed.
constexpr std::uint64_t kTaskStream = 0x7a5c0001;
constexpr std::uint64_t kNoiseStream = 0x7a5c0002;
constexpr std::uint64_t kVarianceStream = 0x7a5c0003;

bool is_known_method(const std::string& m) {
  return std::find(kAllMethods.begin(), kAllMethods.end(), m) != kAllMethods.end();
}

template <typename T>
void read_if(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

PriorSpec prior_from_json(const json& j, const PriorSpec& fallback, std::pair<double, double>& diag_range) {
  PriorSpec out = fallback;
  read_if(j, "d", out.dim);
  const std::string kind = j.value("kind", fallback.kind_name());
  const json params = j.value("params", json::object());
  if (kind == "isotropic") {
    IsotropicGaussian p;
    if (const auto* old = std::get_if<IsotropicGaussian>(&fallback.family)) p = *old;
    read_if(params, "variance", p.variance);
    out.family = p;
  } else if (kind == "diagonal") {
    DiagonalGaussian p;
    if (params.contains("variances")) {
      const auto v = params.at("variances").get<std::vector<double>>();
      p.variances = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    }
    if (params.contains("range")) {
      const auto r = params.at("range").get<std::vector<double>>();
      if (r.size() != 2) throw ConfigError("diagonal prior: 'range' needs two numbers");
      diag_range = {r[0], r[1]};
    }
    out.family = p;
  } else if (kind == "softplus") {
    SoftplusGaussian p;
    if (const auto* old = std::get_if<SoftplusGaussian>(&fallback.family)) p = *old;
    read_if(params, "alpha", p.alpha);
    read_if(params, "beta", p.beta);
    read_if(params, "gamma", p.gamma);
    out.family = p;
  } else {
    throw ConfigError("unknown prior kind '" + kind + "' (expected isotropic, diagonal or softplus)");
  }
  return out;
}

json prior_to_json(const PriorSpec& prior, const std::pair<double, double>& diag_range) {
  json params = json::object();
  if (const auto* iso = std::get_if<IsotropicGaussian>(&prior.family)) {
    params["variance"] = iso->variance;
  } else if (const auto* diag = std::get_if<DiagonalGaussian>(&prior.family)) {
    if (diag->variances.size() > 0) {
      params["variances"] = std::vector<double>(diag->variances.data(), diag->variances.data() + diag->variances.size());
    }
    params["range"] = {diag_range.first, diag_range.second};
  } else {
    const auto& sp = std::get<SoftplusGaussian>(prior.family);
    params = {{"alpha", sp.alpha}, {"beta", sp.beta}, {"gamma", sp.gamma}};
  }
  return {{"kind", prior.kind_name()}, {"params", params}, {"d", prior.dim}};
}

std::string failure_text(const std::string& method, Index n, const std::string& what) {
  return method + " n=" + std::to_string(n) + ": " + what;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
}

}  // namespace

void ExperimentConfig::validate() const {
  resolved_prior().validate();
  if (diag_range.first <= 0.0 || diag_range.second < diag_range.first) {
    throw ConfigError("experiment: diagonal variance range needs 0 < lo <= hi");
  }
  if (train_tasks < 1 || eval_tasks < 1) throw ConfigError("experiment: need >= 1 train and eval task");
  if (total_tasks < train_tasks + eval_tasks) {
    throw ConfigError("experiment: T=" + std::to_string(total_tasks) + " is less than train + eval tasks (" +
                      std::to_string(train_tasks + eval_tasks) + ")");
  }
  if (n_v < 1) throw ConfigError("experiment: n_v must be >= 1");
  if (n_train_grid.empty()) throw ConfigError("experiment: n_train_grid is empty");
  for (Index n : n_train_grid) {
    if (n < 1) throw ConfigError("experiment: n_train_grid entries must be >= 1");
  }
  const Index max_n = *std::max_element(n_train_grid.begin(), n_train_grid.end());
  if (max_n + n_v > n_total) {
    throw ConfigError("experiment: max(n_train_grid) + n_v = " + std::to_string(max_n + n_v) + " exceeds n_total " +
                      std::to_string(n_total));
  }
  if (!(input_scale > 0.0)) throw ConfigError("experiment: input_scale must be > 0");
  if (!(noise_std >= 0.0)) throw ConfigError("experiment: noise_std must be >= 0");
  if (methods.empty()) throw ConfigError("experiment: no methods selected");
  for (const auto& m : methods) {
    if (!is_known_method(m)) throw ConfigError("experiment: unknown method '" + m + "'");
  }
  if (threads < 1) throw ConfigError("experiment: threads must be >= 1");
  lgd.validate();
  gd.validate();
  meta.validate();
}

PriorSpec ExperimentConfig::resolved_prior() const {
  PriorSpec out = prior;
  if (auto* diag = std::get_if<DiagonalGaussian>(&out.family); diag && diag->variances.size() == 0) {
    Rng rng(derive_seed(seed, kVarianceStream));
    diag->variances.resize(out.dim);
    for (Index i = 0; i < out.dim; ++i) diag->variances[i] = rng.uniform(diag_range.first, diag_range.second);
  }
  return out;
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "isotropic") {
    c.prior = {IsotropicGaussian{0.1}, 10};
  } else if (name == "diagonal") {
    c.prior = {DiagonalGaussian{}, 10};
  } else if (name == "softplus") {
    c.prior = {SoftplusGaussian{1.0, 10.0, 0.1}, 10};
    c.lgd.burn_in = 5000;
    c.lgd.averaging = 50000;
    c.lgd.step_size = 1e-4;
    c.gd.iterations = 55000;
    c.gd.step_size = 1e-4;
    c.meta.eta_max = 1e-4;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected isotropic, diagonal or softplus)");
  }
  c.meta.burn_in = c.lgd.burn_in;
  c.meta.averaging = c.lgd.averaging;
  return c;
}

ExperimentConfig config_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("experiment config: top level must be an object");
  try {
    const std::string base = j.value("preset", j.value("name", std::string("isotropic")));
    ExperimentConfig c = preset_config(base == "isotropic" || base == "diagonal" || base == "softplus" ? base
                                                                                                        : "isotropic");
    read_if(j, "name", c.name);
    if (j.contains("prior")) c.prior = prior_from_json(j.at("prior"), c.prior, c.diag_range);
    if (j.contains("tasks")) {
      const json& t = j.at("tasks");
      read_if(t, "total", c.total_tasks);
      read_if(t, "train", c.train_tasks);
      read_if(t, "eval", c.eval_tasks);
    }
    read_if(j, "n_total", c.n_total);
    read_if(j, "n_v", c.n_v);
    read_if(j, "input_scale", c.input_scale);
    read_if(j, "noise_std", c.noise_std);
    read_if(j, "n_train_grid", c.n_train_grid);
    read_if(j, "methods", c.methods);
    read_if(j, "seed", c.seed);
    read_if(j, "threads", c.threads);
    if (j.contains("lgd")) {
      const json& l = j.at("lgd");
      read_if(l, "burn_in", c.lgd.burn_in);
      read_if(l, "averaging", c.lgd.averaging);
      read_if(l, "step_size", c.lgd.step_size);
      c.meta.burn_in = c.lgd.burn_in;
      c.meta.averaging = c.lgd.averaging;
    }
    if (j.contains("gd")) {
      read_if(j.at("gd"), "iterations", c.gd.iterations);
      read_if(j.at("gd"), "step_size", c.gd.step_size);
    }
    if (j.contains("meta")) {
      const json& m = j.at("meta");
      read_if(m, "steps", c.meta.steps);
      read_if(m, "adam_lr", c.meta.adam_lr);
      read_if(m, "adam_beta1", c.meta.adam_beta1);
      read_if(m, "adam_beta2", c.meta.adam_beta2);
      read_if(m, "adam_eps", c.meta.adam_eps);
      read_if(m, "burn_in", c.meta.burn_in);
      read_if(m, "averaging", c.meta.averaging);
      read_if(m, "fd_step", c.meta.fd_step);
      read_if(m, "cap_factor", c.meta.cap_factor);
      if (m.contains("eta_clamp")) {
        const auto r = m.at("eta_clamp").get<std::vector<double>>();
        if (r.size() != 2) throw ConfigError("meta.eta_clamp needs two numbers");
        c.meta.eta_min = r[0];
        c.meta.eta_max = r[1];
      }
      if (m.contains("grad_mode")) c.meta.grad_mode = grad_mode_from_string(m.at("grad_mode").get<std::string>());
      if (m.contains("theta0")) {
        const auto v = m.at("theta0").get<std::vector<double>>();
        c.meta.theta0 = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
      }
      if (m.contains("eta0")) c.meta.eta0 = m.at("eta0").get<double>();
    }
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_string(buffer.str());
}

std::string config_to_json_string(const ExperimentConfig& c) {
  json meta = {{"steps", c.meta.steps},
               {"adam_lr", c.meta.adam_lr},
               {"adam_beta1", c.meta.adam_beta1},
               {"adam_beta2", c.meta.adam_beta2},
               {"adam_eps", c.meta.adam_eps},
               {"eta_clamp", {c.meta.eta_min, c.meta.eta_max}},
               {"burn_in", c.meta.burn_in},
               {"averaging", c.meta.averaging},
               {"grad_mode", to_string(c.meta.grad_mode)},
               {"fd_step", c.meta.fd_step},
               {"cap_factor", c.meta.cap_factor}};
  if (c.meta.theta0) meta["theta0"] = std::vector<double>(c.meta.theta0->data(), c.meta.theta0->data() + c.meta.theta0->size());
  if (c.meta.eta0) meta["eta0"] = *c.meta.eta0;
  json j = {{"name", c.name},
            {"prior", prior_to_json(c.prior, c.diag_range)},
            {"tasks", {{"total", c.total_tasks}, {"train", c.train_tasks}, {"eval", c.eval_tasks}}},
            {"n_total", c.n_total},
            {"n_v", c.n_v},
            {"input_scale", c.input_scale},
            {"noise_std", c.noise_std},
            {"n_train_grid", c.n_train_grid},
            {"methods", c.methods},
            {"seed", c.seed},
            {"threads", c.threads},
            {"lgd", {{"burn_in", c.lgd.burn_in}, {"averaging", c.lgd.averaging}, {"step_size", c.lgd.step_size}}},
            {"gd", {{"iterations", c.gd.iterations}, {"step_size", c.gd.step_size}}},
            {"meta", meta}};
  return j.dump(2) + "\n";
}

void apply_fast(ExperimentConfig& config) { config.eval_tasks = std::min(config.eval_tasks, 50); }

std::uint64_t task_seed(const ExperimentConfig& config, std::size_t t) {
  return derive_seed(derive_seed(config.seed, kTaskStream), t);
}

std::uint64_t noise_seed(const ExperimentConfig& config, std::size_t t) {
  return derive_seed(derive_seed(config.seed, kNoiseStream), t);
}

std::vector<Task> generate_tasks(const ExperimentConfig& config) {
  config.validate();
  const PriorSpec prior = config.resolved_prior();
  const Index d = prior.dim;
  const Index n_train = config.max_train();
  const double input_sd = std::sqrt(config.input_scale);
  std::vector<Task> tasks(static_cast<std::size_t>(config.total_tasks));
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    Rng rng(task_seed(config, t));
    Vector w_star = sample_prior(prior, rng);
    if (config.zero_ground_truth) w_star.setZero();
    Matrix X(config.n_total, d);
    for (Index i = 0; i < config.n_total; ++i) {
      for (Index j = 0; j < d; ++j) X(i, j) = input_sd * rng.normal();
    }
    Vector y = X * w_star;
    for (Index i = 0; i < config.n_total; ++i) y[i] += config.noise_std * rng.normal();
    Task& task = tasks[t];
    task.X = X.topRows(n_train);
    task.y = y.head(n_train);
    task.Xv = X.bottomRows(config.n_v);
    task.yv = y.tail(config.n_v);
    task.ground_truth = std::move(w_star);
  }
  return tasks;
}

std::vector<Task> train_split(const ExperimentConfig& config, const std::vector<Task>& tasks) {
  if (static_cast<int>(tasks.size()) < config.train_tasks) {
    throw ConfigError("experiment: " + std::to_string(tasks.size()) + " tasks but " +
                      std::to_string(config.train_tasks) + " training tasks requested");
  }
  return {tasks.begin(), tasks.begin() + config.train_tasks};
}

std::vector<Task> eval_split(const ExperimentConfig& config, const std::vector<Task>& tasks) {
  const int total = static_cast<int>(tasks.size());
  if (total < config.train_tasks + 1) throw ConfigError("experiment: no held-out tasks");
  // Held-out tasks start right after the training tasks; --fast keeps the first 50 of them.
  const int begin = config.train_tasks;
  const int end = std::min(total, begin + config.eval_tasks);
  return {tasks.begin() + begin, tasks.begin() + end};
}

std::vector<MetaFit> meta_train_grid(const ExperimentConfig& config, const std::vector<Task>& tasks) {
  const std::vector<Task> train = train_split(config, tasks);
  const RegFamily family = reg_family(config.resolved_prior());
  MetaConfig meta = config.meta;
  meta.base_seed = derive_seed(config.seed, kNoiseStream);
  meta.threads = config.threads;
  std::vector<MetaFit> fits;
  for (Index n : config.n_train_grid) {
    MetaFit fit;
    fit.n_train = n;
    std::vector<Task> truncated;
    truncated.reserve(train.size());
    for (const Task& t : train) truncated.push_back(t.truncated(n));
    try {
      MetaResult r = meta_train(truncated, family, meta);
      fit.phi = r.best;
      fit.train_loss = r.best_loss;
      fit.trace = std::move(r.trace);
    } catch (const MetaTrainError& e) {
      fit.error = e.what();
      fit.trace = e.trace();
    }
    fits.push_back(std::move(fit));
  }
  return fits;
}

Predictor method_predictor(const std::string& method, const ExperimentConfig& config, const PriorSpec& prior,
                           const std::optional<HyperParams>& phi) {
  const std::size_t offset = static_cast<std::size_t>(config.train_tasks);
  auto lgd_seed = [config, offset](std::size_t index) { return noise_seed(config, offset + index); };
  if (method == "plain_gd" || method == "oracle_gd") {
    const Regularizer reg = method == "plain_gd" ? Regularizer::none() : oracle_regularizer(prior);
    const GdConfig gd = config.gd;
    return [reg, gd](const Task& task, std::size_t) {
      return Vector(task.Xv * gd_minimize(task, LinearModel(), SquaredLoss(LossScale::kHalf), reg, gd));
    };
  }
  if (method == "oracle_lgd" || method == "meta_lgd") {
    Regularizer reg = oracle_regularizer(prior);
    LgdConfig lgd = config.lgd;
    if (method == "meta_lgd") {
      if (!phi) throw ConfigError("meta_lgd needs learned hyperparameters");
      reg = reg_family(prior).regularizer(phi->theta());
      lgd.step_size = phi->eta();
    }
    return [reg, lgd, lgd_seed](const Task& task, std::size_t index) {
      LgdConfig run = lgd;
      run.seed = lgd_seed(index);
      return lgd_predict(task, LinearModel(), SquaredLoss(LossScale::kHalf), reg, run).predictions;
    };
  }
  if (method == "oracle_lgd_long") {
    const LgdConfig lgd = config.lgd;
    return [prior, lgd, lgd_seed](const Task& task, std::size_t index) {
      LgdConfig run = lgd;
      run.seed = lgd_seed(index);
      return reference_lgd_predict(task, prior, run);
    };
  }
  if (method == "bayes_oracle") {
    return [prior](const Task& task, std::size_t) { return bayes_oracle_predict(task, prior); };
  }
  throw ConfigError("unknown method '" + method + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<Task>& tasks) {
  config.validate();
  const PriorSpec prior = config.resolved_prior();
  const std::vector<Task> eval = eval_split(config, tasks);
  ExperimentResult result;
  const bool wants_meta = std::find(config.methods.begin(), config.methods.end(), "meta_lgd") != config.methods.end();
  if (wants_meta) result.meta = meta_train_grid(config, tasks);

  for (const std::string& method : config.methods) {
    for (std::size_t g = 0; g < config.n_train_grid.size(); ++g) {
      const Index n = config.n_train_grid[g];
      CurveRow row{method, static_cast<long>(n), std::nan(""), std::nan(""), static_cast<long>(eval.size()), 0};
      std::vector<double> per_task;
      try {
        std::optional<HyperParams> phi;
        if (method == "meta_lgd") {
          const MetaFit& fit = result.meta[g];
          if (!fit.phi) throw std::runtime_error("meta-training failed: " + fit.error);
          phi = fit.phi;
        }
        const auto curve = evaluate_learning_curve(method_predictor(method, config, prior, phi), eval, {n},
                                                   config.threads, config.meta.cap_factor);
        row.mean_mse = curve.front().mean_mse;
        row.stderr_mse = curve.front().stderr_mse;
        row.diverged = curve.front().diverged;
        per_task = curve.front().task_mse;
      } catch (const std::exception& e) {
        result.failures.push_back(failure_text(method, n, e.what()));
      }
      result.rows.push_back(row);
      result.task_mse.push_back(std::move(per_task));
    }
  }
  return result;
}

void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "results.csv", format_results_csv(result.rows));
  bool plottable = false;
  for (const CurveRow& r : result.rows) plottable = plottable || (std::isfinite(r.mean_mse) && r.mean_mse > 0.0);
  if (plottable) write_text(out_dir / "curves.svg", render_curves_svg(result.rows, config.name));

  if (!result.meta.empty()) {
    json fits = json::array();
    for (const MetaFit& fit : result.meta) {
      json entry = {{"n_train", fit.n_train}};
      if (fit.phi) {
        const Vector theta = fit.phi->theta();
        entry["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
        entry["eta"] = fit.phi->eta();
        entry["train_loss"] = fit.train_loss;
      } else {
        entry["error"] = fit.error;
      }
      fits.push_back(entry);
      write_trace_csv(out_dir / ("meta_trace_n" + std::to_string(fit.n_train) + ".csv"), fit.trace);
    }
    write_text(out_dir / "meta_params.json", fits.dump(2) + "\n");
  }
  if (!result.failures.empty()) {
    std::string text;
    for (const auto& f : result.failures) text += f + "\n";
    write_text(out_dir / "failures.txt", text);
  }
}

}  // namespace lgd
