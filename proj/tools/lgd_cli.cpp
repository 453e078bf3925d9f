// lgd: generate synthetic few-shot regression tasks, meta-learn LGD
// hyperparameters, evaluate learning curves and print theory bounds.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lgd/bounds_request.hpp"
#include "lgd/error.hpp"
#include "lgd/harness.hpp"
#include "lgd/task_io.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct GlobalOptions {
  std::string config_path;
  std::string preset = "isotropic";
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "out";
  int threads = 1;
  bool fast = false;
};

lgd::ExperimentConfig resolve_config(const GlobalOptions& g) {
  lgd::ExperimentConfig c = g.config_path.empty() ? lgd::preset_config(g.preset) : lgd::load_config(g.config_path);
  if (g.seed_given) c.seed = g.seed;
  c.threads = g.threads;
  if (g.fast) lgd::apply_fast(c);
  c.validate();
  return c;
}

std::string read_all(const std::string& path) {
  if (path == "-") {
    std::stringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path);
  if (!in) throw lgd::ConfigError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<lgd::Task> tasks_for(const lgd::ExperimentConfig& c, const std::string& tasks_path) {
  if (tasks_path.empty()) return lgd::generate_tasks(c);
  return lgd::load_tasks(tasks_path);
}

void write_config_echo(const lgd::ExperimentConfig& c, const fs::path& out) {
  fs::create_directories(out);
  std::ofstream(out / "config.json") << lgd::config_to_json_string(c);
}

std::vector<lgd::MetaFit> read_meta_params(const std::string& path) {
  json j;
  try {
    j = json::parse(read_all(path));
  } catch (const json::exception& e) {
    throw lgd::ParseError("meta params '" + path + "': " + e.what());
  }
  std::vector<lgd::MetaFit> fits;
  for (const json& entry : j) {
    lgd::MetaFit fit;
    fit.n_train = entry.at("n_train").get<lgd::Index>();
    if (entry.contains("theta")) {
      const auto theta = entry.at("theta").get<std::vector<double>>();
      fit.phi = lgd::HyperParams::from_natural(
          Eigen::Map<const lgd::Vector>(theta.data(), static_cast<lgd::Index>(theta.size())),
          entry.at("eta").get<double>());
    }
    fits.push_back(fit);
  }
  return fits;
}

void print_summary(const lgd::ExperimentResult& result) {
  for (const auto& row : result.rows) {
    std::fprintf(stderr, "%-16s n=%-4ld mse=%-12s stderr=%s\n", row.method.c_str(), row.n_train,
                 lgd::format_number(row.mean_mse, "%.5g").c_str(), lgd::format_number(row.stderr_mse, "%.3g").c_str());
  }
  for (const auto& f : result.failures) std::fprintf(stderr, "failed: %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Langevin gradient descent with meta-learned hyperparameters"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "experiment config JSON")->check(CLI::ExistingFile);
  app.add_option("--preset", g.preset, "isotropic, diagonal or softplus (used without --config)");
  app.add_option_function<std::uint64_t>(
      "--seed", [&g](const std::uint64_t& s) { g.seed = s, g.seed_given = true; }, "base seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--fast", g.fast, "evaluate on 50 held-out tasks instead of 200");
  app.fallthrough();

  auto* generate = app.add_subcommand("generate", "write tasks.json for the configured experiment");

  std::string run_tasks;
  auto* run = app.add_subcommand("run", "meta-train, evaluate every method, write results.csv and curves.svg");
  run->add_option("--tasks", run_tasks, "task file (generated from the config when omitted)");

  std::string meta_tasks;
  auto* meta = app.add_subcommand("meta-train", "meta-learn (theta, eta) for every n in the grid");
  meta->add_option("--tasks", meta_tasks, "task file");

  std::string eval_tasks, eval_method = "meta_lgd", eval_params;
  auto* evaluate = app.add_subcommand("evaluate", "learning curve of one method on the held-out tasks");
  evaluate->add_option("--tasks", eval_tasks, "task file");
  evaluate->add_option("--method", eval_method, "plain_gd, oracle_gd, oracle_lgd, oracle_lgd_long, meta_lgd, bayes_oracle");
  evaluate->add_option("--params", eval_params, "meta_params.json from meta-train (meta_lgd only)");

  std::string bounds_request = "-";
  auto* bounds = app.add_subcommand("bounds", "evaluate a theory bound from a JSON request");
  bounds->add_option("--request", bounds_request, "request JSON file, '-' for stdin");

  std::string plot_csv, plot_svg, plot_title;
  auto* plot = app.add_subcommand("plot", "render results.csv as an SVG learning-curve chart");
  plot->add_option("--csv", plot_csv, "results CSV")->required();
  plot->add_option("--svg", plot_svg, "output SVG (default <out>/curves.svg)");
  plot->add_option("--title", plot_title, "chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const fs::path out = g.out;
    if (*generate) {
      const auto config = resolve_config(g);
      write_config_echo(config, out);
      lgd::save_tasks(out / "tasks.json", lgd::generate_tasks(config));
      std::fprintf(stderr, "wrote %d tasks to %s\n", config.total_tasks, (out / "tasks.json").c_str());
    } else if (*run) {
      const auto config = resolve_config(g);
      const auto tasks = tasks_for(config, run_tasks);
      const auto result = lgd::run_experiment(config, tasks);
      write_config_echo(config, out);
      lgd::write_experiment_outputs(config, result, out);
      print_summary(result);
      if (!result.failures.empty()) return kExitRuntime;
    } else if (*meta) {
      const auto config = resolve_config(g);
      const auto tasks = tasks_for(config, meta_tasks);
      lgd::ExperimentResult result;
      result.meta = lgd::meta_train_grid(config, tasks);
      write_config_echo(config, out);
      lgd::write_experiment_outputs(config, result, out);
      for (const auto& fit : result.meta) {
        if (!fit.phi) {
          std::fprintf(stderr, "n=%ld: %s\n", static_cast<long>(fit.n_train), fit.error.c_str());
          return kExitRuntime;
        }
      }
    } else if (*evaluate) {
      auto config = resolve_config(g);
      config.methods = {eval_method};
      const auto tasks = tasks_for(config, eval_tasks);
      const auto prior = config.resolved_prior();
      const auto eval = lgd::eval_split(config, tasks);
      std::vector<lgd::MetaFit> fits;
      if (eval_method == "meta_lgd") {
        if (eval_params.empty()) throw lgd::ConfigError("evaluate: meta_lgd needs --params meta_params.json");
        fits = read_meta_params(eval_params);
      }
      lgd::ExperimentResult result;
      for (const lgd::Index n : config.n_train_grid) {
        std::optional<lgd::HyperParams> phi;
        if (eval_method == "meta_lgd") {
          for (const auto& fit : fits) {
            if (fit.n_train == n) phi = fit.phi;
          }
          if (!phi) throw lgd::ConfigError("evaluate: no learned hyperparameters for n=" + std::to_string(n));
        }
        const auto curve = lgd::evaluate_learning_curve(lgd::method_predictor(eval_method, config, prior, phi), eval,
                                                        {n}, config.threads, config.meta.cap_factor);
        const auto& p = curve.front();
        result.rows.push_back({eval_method, static_cast<long>(n), p.mean_mse, p.stderr_mse,
                               static_cast<long>(p.n_tasks), p.diverged});
      }
      lgd::write_experiment_outputs(config, result, out);
      print_summary(result);
    } else if (*bounds) {
      std::cout << lgd::evaluate_bounds_json(read_all(bounds_request));
    } else if (*plot) {
      const fs::path svg = plot_svg.empty() ? out / "curves.svg" : fs::path(plot_svg);
      if (svg.has_parent_path()) fs::create_directories(svg.parent_path());
      lgd::plot_curves(plot_csv, svg, plot_title);
    }
  } catch (const lgd::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
