#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lgd/error.hpp"
#include "lgd/harness.hpp"
#include "lgd/svg_plot.hpp"

using namespace lgd;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig tiny_config() {
  ExperimentConfig c = config_from_json_string(R"({
    "preset": "isotropic", "name": "tiny",
    "prior": {"kind": "isotropic", "params": {"variance": 0.1}, "d": 3},
    "tasks": {"total": 12, "train": 4, "eval": 8},
    "n_total": 40, "n_v": 20, "n_train_grid": [1, 5, 20],
    "lgd": {"burn_in": 20, "averaging": 100},
    "gd": {"iterations": 200},
    "meta": {"steps": 3},
    "seed": 5
  })");
  return c;
}

}  // namespace

TEST_CASE("presets") {
  const ExperimentConfig iso = preset_config("isotropic");
  CHECK(iso.total_tasks == 250);
  CHECK(iso.train_tasks == 50);
  CHECK(iso.eval_tasks == 200);
  CHECK(iso.n_total == 500);
  CHECK(iso.n_v == 400);
  CHECK(iso.lgd.burn_in == 500);
  CHECK(iso.lgd.averaging == 5000);
  CHECK(iso.lgd.step_size == 9e-4);
  CHECK(iso.gd.iterations == 5500);
  CHECK(iso.meta.adam_lr == 0.4);
  CHECK(iso.meta.steps == 50);
  CHECK(iso.meta.eta_max == 1.2e-3);

  const ExperimentConfig sp = preset_config("softplus");
  CHECK(sp.lgd.burn_in == 5000);
  CHECK(sp.lgd.averaging == 50000);
  CHECK(sp.lgd.step_size == 1e-4);
  CHECK(sp.gd.iterations == 55000);
  CHECK(sp.meta.eta_max == 1e-4);
  CHECK(sp.meta.burn_in == 5000);
  CHECK(sp.meta.averaging == 50000);

  const ExperimentConfig diag = preset_config("diagonal");
  const PriorSpec p = diag.resolved_prior();
  const auto& v = std::get<DiagonalGaussian>(p.family).variances;
  CHECK(v.size() == 10);
  CHECK(v.minCoeff() >= 0.05);
  CHECK(v.maxCoeff() <= 0.5);
  CHECK(diag.resolved_prior().dim == 10);
  CHECK(std::get<DiagonalGaussian>(diag.resolved_prior().family).variances == v);

  CHECK_THROWS_AS(preset_config("laplace"), ConfigError);
}

TEST_CASE("config validation and round trip") {
  ExperimentConfig c = tiny_config();
  CHECK(c.prior.dim == 3);
  CHECK(c.max_train() == 20);
  const ExperimentConfig back = config_from_json_string(config_to_json_string(c));
  CHECK(config_to_json_string(back) == config_to_json_string(c));

  ExperimentConfig bad = c;
  bad.n_train_grid = {21};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.total_tasks = 11;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.methods = {"nope"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(config_from_json_string("{"), std::exception);
  CHECK_THROWS_AS(config_from_json_string(R"({"prior": {"kind": "cauchy"}})"), ConfigError);

  apply_fast(c);
  CHECK(c.eval_tasks == 8);
  ExperimentConfig full = preset_config("isotropic");
  apply_fast(full);
  CHECK(full.eval_tasks == 50);
}

TEST_CASE("generate_tasks") {
  SUBCASE("zero hook") {
    ExperimentConfig c = tiny_config();
    c.noise_std = 0.0;
    c.zero_ground_truth = true;
    for (const Task& t : generate_tasks(c)) {
      CHECK(t.y.isZero(0.0));
      CHECK(t.yv.isZero(0.0));
    }
  }
  SUBCASE("shapes, determinism and prefix stability") {
    const ExperimentConfig c = tiny_config();
    const auto a = generate_tasks(c);
    const auto b = generate_tasks(c);
    REQUIRE(a.size() == 12);
    CHECK(a[0].n() == 20);
    CHECK(a[0].n_v() == 20);
    CHECK(a[0].d_x() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].X == b[i].X);
      CHECK(a[i].yv == b[i].yv);
    }
    ExperimentConfig more = c;
    more.total_tasks = 20;
    more.eval_tasks = 16;
    const auto longer = generate_tasks(more);
    CHECK(longer[7].X == a[7].X);
    CHECK(longer[7].y == a[7].y);
    ExperimentConfig other = c;
    other.seed = 6;
    CHECK(generate_tasks(other)[0].X != a[0].X);
  }
  SUBCASE("prior variance of the isotropic preset") {
    const auto tasks = generate_tasks(preset_config("isotropic"));
    REQUIRE(tasks.size() == 250);
    for (Index i = 0; i < 10; ++i) {
      double s = 0, ss = 0;
      for (const Task& t : tasks) {
        s += (*t.ground_truth)[i];
        ss += (*t.ground_truth)[i] * (*t.ground_truth)[i];
      }
      const double var = ss / 250 - (s / 250) * (s / 250);
      CHECK(std::abs(var / 0.1 - 1.0) <= 0.25);
    }
    double s = 0, ss = 0;
    for (const Task& t : tasks) {
      s += t.ground_truth->sum();
      ss += t.ground_truth->squaredNorm();
    }
    const double var = ss / 2500 - (s / 2500) * (s / 2500);
    CHECK(std::abs(var / 0.1 - 1.0) <= 0.1);
  }
  SUBCASE("input scale is the input variance") {
    ExperimentConfig c = tiny_config();
    c.input_scale = 10.0;
    double ss = 0;
    long count = 0;
    for (const Task& t : generate_tasks(c)) {
      ss += t.X.squaredNorm() + t.Xv.squaredNorm();
      count += t.X.size() + t.Xv.size();
    }
    CHECK(ss / count == doctest::Approx(10.0).epsilon(0.1));
  }
}

TEST_CASE("splits") {
  const ExperimentConfig c = tiny_config();
  const auto tasks = generate_tasks(c);
  const auto train = train_split(c, tasks);
  const auto eval = eval_split(c, tasks);
  REQUIRE(train.size() == 4);
  REQUIRE(eval.size() == 8);
  CHECK(train[0].X == tasks[0].X);
  CHECK(eval[0].X == tasks[4].X);
  CHECK(eval[7].X == tasks[11].X);
}

TEST_CASE("run_experiment end to end") {
  ExperimentConfig c = tiny_config();
  c.methods = kAllMethods;
  const auto tasks = generate_tasks(c);
  const ExperimentResult one = run_experiment(c, tasks);
  CHECK(one.failures.empty());
  CHECK(one.rows.size() == kAllMethods.size() * 3);
  CHECK(one.task_mse.size() == one.rows.size());
  CHECK(one.meta.size() == 3);
  for (const CurveRow& r : one.rows) CHECK(std::isfinite(r.mean_mse));

  c.threads = 4;
  const ExperimentResult four = run_experiment(c, tasks);
  CHECK(format_results_csv(one.rows) == format_results_csv(four.rows));

  const auto dir = std::filesystem::temp_directory_path() / "lgd_harness_out";
  std::filesystem::remove_all(dir);
  write_experiment_outputs(c, one, dir);
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "curves.svg"));
  CHECK(std::filesystem::exists(dir / "meta_params.json"));
  CHECK(std::filesystem::exists(dir / "meta_trace_n5.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "failures.txt"));
  CHECK(parse_results_csv(slurp(dir / "results.csv")).size() == one.rows.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("diverging methods enter at the loss cap") {
  ExperimentConfig c = tiny_config();
  c.methods = {"oracle_gd", "plain_gd"};
  c.gd.step_size = 1e3;
  const ExperimentResult r = run_experiment(c, generate_tasks(c));
  CHECK(r.failures.empty());
  REQUIRE(r.rows.size() == 6);
  for (const auto& row : r.rows) {
    CHECK(row.diverged == row.n_tasks);
    CHECK(std::isfinite(row.mean_mse));
  }
}

TEST_CASE("failed cells are recorded and the run continues") {
  ExperimentConfig c = tiny_config();
  c.methods = {"plain_gd", "meta_lgd"};
  c.meta.eta_min = 1e3;
  c.meta.eta_max = 2e3;
  const ExperimentResult r = run_experiment(c, generate_tasks(c));
  CHECK(r.failures.size() == 3);
  REQUIRE(r.rows.size() == 6);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CAPTURE(i);
    const bool meta = r.rows[i].method == "meta_lgd";
    CHECK(std::isnan(r.rows[i].mean_mse) == meta);
    CHECK(r.task_mse[i].empty() == meta);
  }
}

TEST_CASE("results csv") {
  const std::vector<CurveRow> rows = {{"plain_gd", 1, 2.5, 0.25, 50, 0}, {"meta_lgd", 10, 1.0 / 3.0, 0.01, 50, 2}};
  const std::string text = format_results_csv(rows);
  CHECK(text.rfind(std::string(kResultsHeader) + "\n", 0) == 0);
  const auto back = parse_results_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[1].method == "meta_lgd");
  CHECK(back[1].n_train == 10);
  CHECK(back[1].mean_mse == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(back[1].diverged == 2);

  CHECK_THROWS_AS(parse_results_csv(std::string(kResultsHeader) + "\n"), ParseError);
  CHECK_THROWS_AS(parse_results_csv(""), ParseError);
  try {
    parse_results_csv(std::string(kResultsHeader) + "\nplain_gd,1,2.5,0.1,50,0\nplain_gd,x,2.5,0.1,50,0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("svg rendering") {
  const std::string one = render_curves_svg({{"meta_lgd", 5, 1.5, 0.1, 50, 0}});
  CHECK(one.rfind("<svg", 0) == 0);
  CHECK(one.find("</svg>") != std::string::npos);
  CHECK(one.find("meta_lgd") != std::string::npos);
  CHECK_THROWS_AS(render_curves_svg({}), ConfigError);

  const auto rows = parse_results_csv(slurp(LGD_TEST_DATA_DIR "/golden_results.csv"));
  const std::string svg = render_curves_svg(rows, "golden");
  CHECK(svg == render_curves_svg(rows, "golden"));
  CHECK(svg == slurp(LGD_TEST_DATA_DIR "/golden_curves.svg"));
}
