#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lgd/baselines.hpp"
#include "lgd/bounds_request.hpp"
#include "lgd/error.hpp"
#include "lgd/harness.hpp"
#include "lgd/langevin.hpp"

namespace py = pybind11;

namespace {

lgd::Regularizer make_regularizer(const std::string& kind, const lgd::Vector& theta, double beta) {
  lgd::Regularizer reg;
  reg.kind = lgd::reg_kind_from_string(kind);
  reg.theta = theta;
  reg.beta = beta;
  return reg;
}

lgd::Task make_task(const lgd::Matrix& X, const lgd::Vector& y, const lgd::Matrix& Xv) {
  lgd::Task task{X, y, Xv, lgd::Vector::Zero(Xv.rows()), std::nullopt};
  task.validate();
  return task;
}

py::dict row_dict(const lgd::CurveRow& r) {
  py::dict d;
  d["method"] = r.method;
  d["n_train"] = r.n_train;
  d["mean_mse"] = r.mean_mse;
  d["stderr"] = r.stderr_mse;
  d["n_tasks"] = r.n_tasks;
  d["diverged"] = r.diverged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lgd, m) {
  m.doc() = "Langevin gradient descent with meta-learned hyperparameters";

  py::register_exception<lgd::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<lgd::DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<lgd::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<lgd::CurveRow>(m, "CurveRow")
      .def(py::init<>())
      .def_readwrite("method", &lgd::CurveRow::method)
      .def_readwrite("n_train", &lgd::CurveRow::n_train)
      .def_readwrite("mean_mse", &lgd::CurveRow::mean_mse)
      .def_readwrite("stderr", &lgd::CurveRow::stderr_mse)
      .def_readwrite("n_tasks", &lgd::CurveRow::n_tasks)
      .def_readwrite("diverged", &lgd::CurveRow::diverged);

  m.def(
      "lgd_predict",
      [](const lgd::Matrix& X, const lgd::Vector& y, const lgd::Matrix& Xv, const std::string& kind,
         const lgd::Vector& theta, double beta, double step_size, std::int64_t burn_in, std::int64_t averaging,
         std::uint64_t seed) {
        lgd::LgdConfig c;
        c.step_size = step_size;
        c.burn_in = burn_in;
        c.averaging = averaging;
        c.seed = seed;
        const lgd::Task task = make_task(X, y, Xv);
        py::gil_scoped_release release;
        return lgd::lgd_predict(task, lgd::LinearModel{}, lgd::SquaredLoss{lgd::LossScale::kHalf},
                                make_regularizer(kind, theta, beta), c)
            .predictions;
      },
      py::arg("X"), py::arg("y"), py::arg("Xv"), py::arg("kind") = "isotropic",
      py::arg("theta") = lgd::Vector::Ones(1), py::arg("beta") = 0.0, py::arg("step_size") = 9e-4,
      py::arg("burn_in") = 500, py::arg("averaging") = 5000, py::arg("seed") = 0,
      "Mean of Xv w over the averaging window of a ULA chain on the linear-Gaussian potential.");

  m.def(
      "gd_predict",
      [](const lgd::Matrix& X, const lgd::Vector& y, const lgd::Matrix& Xv, const std::string& kind,
         const lgd::Vector& theta, double beta, double step_size, std::int64_t iterations) {
        const lgd::Task task = make_task(X, y, Xv);
        const lgd::Vector w = lgd::gd_minimize(task, lgd::LinearModel{}, lgd::SquaredLoss{lgd::LossScale::kHalf},
                                               make_regularizer(kind, theta, beta), {iterations, step_size});
        return lgd::Vector(Xv * w);
      },
      py::arg("X"), py::arg("y"), py::arg("Xv"), py::arg("kind") = "none", py::arg("theta") = lgd::Vector(),
      py::arg("beta") = 0.0, py::arg("step_size") = 9e-4, py::arg("iterations") = 5500);

  m.def("ridge", py::overload_cast<const lgd::Matrix&, const lgd::Vector&, const lgd::Vector&>(
                     &lgd::ridge_posterior_mean),
        py::arg("X"), py::arg("y"), py::arg("precision"));

  m.def(
      "generate_tasks",
      [](const std::string& config_json) {
        const lgd::ExperimentConfig c = lgd::config_from_json_string(config_json);
        py::list out;
        for (const lgd::Task& t : lgd::generate_tasks(c)) {
          py::dict d;
          d["X"] = t.X;
          d["y"] = t.y;
          d["Xv"] = t.Xv;
          d["yv"] = t.yv;
          if (t.ground_truth) d["w_star"] = *t.ground_truth;
          out.append(d);
        }
        return out;
      },
      py::arg("config_json") = "{}");

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const lgd::ExperimentConfig c = lgd::config_from_json_string(config_json);
        lgd::ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = lgd::run_experiment(c, lgd::generate_tasks(c));
        }
        py::list rows;
        for (const auto& row : r.rows) rows.append(row_dict(row));
        return py::make_tuple(rows, r.failures);
      },
      py::arg("config_json"), "Returns (rows, failures) for the experiment described by a JSON config.");

  m.def("preset_config", [](const std::string& name) { return lgd::config_to_json_string(lgd::preset_config(name)); });
  m.def("bounds", &lgd::evaluate_bounds_json, py::arg("request_json"));
  m.def("render_svg", &lgd::render_curves_svg, py::arg("rows"), py::arg("title") = "");
  m.def("format_results_csv", &lgd::format_results_csv);
  m.def("parse_results_csv", &lgd::parse_results_csv);
}
