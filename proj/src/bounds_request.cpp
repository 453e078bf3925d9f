#include "lgd/bounds_request.hpp"

#include "json.hpp"
#include "lgd/error.hpp"

namespace lgd {
namespace {

using json = nlohmann::json;

double num(const json& in, const char* key, double fallback) { return in.contains(key) ? in.at(key).get<double>() : fallback; }

double required(const json& in, const char* key) {
  if (!in.contains(key)) throw ConfigError(std::string("bounds: missing input '") + key + "'");
  return in.at(key).get<double>();
}

SmoothnessSpec smoothness(const json& in) {
  SmoothnessSpec s;
  s.m = required(in, "m");
  s.L = required(in, "L");
  s.lip_g = num(in, "lip_g", 1.0);
  s.dist0 = num(in, "dist0", 0.0);
  s.d = static_cast<long>(num(in, "d", 1.0));
  return s;
}

void echo(BoundResult& r, const json& in) {
  for (const auto& [key, value] : in.items()) {
    if (value.is_number()) r.inputs.emplace_back(key, value.get<double>());
  }
}

BoundResult dispatch(const std::string& formula, const json& in) {
  BoundResult r;
  r.formula_id = formula;
  if (formula == "wasserstein") {
    const SmoothnessSpec s = smoothness(in);
    WassersteinTerms w;
    if (in.contains("schedule")) {
      w = wasserstein_bound(s, in.at("schedule").get<std::vector<double>>());
    } else {
      w = wasserstein_bound(s, required(in, "eta"), static_cast<std::int64_t>(required(in, "k")));
    }
    r.value = w.bound;
    r.components = {{"u1", w.u1}, {"u2", w.u2}, {"kappa", s.kappa()}};
  } else if (formula == "ula_params") {
    const SmoothnessSpec s = smoothness(in);
    const UlaParams p = ula_params(s, required(in, "eps"), required(in, "delta"));
    r.value = p.eta;
    r.components = {{"eta", p.eta}, {"B", static_cast<double>(p.burn_in)}, {"b", static_cast<double>(p.averaging)},
                    {"c_eta", p.c_eta}, {"kappa", s.kappa()}};
  } else if (formula == "empmean") {
    const SmoothnessSpec s = smoothness(in);
    const EmpMeanBounds e = empmean_bounds(s, static_cast<std::int64_t>(required(in, "b")), required(in, "eta"),
                                           static_cast<std::int64_t>(num(in, "B", 0.0)), num(in, "r", 0.0));
    r.value = e.variance;
    r.components = {{"variance", e.variance}, {"tail", e.tail}, {"kappa", s.kappa()}};
  } else if (formula == "pdim") {
    GJComplexity gj;
    gj.delta_r = num(in, "delta_r", 1.0);
    gj.lambda_r = num(in, "lambda_r", 1.0);
    gj.delta_f = num(in, "delta_f", 1.0);
    gj.lambda_f = num(in, "lambda_f", 1.0);
    gj.delta_l = num(in, "delta_l", 1.0);
    gj.lambda_l = num(in, "lambda_l", 1.0);
    gj.burn_in = static_cast<std::int64_t>(required(in, "B"));
    gj.averaging = static_cast<std::int64_t>(required(in, "b"));
    gj.h = static_cast<long>(num(in, "h", 1.0));
    gj.n = static_cast<long>(required(in, "n"));
    gj.n_v = static_cast<long>(required(in, "n_v"));
    return pdim_bound(gj);
  } else if (formula == "task_count") {
    return task_count_bound(required(in, "C"), required(in, "eps"), required(in, "delta"), required(in, "pdim"),
                            num(in, "constant", 1.0));
  } else if (formula == "hoeffding") {
    r.value = hoeffding_deviation(required(in, "C"), required(in, "delta"), required(in, "N"));
  } else if (formula == "bernstein") {
    r.value = bernstein_tail(required(in, "N"), required(in, "t"), required(in, "V"), required(in, "C"));
  } else if (formula == "erm_bayes_budget") {
    ErmBayesInputs e;
    e.C = num(in, "C", e.C);
    e.eps1 = required(in, "eps1");
    e.eps2 = required(in, "eps2");
    e.delta = required(in, "delta");
    e.d = static_cast<long>(required(in, "d"));
    e.h = static_cast<long>(required(in, "h"));
    e.n = static_cast<long>(required(in, "n"));
    e.n_v = static_cast<long>(required(in, "n_v"));
    e.lip_f = num(in, "lip_f", e.lip_f);
    e.dist0 = num(in, "dist0", e.dist0);
    e.c_burn = num(in, "c_burn", 1.0);
    e.c_avg = num(in, "c_avg", 1.0);
    e.c_tasks = num(in, "c_tasks", 1.0);
    return erm_bayes_budget(e);
  } else {
    throw ConfigError("bounds: unknown formula '" + formula + "'");
  }
  echo(r, in);
  return r;
}

json to_json(const BoundResult& r) {
  json inputs = json::object(), components = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  for (const auto& [k, v] : r.components) components[k] = v;
  return {{"formula_id", r.formula_id}, {"value", r.value}, {"inputs", inputs}, {"components", components}};
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("bounds ") + what + ": " + e.what());
  }
}

}  // namespace

BoundResult evaluate_bound(const std::string& formula, const std::string& inputs_json) {
  const json in = parse(inputs_json, "inputs");
  try {
    return dispatch(formula, in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bounds inputs: ") + e.what());
  }
}

std::string evaluate_bounds_json(const std::string& request) {
  const json req = parse(request, "request");
  if (!req.is_object() || !req.contains("formula") || !req.at("formula").is_string()) {
    throw ParseError("bounds request: expected {\"formula\": <name>, \"inputs\": {...}}");
  }
  const json inputs = req.value("inputs", json::object());
  try {
    return to_json(dispatch(req.at("formula").get<std::string>(), inputs)).dump(2) + "\n";
  } catch (const json::exception& e) {
    throw ParseError(std::string("bounds inputs: ") + e.what());
  }
}

}  // namespace lgd
