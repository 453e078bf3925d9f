#include "lgd/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "lgd/error.hpp"

namespace lgd {
namespace {

void require_positive(const char* name, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError(std::string(name) + " must be finite and > 0");
}

void require_unit_open(const char* name, double value) {
  if (!(value > 0.0 && value < 1.0)) throw ConfigError(std::string(name) + " must lie in (0, 1)");
}

// Per-step factor of the u2 sum, without the L^2 d prefactor.
double u2_term(const SmoothnessSpec& s, double eta) {
  const double l2 = s.L * s.L;
  return eta * eta * (1.0 / s.kappa() + eta) * (2.0 + l2 * eta / s.m + l2 * eta * eta / 6.0);
}

double floored_log(double x) { return std::max(1.0, std::log(x)); }

}  // namespace

void SmoothnessSpec::validate() const {
  require_positive("m", m);
  require_positive("L", L);
  if (m > L) throw ConfigError("need m <= L");
  if (!(lip_g >= 0.0)) throw ConfigError("lip_g must be >= 0");
  if (!(dist0 >= 0.0)) throw ConfigError("dist0 must be >= 0");
  if (d < 1) throw ConfigError("d must be >= 1");
}

double BoundResult::get(const std::string& name) const {
  for (const auto& [key, value] : components) {
    if (key == name) return value;
  }
  for (const auto& [key, value] : inputs) {
    if (key == name) return value;
  }
  throw std::out_of_range("bound result has no entry '" + name + "'");
}

WassersteinTerms wasserstein_bound(const SmoothnessSpec& spec, const std::vector<double>& schedule) {
  spec.validate();
  const double eta_cap = 1.0 / (spec.m + spec.L);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0)) throw ConfigError("wasserstein_bound: step sizes must be > 0");
    if (i > 0 && schedule[i] > schedule[i - 1]) throw ConfigError("wasserstein_bound: schedule must be non-increasing");
  }
  if (!schedule.empty() && schedule.front() > eta_cap * (1.0 + 1e-12)) {
    throw ConfigError("wasserstein_bound: eta_1 exceeds 1/(m+L)");
  }
  const double kappa = spec.kappa();
  // Backward pass: tail holds prod_{j>i} (1 - kappa eta_j / 2); log space keeps long products finite.
  double log_tail = 0.0;
  double sum = 0.0;
  for (std::size_t i = schedule.size(); i-- > 0;) {
    sum += u2_term(spec, schedule[i]) * std::exp(log_tail);
    log_tail += std::log1p(-kappa * schedule[i] / 2.0);
  }
  WassersteinTerms out;
  out.u1 = 2.0 * std::exp(log_tail);
  out.u2 = spec.L * spec.L * static_cast<double>(spec.d) * sum;
  out.bound = out.u1 * (spec.dist0 * spec.dist0 + static_cast<double>(spec.d) / spec.m) + out.u2;
  return out;
}

WassersteinTerms wasserstein_bound(const SmoothnessSpec& spec, double eta, std::int64_t k) {
  spec.validate();
  require_positive("eta", eta);
  if (k < 0) throw ConfigError("wasserstein_bound: k must be >= 0");
  if (eta > (1.0 + 1e-12) / (spec.m + spec.L)) throw ConfigError("wasserstein_bound: eta exceeds 1/(m+L)");
  const double rate = spec.kappa() * eta / 2.0;
  const double power = std::exp(static_cast<double>(k) * std::log1p(-rate));
  WassersteinTerms out;
  out.u1 = 2.0 * power;
  out.u2 = spec.L * spec.L * static_cast<double>(spec.d) * u2_term(spec, eta) * (-std::expm1(static_cast<double>(k) * std::log1p(-rate))) / rate;
  out.bound = out.u1 * (spec.dist0 * spec.dist0 + static_cast<double>(spec.d) / spec.m) + out.u2;
  return out;
}

UlaParams ula_params(const SmoothnessSpec& spec, double eps, double delta) {
  spec.validate();
  require_unit_open("eps", eps);
  require_unit_open("delta", delta);
  require_positive("lip_g", spec.lip_g);
  const double kappa = spec.kappa();
  const double eta_cap = 1.0 / (spec.m + spec.L);
  const double d = static_cast<double>(spec.d);

  // For eta <= 1/(m+L) the homogeneous u2 is at most K d eta with
  // K = (2 L^2 / kappa)(1/kappa + eta_cap)(2 + L^2 eta_cap / m + L^2 eta_cap^2 / 6).
  const double l2 = spec.L * spec.L;
  const double K = 2.0 * l2 / kappa * (1.0 / kappa + eta_cap) *
                   (2.0 + l2 * eta_cap / spec.m + l2 * eta_cap * eta_cap / 6.0);
  UlaParams out;
  out.c_eta = spec.lip_g * spec.lip_g / (2.0 * K);
  out.eta = out.c_eta * eps * eps / (spec.lip_g * spec.lip_g * d);
  if (out.eta > eta_cap) {
    throw ConfigError("ula_params: eps=" + std::to_string(eps) + " requires eta=" + std::to_string(out.eta) +
                      " above 1/(m+L)=" + std::to_string(eta_cap));
  }
  // Smallest k with 2 (1 - kappa eta / 2)^k (dist0^2 + d/m) <= eps^2 / 2.
  const double start = spec.dist0 * spec.dist0 + d / spec.m;
  const double need = std::log(eps * eps / (4.0 * start));
  const double per_step = std::log1p(-kappa * out.eta / 2.0);
  out.burn_in = need >= 0.0 ? 0 : static_cast<std::int64_t>(std::ceil(need / per_step));
  while (out.burn_in > 0 && 2.0 * std::exp(static_cast<double>(out.burn_in - 1) * per_step) * start <= eps * eps / 2.0) {
    --out.burn_in;
  }
  while (2.0 * std::exp(static_cast<double>(out.burn_in) * per_step) * start > eps * eps / 2.0) ++out.burn_in;

  out.averaging_real = 128.0 * spec.lip_g * spec.lip_g * std::log(1.0 / delta) / (eps * eps * kappa * kappa * out.eta);
  out.averaging = static_cast<std::int64_t>(std::ceil(out.averaging_real));
  return out;
}

EmpMeanBounds empmean_bounds(const SmoothnessSpec& spec, std::int64_t b, double eta, std::int64_t burn_in,
                             double r) {
  spec.validate();
  if (b < 1) throw ConfigError("empmean_bounds: b must be >= 1");
  if (burn_in < 0) throw ConfigError("empmean_bounds: B must be >= 0");
  require_positive("eta", eta);
  if (eta > (1.0 + 1e-12) / (spec.m + spec.L)) throw ConfigError("empmean_bounds: eta exceeds 1/(m+L)");
  if (!(r >= 0.0)) throw ConfigError("empmean_bounds: r must be >= 0");
  const double kappa = spec.kappa();
  const double beta = static_cast<double>(b) * eta;
  const double inflation = 1.0 + (1.0 / kappa + 2.0 / (spec.m + spec.L)) / beta;
  const double lip2 = spec.lip_g * spec.lip_g;
  EmpMeanBounds out;
  out.variance = 8.0 * lip2 * inflation / (kappa * kappa * beta);
  out.tail = lip2 > 0.0 ? std::exp(-r * r * kappa * kappa * beta / (16.0 * lip2 * inflation)) : (r > 0.0 ? 0.0 : 1.0);
  return out;
}

void GJComplexity::validate() const {
  for (double degree : {delta_r, delta_f, delta_l}) {
    if (!(degree >= 1.0)) throw ConfigError("pdim: degrees must be >= 1");
  }
  for (double lambda : {lambda_r, lambda_f, lambda_l}) {
    if (!(lambda >= 0.0)) throw ConfigError("pdim: predicate complexities must be >= 0");
  }
  if (burn_in < 0 || averaging < 0 || burn_in + averaging < 1) throw ConfigError("pdim: need B + b >= 1");
  if (h < 1 || n < 1 || n_v < 1) throw ConfigError("pdim: h, n and n_v must be >= 1");
}

BoundResult pdim_bound(const GJComplexity& gj) {
  gj.validate();
  const double steps = static_cast<double>(gj.burn_in + gj.averaging);
  const double n = static_cast<double>(gj.n);
  const double n_v = static_cast<double>(gj.n_v);
  const double log_base_degree = std::log2(gj.delta_f * gj.delta_l);
  const double log_step_degree = std::log2(2.0 * gj.delta_f * (gj.delta_l + 1.0) + gj.delta_r + 2.0);
  const double lambda = steps * (n * (2.0 * gj.lambda_f + gj.lambda_l) + gj.lambda_r) + n_v * gj.lambda_f +
                        n_v * gj.lambda_l + 1.0;
  const double log_degree = log_base_degree + steps * log_step_degree;
  const double log_lambda = std::log2(lambda);
  BoundResult out;
  out.formula_id = "pdim_gj";
  out.value = static_cast<double>(gj.h) * (log_degree + log_lambda);
  out.inputs = {{"delta_r", gj.delta_r}, {"lambda_r", gj.lambda_r}, {"delta_f", gj.delta_f},
                {"lambda_f", gj.lambda_f}, {"delta_l", gj.delta_l}, {"lambda_l", gj.lambda_l},
                {"B", static_cast<double>(gj.burn_in)}, {"b", static_cast<double>(gj.averaging)},
                {"h", static_cast<double>(gj.h)}, {"n", n}, {"n_v", n_v}};
  out.components = {{"log2_degree", log_degree}, {"predicate_count", lambda}, {"log2_predicates", log_lambda}};
  return out;
}

BoundResult task_count_bound(double C, double eps, double delta, double pdim, double constant) {
  require_positive("C", C);
  require_positive("eps", eps);
  require_unit_open("delta", delta);
  require_positive("constant", constant);
  if (!(pdim >= 0.0)) throw ConfigError("pdim must be >= 0");
  BoundResult out;
  out.formula_id = "task_count";
  const double scale = constant * C * C / (eps * eps);
  out.value = scale * (pdim + std::log(1.0 / delta));
  out.inputs = {{"C", C}, {"eps", eps}, {"delta", delta}, {"pdim", pdim}, {"constant", constant}};
  out.components = {{"capacity_term", scale * pdim}, {"confidence_term", scale * std::log(1.0 / delta)}};
  return out;
}

double hoeffding_deviation(double C, double delta, double N) {
  require_positive("C", C);
  require_unit_open("delta", delta);
  require_positive("N", N);
  return C * std::sqrt(std::log(1.0 / delta) / (2.0 * N));
}

double bernstein_tail(double N, double t, double V, double C) {
  require_positive("N", N);
  require_positive("C", C);
  if (!(t >= 0.0) || !(V >= 0.0)) throw ConfigError("bernstein: t and V must be >= 0");
  if (t == 0.0) return 1.0;
  return std::exp(-3.0 * N * t * t / (2.0 * (3.0 * V + C * t)));
}

BoundResult erm_bayes_budget(const ErmBayesInputs& in) {
  require_positive("C", in.C);
  require_positive("eps1", in.eps1);
  require_positive("eps2", in.eps2);
  require_unit_open("delta", in.delta);
  require_positive("lip_f", in.lip_f);
  if (in.d < 1 || in.h < 1 || in.n < 1 || in.n_v < 1) throw ConfigError("erm_bayes_budget: counts must be >= 1");
  if (!(in.dist0 >= 0.0)) throw ConfigError("erm_bayes_budget: dist0 must be >= 0");
  const double alpha = in.lip_f / in.eps2;
  const double a2 = alpha * alpha;
  const double a4 = a2 * a2;
  const double d = static_cast<double>(in.d);
  const double burn = in.c_burn * d * a2 * floored_log((d + in.dist0 * in.dist0) * a2);
  const double avg = in.c_avg * d * a4 * floored_log(2.0 * static_cast<double>(in.n_v) / in.delta);
  const double tasks = in.c_tasks * in.C * in.C / (in.eps1 * in.eps1) * d * static_cast<double>(in.h) *
                       floored_log(d * static_cast<double>(in.n + in.n_v)) *
                       (a2 * floored_log(alpha) + a4 * floored_log(2.0 / in.delta));
  BoundResult out;
  out.formula_id = "erm_bayes_budget";
  out.value = tasks;
  out.inputs = {{"C", in.C},         {"eps1", in.eps1},
                {"eps2", in.eps2},   {"delta", in.delta},
                {"d", d},            {"h", static_cast<double>(in.h)},
                {"n", static_cast<double>(in.n)}, {"n_v", static_cast<double>(in.n_v)},
                {"lip_f", in.lip_f}, {"dist0", in.dist0}};
  out.components = {{"alpha", alpha}, {"B", burn}, {"b", avg}, {"T", tasks}};
  return out;
}

}  // namespace lgd
