#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lgd {

/// Constants of a potential U that is m-strongly convex with L-Lipschitz gradient.
struct SmoothnessSpec {
  double m = 1.0;
  double L = 1.0;
  /// Lipschitz constant of the averaged statistic g.
  double lip_g = 1.0;
  /// ||z_(0) - z*||.
  double dist0 = 0.0;
  long d = 1;

  double kappa() const { return 2.0 * L * m / (L + m); }
  void validate() const;
};

/// A named scalar with the inputs and intermediate terms that produced it.
struct BoundResult {
  std::string formula_id;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, double>> components;

  /// Looks up a component or input by name; throws std::out_of_range if absent.
  double get(const std::string& name) const;
};

struct WassersteinTerms {
  double u1 = 0.0;
  double u2 = 0.0;
  /// u1 (dist0^2 + d/m) + u2.
  double bound = 0.0;
};

/// W2^2 bound after k = schedule.size() ULA steps with step sizes eta_1..eta_k.
/// Requires a non-increasing schedule with eta_1 <= 1/(m+L).
WassersteinTerms wasserstein_bound(const SmoothnessSpec& spec, const std::vector<double>& schedule);
/// Homogeneous schedule, evaluated through the geometric-series closed form.
WassersteinTerms wasserstein_bound(const SmoothnessSpec& spec, double eta, std::int64_t k);

struct UlaParams {
  double eta = 0.0;
  std::int64_t burn_in = 0;
  std::int64_t averaging = 0;
  /// eta = c_eta eps^2 / (lip_g^2 d).
  double c_eta = 0.0;
  /// Unrounded b before the ceiling.
  double averaging_real = 0.0;
};

/// (eta, B, b) for which the W2 bound is at most eps^2 and the averaging window
/// satisfies b eta >= 128 lip_g^2 log(1/delta) / (eps^2 kappa^2). Throws
/// ConfigError when the required eta exceeds 1/(m+L).
UlaParams ula_params(const SmoothnessSpec& spec, double eps, double delta);

struct EmpMeanBounds {
  double variance = 0.0;
  /// Pr(deviation >= r).
  double tail = 0.0;
};

EmpMeanBounds empmean_bounds(const SmoothnessSpec& spec, std::int64_t b, double eta, std::int64_t burn_in,
                             double r);

/// Degrees and predicate complexities of the pieces of the LGD computation.
struct GJComplexity {
  double delta_r = 1.0;
  double lambda_r = 1.0;
  double delta_f = 1.0;
  double lambda_f = 1.0;
  double delta_l = 1.0;
  double lambda_l = 1.0;
  std::int64_t burn_in = 0;
  std::int64_t averaging = 1;
  /// Number of real parameters of the class (h, or h+1 to count sqrt(eta)).
  long h = 1;
  long n = 1;
  long n_v = 1;

  void validate() const;
};

/// h [log2(Df Dl) + (B+b) log2(2 Df (Dl+1) + Dr + 2) + log2(Lambda)] with
/// Lambda = (B+b)(n(2 Lf + Ll) + Lr) + n_v Lf + n_v Ll + 1.
BoundResult pdim_bound(const GJComplexity& gj);

/// c (C^2/eps^2)(pdim + log(1/delta)).
BoundResult task_count_bound(double C, double eps, double delta, double pdim, double constant = 1.0);
/// C sqrt(ln(1/delta) / (2N)).
double hoeffding_deviation(double C, double delta, double N);
/// exp(-3 N t^2 / (2 (3 V + C t))).
double bernstein_tail(double N, double t, double V, double C);

struct ErmBayesInputs {
  double C = 1.0;
  double eps1 = 0.5;
  double eps2 = 0.5;
  double delta = 0.1;
  long d = 10;
  long h = 1;
  long n = 100;
  long n_v = 400;
  double lip_f = 1.0;
  double dist0 = 0.0;
  /// Leading constants for B, b and T.
  double c_burn = 1.0;
  double c_avg = 1.0;
  double c_tasks = 1.0;
};

/// B, b, T with alpha = lip_f / eps2; every logarithm is floored at 1.
BoundResult erm_bayes_budget(const ErmBayesInputs& in);

}  // namespace lgd
