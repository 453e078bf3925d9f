#pragma once

#include <string>
#include <variant>
#include <vector>

#include "lgd/rng.hpp"
#include "lgd/types.hpp"

namespace lgd {

// Prior families for the ground-truth parameter w*. All three are
// log-strongly-concave and factorize over coordinates.

struct IsotropicGaussian {
  double variance = 0.1;
};

struct DiagonalGaussian {
  Vector variances;
};

/// pi(u) ∝ exp(-gamma u^2 / 2 - alpha log(1 + exp(beta u))), per coordinate.
struct SoftplusGaussian {
  double alpha = 1.0;
  double beta = 10.0;
  double gamma = 0.1;
};

using PriorFamily = std::variant<IsotropicGaussian, DiagonalGaussian, SoftplusGaussian>;

struct PriorSpec {
  PriorFamily family;
  Index dim = 10;

  void validate() const;
  std::string kind_name() const;
};

enum class RegKind { kNone, kIsotropic, kDiagonal, kSoftplus };

/// Gradient of a negative log prior, r(w; theta), applied coordinatewise.
///   isotropic: theta[0] * w
///   diagonal:  theta[i] * w[i]
///   softplus:  theta[0] * w + beta * theta[1] * sigmoid(beta * w)
/// `beta` is a fixed constant of the softplus family and is never learned.
struct Regularizer {
  RegKind kind = RegKind::kNone;
  Vector theta;
  double beta = 0.0;

  static Regularizer none() { return {}; }
  static Regularizer isotropic(double theta);
  static Regularizer diagonal(Vector theta);
  static Regularizer softplus(double theta0, double theta1, double beta);

  /// Number of hyperparameters h for a d-dimensional parameter.
  Index hyper_dim(Index d) const;
  /// Throws ConfigError if theta's length does not match the family at dimension d.
  void validate(Index d) const;
  Regularizer with_theta(Vector new_theta) const;
};

std::string to_string(RegKind kind);
RegKind reg_kind_from_string(const std::string& name);

Vector reg_grad(const Regularizer& reg, const Vector& w);
/// Adds r(w; theta) into `out` (hot-loop variant, no allocation).
void add_reg_grad(const Regularizer& reg, const Vector& w, Vector& out);
double neg_log_prior(const Regularizer& reg, const Vector& w);

/// Partial derivatives of r(w; theta). All families are coordinatewise, so the
/// w-Jacobian is diagonal.
struct RegJacobians {
  Vector dw_diag;  // d
  Matrix dtheta;   // d x h
};
RegJacobians reg_grad_jacobians(const Regularizer& reg, const Vector& w);
/// Allocation-free variant; `dtheta` must already be d x h.
void reg_grad_jacobians_into(const Regularizer& reg, const Vector& w, Vector& dw_diag, Matrix& dtheta);

/// Lower bound on (r(a) - r(b)).(a - b) / ||a - b||^2.
double reg_strong_convexity(const Regularizer& reg);
/// Upper bound on ||r(a) - r(b)|| / ||a - b||.
double reg_lipschitz(const Regularizer& reg);

/// Regularizer whose r equals the negative log-density gradient of the prior:
/// theta = 1/sigma^2 (isotropic), 1/v_i (diagonal), (gamma, alpha) (softplus).
Regularizer oracle_regularizer(const PriorSpec& prior);
RegKind regularizer_kind(const PriorSpec& prior);
/// Fixed beta carried by the family (0 for Gaussian families).
double family_beta(const PriorSpec& prior);

/// One draw of w* with i.i.d. coordinates from the 1-D marginals.
Vector sample_prior(const PriorSpec& prior, Rng& rng);

/// Inverse-CDF sampler for the 1-D softplus marginal: uniform grid of
/// `nodes` points over +-8 envelope standard deviations, linear interpolation.
class SoftplusInverseCdf {
 public:
  explicit SoftplusInverseCdf(const SoftplusGaussian& params, int nodes = 4096);
  double operator()(double u) const;

 private:
  std::vector<double> grid_;
  std::vector<double> cdf_;
};

struct Moments1d {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of coordinate `coord`'s marginal by adaptive Simpson
/// refinement over +-range_sigmas envelope standard deviations. Throws
/// NumericalError if the density is not negligible at the range ends.
Moments1d prior_moments_1d(const PriorSpec& prior, Index coord = 0, double range_sigmas = 10.0);

/// Unnormalized 1-D log-density of coordinate `coord`.
double prior_log_density_1d(const PriorSpec& prior, Index coord, double u);

double sigmoid(double x);
/// log(1 + exp(x)) without overflow.
double softplus(double x);

}  // namespace lgd
