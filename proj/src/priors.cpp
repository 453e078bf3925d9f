#include "lgd/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "lgd/error.hpp"

namespace lgd {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

void PriorSpec::validate() const {
  if (dim < 1) throw ConfigError("prior: dimension must be >= 1");
  std::visit(
      [this](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, IsotropicGaussian>) {
          if (!(f.variance > 0.0)) throw ConfigError("isotropic prior: variance must be > 0");
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          require_dim("diagonal prior: number of variances", dim, f.variances.size());
          if (!(f.variances.array() > 0.0).all()) throw ConfigError("diagonal prior: variances must be > 0");
        } else {
          if (!(f.gamma > 0.0)) throw ConfigError("softplus prior: gamma must be > 0");
          if (!(f.alpha >= 0.0)) throw ConfigError("softplus prior: alpha must be >= 0");
          if (!std::isfinite(f.beta)) throw ConfigError("softplus prior: beta must be finite");
        }
      },
      family);
}

std::string PriorSpec::kind_name() const {
  switch (family.index()) {
    case 0: return "isotropic";
    case 1: return "diagonal";
    default: return "softplus";
  }
}

Regularizer Regularizer::isotropic(double theta) { return {RegKind::kIsotropic, Vector::Constant(1, theta), 0.0}; }

Regularizer Regularizer::diagonal(Vector theta) { return {RegKind::kDiagonal, std::move(theta), 0.0}; }

Regularizer Regularizer::softplus(double theta0, double theta1, double beta) {
  Vector theta(2);
  theta << theta0, theta1;
  return {RegKind::kSoftplus, std::move(theta), beta};
}

Index Regularizer::hyper_dim(Index d) const {
  switch (kind) {
    case RegKind::kNone: return 0;
    case RegKind::kIsotropic: return 1;
    case RegKind::kDiagonal: return d;
    case RegKind::kSoftplus: return 2;
  }
  return 0;
}

void Regularizer::validate(Index d) const {
  if (theta.size() != hyper_dim(d)) {
    throw ConfigError(to_string(kind) + " regularizer: theta has length " + std::to_string(theta.size()) +
                      ", expected " + std::to_string(hyper_dim(d)));
  }
}

Regularizer Regularizer::with_theta(Vector new_theta) const {
  Regularizer out = *this;
  out.theta = std::move(new_theta);
  return out;
}

std::string to_string(RegKind kind) {
  switch (kind) {
    case RegKind::kNone: return "none";
    case RegKind::kIsotropic: return "isotropic";
    case RegKind::kDiagonal: return "diagonal";
    case RegKind::kSoftplus: return "softplus";
  }
  return "unknown";
}

RegKind reg_kind_from_string(const std::string& name) {
  if (name == "none") return RegKind::kNone;
  if (name == "isotropic") return RegKind::kIsotropic;
  if (name == "diagonal") return RegKind::kDiagonal;
  if (name == "softplus") return RegKind::kSoftplus;
  throw ConfigError("unknown regularizer kind '" + name + "'");
}

void add_reg_grad(const Regularizer& reg, const Vector& w, Vector& out) {
  switch (reg.kind) {
    case RegKind::kNone:
      return;
    case RegKind::kIsotropic:
      out += reg.theta[0] * w;
      return;
    case RegKind::kDiagonal:
      out += reg.theta.cwiseProduct(w);
      return;
    case RegKind::kSoftplus: {
      const double t0 = reg.theta[0];
      const double scaled = reg.beta * reg.theta[1];
      for (Index i = 0; i < w.size(); ++i) out[i] += t0 * w[i] + scaled * sigmoid(reg.beta * w[i]);
      return;
    }
  }
}

Vector reg_grad(const Regularizer& reg, const Vector& w) {
  reg.validate(w.size());
  Vector out = Vector::Zero(w.size());
  add_reg_grad(reg, w, out);
  return out;
}

double neg_log_prior(const Regularizer& reg, const Vector& w) {
  reg.validate(w.size());
  switch (reg.kind) {
    case RegKind::kNone: return 0.0;
    case RegKind::kIsotropic: return 0.5 * reg.theta[0] * w.squaredNorm();
    case RegKind::kDiagonal: return 0.5 * reg.theta.dot(w.cwiseAbs2());
    case RegKind::kSoftplus: {
      double sum = 0.0;
      for (Index i = 0; i < w.size(); ++i) {
        sum += 0.5 * reg.theta[0] * w[i] * w[i] + reg.theta[1] * softplus(reg.beta * w[i]);
      }
      return sum;
    }
  }
  return 0.0;
}

RegJacobians reg_grad_jacobians(const Regularizer& reg, const Vector& w) {
  reg.validate(w.size());
  const Index d = w.size();
  RegJacobians out{Vector::Zero(d), Matrix::Zero(d, reg.hyper_dim(d))};
  reg_grad_jacobians_into(reg, w, out.dw_diag, out.dtheta);
  return out;
}

void reg_grad_jacobians_into(const Regularizer& reg, const Vector& w, Vector& dw_diag, Matrix& dtheta) {
  const Index d = w.size();
  switch (reg.kind) {
    case RegKind::kNone:
      dw_diag.setZero();
      break;
    case RegKind::kIsotropic:
      dw_diag.setConstant(reg.theta[0]);
      dtheta.col(0) = w;
      break;
    case RegKind::kDiagonal:
      dw_diag = reg.theta;
      dtheta.setZero();
      dtheta.diagonal() = w;
      break;
    case RegKind::kSoftplus:
      for (Index i = 0; i < d; ++i) {
        const double s = sigmoid(reg.beta * w[i]);
        dw_diag[i] = reg.theta[0] + reg.theta[1] * reg.beta * reg.beta * s * (1.0 - s);
        dtheta(i, 0) = w[i];
        dtheta(i, 1) = reg.beta * s;
      }
      break;
  }
}

double reg_strong_convexity(const Regularizer& reg) {
  switch (reg.kind) {
    case RegKind::kNone: return 0.0;
    case RegKind::kIsotropic: return reg.theta[0];
    case RegKind::kDiagonal: return reg.theta.minCoeff();
    case RegKind::kSoftplus: return reg.theta[0];
  }
  return 0.0;
}

double reg_lipschitz(const Regularizer& reg) {
  switch (reg.kind) {
    case RegKind::kNone: return 0.0;
    case RegKind::kIsotropic: return reg.theta[0];
    case RegKind::kDiagonal: return reg.theta.maxCoeff();
    case RegKind::kSoftplus: return reg.theta[0] + reg.theta[1] * reg.beta * reg.beta / 4.0;
  }
  return 0.0;
}

Regularizer oracle_regularizer(const PriorSpec& prior) {
  prior.validate();
  return std::visit(
      [&](const auto& f) -> Regularizer {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, IsotropicGaussian>) {
          return Regularizer::isotropic(1.0 / f.variance);
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          return Regularizer::diagonal(f.variances.cwiseInverse());
        } else {
          return Regularizer::softplus(f.gamma, f.alpha, f.beta);
        }
      },
      prior.family);
}

RegKind regularizer_kind(const PriorSpec& prior) {
  switch (prior.family.index()) {
    case 0: return RegKind::kIsotropic;
    case 1: return RegKind::kDiagonal;
    default: return RegKind::kSoftplus;
  }
}

double family_beta(const PriorSpec& prior) {
  if (const auto* s = std::get_if<SoftplusGaussian>(&prior.family)) return s->beta;
  return 0.0;
}

namespace {

double envelope_sigma(const PriorSpec& prior, Index coord) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, IsotropicGaussian>) {
          return std::sqrt(f.variance);
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          return std::sqrt(f.variances[coord]);
        } else {
          return 1.0 / std::sqrt(f.gamma);
        }
      },
      prior.family);
}

}  // namespace

double prior_log_density_1d(const PriorSpec& prior, Index coord, double u) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, IsotropicGaussian>) {
          return -0.5 * u * u / f.variance;
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          return -0.5 * u * u / f.variances[coord];
        } else {
          return -0.5 * f.gamma * u * u - f.alpha * softplus(f.beta * u);
        }
      },
      prior.family);
}

SoftplusInverseCdf::SoftplusInverseCdf(const SoftplusGaussian& params, int nodes) {
  if (nodes < 2) throw ConfigError("softplus sampler: need at least 2 grid nodes");
  const PriorSpec spec{params, 1};
  spec.validate();
  const double half_width = 8.0 / std::sqrt(params.gamma);
  grid_.resize(nodes);
  cdf_.resize(nodes);
  std::vector<double> logp(nodes);
  for (int i = 0; i < nodes; ++i) {
    grid_[i] = -half_width + 2.0 * half_width * i / (nodes - 1);
    logp[i] = prior_log_density_1d(spec, 0, grid_[i]);
  }
  const double peak = *std::max_element(logp.begin(), logp.end());
  cdf_[0] = 0.0;
  double prev = std::exp(logp[0] - peak);
  for (int i = 1; i < nodes; ++i) {
    const double cur = std::exp(logp[i] - peak);
    cdf_[i] = cdf_[i - 1] + 0.5 * (prev + cur) * (grid_[i] - grid_[i - 1]);
    prev = cur;
  }
  const double total = cdf_.back();
  for (double& c : cdf_) c /= total;
}

double SoftplusInverseCdf::operator()(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return grid_.front();
  if (it == cdf_.end()) return grid_.back();
  const auto hi = static_cast<std::size_t>(it - cdf_.begin());
  const std::size_t lo = hi - 1;
  const double span = cdf_[hi] - cdf_[lo];
  if (span <= 0.0) return grid_[lo];
  return grid_[lo] + (u - cdf_[lo]) / span * (grid_[hi] - grid_[lo]);
}

Vector sample_prior(const PriorSpec& prior, Rng& rng) {
  prior.validate();
  Vector w(prior.dim);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, IsotropicGaussian>) {
          const double sd = std::sqrt(f.variance);
          for (Index i = 0; i < prior.dim; ++i) w[i] = sd * rng.normal();
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          for (Index i = 0; i < prior.dim; ++i) w[i] = std::sqrt(f.variances[i]) * rng.normal();
        } else {
          const SoftplusInverseCdf inverse_cdf(f);
          for (Index i = 0; i < prior.dim; ++i) w[i] = inverse_cdf(rng.uniform());
        }
      },
      prior.family);
  return w;
}

namespace {

struct SimpsonMoments {
  double mass;
  double mean;
  double variance;
};

SimpsonMoments simpson_moments(const PriorSpec& prior, Index coord, double lo, double hi, long intervals,
                               double log_shift) {
  const double h = (hi - lo) / static_cast<double>(intervals);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (long i = 0; i <= intervals; ++i) {
    const double u = lo + h * static_cast<double>(i);
    const double weight = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double p = weight * std::exp(prior_log_density_1d(prior, coord, u) - log_shift);
    m0 += p;
    m1 += p * u;
    m2 += p * u * u;
  }
  const double mean = m1 / m0;
  return {m0 * h / 3.0, mean, m2 / m0 - mean * mean};
}

}  // namespace

Moments1d prior_moments_1d(const PriorSpec& prior, Index coord, double range_sigmas) {
  prior.validate();
  if (coord < 0 || coord >= prior.dim) throw DimensionError("prior_moments_1d: coordinate out of range");
  const double sigma = envelope_sigma(prior, coord);
  const double lo = -range_sigmas * sigma;
  const double hi = range_sigmas * sigma;

  // Peak of the log-density on a coarse scan, used to keep exp() in range.
  double log_peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 4096; ++i) {
    log_peak = std::max(log_peak, prior_log_density_1d(prior, coord, lo + (hi - lo) * i / 4096.0));
  }
  const double edge = std::max(prior_log_density_1d(prior, coord, lo), prior_log_density_1d(prior, coord, hi));
  if (edge - log_peak > std::log(1e-14)) {
    throw NumericalError("prior_moments_1d: density not negligible at +-" + std::to_string(range_sigmas) +
                         " envelope sigmas; integration range too small");
  }

  long intervals = 512;
  SimpsonMoments prev = simpson_moments(prior, coord, lo, hi, intervals, log_peak);
  constexpr long kMaxIntervals = 1L << 22;
  while (intervals < kMaxIntervals) {
    intervals *= 2;
    const SimpsonMoments cur = simpson_moments(prior, coord, lo, hi, intervals, log_peak);
    const double tol = 1e-12 * sigma * sigma;
    if (std::abs(cur.mean - prev.mean) <= 1e-12 * sigma && std::abs(cur.variance - prev.variance) <= tol) {
      return {cur.mean, cur.variance};
    }
    prev = cur;
  }
  throw NumericalError("prior_moments_1d: quadrature did not converge");
}

}  // namespace lgd
