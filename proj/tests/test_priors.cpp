#include <cmath>

#include "doctest.h"
#include "lgd/error.hpp"
#include "lgd/priors.hpp"
#include "oracles.hpp"

using namespace lgd;

namespace {

const SoftplusGaussian kSoftplus{1.0, 10.0, 0.1};

double softplus_log_density(double u) {
  return -kSoftplus.gamma * u * u / 2.0 - kSoftplus.alpha * std::log1p(std::exp(kSoftplus.beta * u));
}

// Mean of the softplus marginal by trapezoid on [-40, 40] (sd of the envelope is ~3.2).
double softplus_mean_trapezoid() {
  const auto p = [](double u) { return std::exp(softplus_log_density(u)); };
  const double z = oracle::trapezoid(p, -40.0, 40.0, 400001);
  return oracle::trapezoid([&](double u) { return u * p(u); }, -40.0, 40.0, 400001) / z;
}

// Root of gamma u + alpha beta sigmoid(beta u) = 0 by bisection.
double softplus_mode() {
  double lo = -20.0, hi = 0.0;
  const auto f = [](double u) { return kSoftplus.gamma * u + kSoftplus.alpha * kSoftplus.beta / (1.0 + std::exp(-kSoftplus.beta * u)); };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Regularizer> sample_regularizers(Rng& rng, Index d) {
  Vector diag(d);
  for (Index i = 0; i < d; ++i) diag[i] = rng.uniform(0.1, 5.0);
  return {Regularizer::isotropic(rng.uniform(0.1, 20.0)), Regularizer::diagonal(diag),
          Regularizer::softplus(rng.uniform(0.05, 2.0), rng.uniform(0.1, 3.0), 10.0)};
}

}  // namespace

TEST_CASE("reg_grad examples") {
  CHECK(reg_grad(Regularizer::isotropic(10.0), Vector{{1.0, -1.0}}) == Vector{{10.0, -10.0}});
  CHECK(reg_grad(Regularizer::softplus(0.1, 1.0, 10.0), Vector{{0.0}})[0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(reg_grad(Regularizer::isotropic(3.0), Vector::Zero(4)).isZero(0.0));
  CHECK(reg_grad(Regularizer::diagonal(Vector{{1.0, 2.0, 3.0}}), Vector::Zero(3)).isZero(0.0));
  CHECK(reg_grad(Regularizer::diagonal(Vector{{1.0, 2.0}}), Vector{{1.0, 1.0}}) == Vector{{1.0, 2.0}});
  CHECK_THROWS_AS(reg_grad(Regularizer::diagonal(Vector{{1.0, 2.0}}), Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("neg_log_prior examples") {
  CHECK(neg_log_prior(Regularizer::isotropic(10.0), Vector{{1.0}}) == doctest::Approx(5.0));
  CHECK(neg_log_prior(Regularizer::softplus(0.1, 1.0, 10.0), Vector{{0.0}}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("reg_grad is the gradient of neg_log_prior") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    for (const Regularizer& reg : sample_regularizers(rng, 5)) {
      const Vector w = oracle::random_vector(rng, 5, 0.5);
      const Vector fd = oracle::fd_gradient([&](const Vector& v) { return neg_log_prior(reg, v); }, w);
      CHECK(oracle::rel_err(reg_grad(reg, w), fd) <= 1e-6);
    }
  }
}

TEST_CASE("reg_grad is strongly monotone and Lipschitz") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    for (const Regularizer& reg : sample_regularizers(rng, 4)) {
      const Vector a = oracle::random_vector(rng, 4, 2.0), b = oracle::random_vector(rng, 4, 2.0);
      const Vector dr = reg_grad(reg, a) - reg_grad(reg, b);
      const double dist2 = (a - b).squaredNorm();
      CHECK(dr.dot(a - b) >= reg_strong_convexity(reg) * dist2 * (1.0 - 1e-12));
      CHECK(dr.norm() <= reg_lipschitz(reg) * std::sqrt(dist2) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("regularizer jacobians match finite differences") {
  Rng rng(13);
  for (const Regularizer& reg : sample_regularizers(rng, 3)) {
    const Vector w = oracle::random_vector(rng, 3, 0.3);
    const RegJacobians J = reg_grad_jacobians(reg, w);
    for (Index i = 0; i < 3; ++i) {
      const double h = 1e-6;
      Vector wp = w, wm = w;
      wp[i] += h;
      wm[i] -= h;
      const Vector col = (reg_grad(reg, wp) - reg_grad(reg, wm)) / (2 * h);
      CHECK(col[i] == doctest::Approx(J.dw_diag[i]).epsilon(1e-6));
    }
    for (Index j = 0; j < reg.theta.size(); ++j) {
      const double h = 1e-6;
      Vector tp = reg.theta, tm = reg.theta;
      tp[j] += h;
      tm[j] -= h;
      const Vector col = (reg_grad(reg.with_theta(tp), w) - reg_grad(reg.with_theta(tm), w)) / (2 * h);
      CHECK(oracle::rel_err(Vector(J.dtheta.col(j)), col, 1e-9) <= 1e-6);
    }
  }
}

TEST_CASE("oracle regularizers") {
  CHECK(oracle_regularizer({IsotropicGaussian{0.1}, 10}).theta[0] == doctest::Approx(10.0));
  const Regularizer diag = oracle_regularizer({DiagonalGaussian{Vector{{0.05, 0.5}}}, 2});
  CHECK(diag.theta[0] == doctest::Approx(20.0));
  CHECK(diag.theta[1] == doctest::Approx(2.0));
  const Regularizer sp = oracle_regularizer({kSoftplus, 10});
  CHECK(sp.theta == Vector{{0.1, 1.0}});
  CHECK(sp.beta == 10.0);
}

TEST_CASE("prior validation") {
  CHECK_THROWS_AS(PriorSpec({IsotropicGaussian{0.0}, 3}).validate(), ConfigError);
  CHECK_THROWS_AS(PriorSpec({DiagonalGaussian{Vector{{0.1, -1.0}}}, 2}).validate(), ConfigError);
  CHECK_THROWS_AS(PriorSpec({SoftplusGaussian{1.0, 10.0, 0.0}, 2}).validate(), ConfigError);
  CHECK_THROWS_AS(PriorSpec({SoftplusGaussian{-1.0, 10.0, 0.1}, 2}).validate(), ConfigError);
}

TEST_CASE("sample_prior moments") {
  SUBCASE("isotropic") {
    const PriorSpec prior{IsotropicGaussian{0.1}, 1};
    Rng rng(21);
    double s = 0, ss = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
      const double x = sample_prior(prior, rng)[0];
      s += x;
      ss += x * x;
    }
    const double mean = s / N;
    CHECK(std::abs(mean) <= 0.01);
    CHECK(std::abs(ss / N - mean * mean - 0.1) <= 0.01);
  }
  SUBCASE("diagonal") {
    const int d = 10;
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = 0.05 + 0.05 * i;
    const PriorSpec prior{DiagonalGaussian{v}, d};
    Rng rng(22);
    Vector s = Vector::Zero(d), ss = Vector::Zero(d);
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
      const Vector x = sample_prior(prior, rng);
      s += x;
      ss += x.cwiseProduct(x);
    }
    const Vector var = ss / N - (s / N).cwiseProduct(s / N);
    for (int i = 0; i < d; ++i) CHECK(std::abs(var[i] / v[i] - 1.0) <= 0.1);
  }
  SUBCASE("softplus") {
    const PriorSpec prior{kSoftplus, 1};
    Rng rng(23);
    double s = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) s += sample_prior(prior, rng)[0];
    CHECK(std::abs(s / N - softplus_mean_trapezoid()) <= 0.05);
  }
}

TEST_CASE("prior_moments_1d") {
  const Moments1d g = prior_moments_1d({IsotropicGaussian{0.1}, 1});
  CHECK(std::abs(g.mean) <= 1e-12);
  CHECK(g.variance == doctest::Approx(0.1).epsilon(1e-9));

  const Moments1d flat = prior_moments_1d({SoftplusGaussian{0.0, 10.0, 0.1}, 1});
  CHECK(std::abs(flat.mean) <= 1e-10);
  CHECK(flat.variance == doctest::Approx(10.0).epsilon(1e-9));

  const Moments1d sp = prior_moments_1d({kSoftplus, 1});
  CHECK(sp.mean == doctest::Approx(softplus_mean_trapezoid()).epsilon(1e-6));
  const double mode = softplus_mode();
  CHECK(sp.mean < mode);
  CHECK(std::abs(sp.mean - mode) > 0.1);

  CHECK_THROWS_AS(prior_moments_1d({kSoftplus, 1}, 0, 1.0), NumericalError);
}
