#include <doctest.h>

#include <cmath>
#include <numbers>

#include "anyon/errors.hpp"
#include "anyon/noise.hpp"

using namespace anyon;

namespace {

// composite Simpson on [a, b] with n (even) panels
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("effective rates of the three noise models") {
  CHECK(effective_rate(WienerNoise{1.0}, 0.1) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(effective_rate(OrnsteinUhlenbeckNoise{2.0, 0.5}, 0.3) == doctest::Approx(2 * 0.09 * 4.0 * 0.5));
  BathSpectrum b{BathSpectrum::Family::ohmic, 0.05, 0.4, 10.0};
  const double J = 0.2;
  CHECK(std::abs(effective_rate(QuantumBathNoise{b}, J) - 2 * J * J * 2 * 0.05 * 0.4) < 1e-15);
  CHECK(is_white(WienerNoise{}));
  CHECK(is_white(QuantumBathNoise{}));
  CHECK_FALSE(is_white(OrnsteinUhlenbeckNoise{}));

  CHECK_THROWS_AS(validate(WienerNoise{-1.0}), ParameterError);
  CHECK_THROWS_AS(validate(OrnsteinUhlenbeckNoise{1.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(validate(QuantumBathNoise{{BathSpectrum::Family::ohmic, 1.0, 1.0, 0.0}}), ParameterError);
  CHECK_THROWS_AS(effective_rate(WienerNoise{1.0}, -0.1), ParameterError);
}

TEST_CASE("Ohmic spectrum limits") {
  BathSpectrum b{BathSpectrum::Family::ohmic, 0.3, 0.5, 4.0};
  // ω coth(ω/2T) → 2T as ω → 0
  CHECK(ohmic_spectrum(b, 1e-6) == doctest::Approx(2 * 0.3 * 0.5).epsilon(1e-5));
  CHECK(ohmic_spectrum(b, 0.0) == doctest::Approx(ohmic_sff0(b)));
  CHECK(ohmic_spectrum(b, -1.3) == doctest::Approx(ohmic_spectrum(b, 1.3)));
  BathSpectrum cold{BathSpectrum::Family::ohmic, 0.3, 0.0, 4.0};
  CHECK(ohmic_spectrum(cold, 2.0) == doctest::Approx(0.3 * 2.0 * std::exp(-0.5)));
  CHECK(ohmic_sff0(cold) == 0.0);
}

TEST_CASE("static susceptibility against Simpson quadrature and the closed form") {
  for (double T : {0.0, 0.1, 1.0, 5.0}) {
    BathSpectrum b{BathSpectrum::Family::ohmic, 0.07, T, 3.0};
    const double xi = lamb_shift_coefficient(b);
    auto integrand = [&](double w) {
      if (w == 0.0) return b.coupling;
      const double coth = T == 0.0 ? 1.0 : 1.0 / std::tanh(w / (2 * T));
      const double th = T == 0.0 ? 1.0 : std::tanh(w / (2 * T));
      return b.coupling * w * coth * std::exp(-w / b.cutoff) * th / w;
    };
    const double oracle = 2.0 / std::numbers::pi * simpson(integrand, 0.0, 60.0 * b.cutoff, 20000);
    CHECK(xi == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(xi == doctest::Approx(2 * b.coupling * b.cutoff / std::numbers::pi).epsilon(1e-10));
  }
  CHECK(lamb_shift_coefficient({BathSpectrum::Family::ohmic, 0.0, 1.0, 1.0}) == 0.0);
}

TEST_CASE("rate matrix") {
  const auto G = rate_matrix({0.1, 0.2}, CorrelationMatrix::two_link(0.5));
  CHECK(G.entries()(0, 0).real() == doctest::Approx(0.02));
  CHECK(G.entries()(0, 1).real() == doctest::Approx(2 * 0.1 * 0.2 * 0.5));
  CHECK(G.entries()(1, 1).real() == doctest::Approx(0.08));
  CHECK_THROWS_AS(rate_matrix({0.1}, CorrelationMatrix::two_link(0.5)), ShapeError);
}

TEST_CASE("correlated increments have covariance 2 D dt") {
  const double dt = 0.01;
  RealMatrix d(2, 2);
  d << 1.5, 0.6, 0.6, 0.8;
  const CorrelationMatrix D(d);
  RngStream s(9, 1);
  const long n = 200000;
  const RealMatrix inc = sample_increments(D, dt, n, s);
  const RealMatrix cov = inc.transpose() * inc / double(n);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double expected = 2 * d(a, b) * dt;
      // standard error of a sample second moment of Gaussians
      const double se = std::sqrt((4 * dt * dt * (d(a, a) * d(b, b) + d(a, b) * d(a, b))) / double(n));
      CHECK(std::abs(cov(a, b) - expected) < 5 * se);
    }
  CHECK(std::abs(inc.col(0).mean()) < 5 * std::sqrt(2 * 1.5 * dt / n));
}

TEST_CASE("rank-deficient correlation keeps increments inside range(D)") {
  for (double xi : {1.0, -1.0}) {
    IncrementSampler sampler(CorrelationMatrix::two_link(xi), 0.05);
    CHECK(sampler.pivoted());
    RngStream s(2, 3);
    RealVector x(2);
    for (int k = 0; k < 1000; ++k) {
      sampler.draw(s, x);
      CHECK(std::abs(x(0) - xi * x(1)) < 1e-15);
    }
  }
  IncrementSampler full(CorrelationMatrix::two_link(0.3), 0.05);
  CHECK_FALSE(full.pivoted());
  CHECK((full.factor() * full.factor().transpose() - 2 * 0.05 * CorrelationMatrix::two_link(0.3).real_entries()).norm() <
        1e-14);
}

TEST_CASE("Ornstein-Uhlenbeck paths are stationary with exponential memory") {
  const double sigma = 1.3, tau = 0.5, dt = 0.05;
  RngStream s(5, 0);
  const long n = 400000;
  const auto path = ou_path(sigma, tau, dt, n, s);
  double m = 0, v = 0, c = 0;
  for (long k = 0; k < n; ++k) {
    m += path[k];
    v += path[k] * path[k];
    if (k + 1 < n) c += path[k] * path[k + 1];
  }
  m /= n;
  v /= n;
  c /= (n - 1);
  const double rho = std::exp(-dt / tau);
  // effective sample size of an AR(1) series
  const double neff = n * (1 - rho) / (1 + rho);
  CHECK(std::abs(m) < 5 * sigma / std::sqrt(neff));
  CHECK(std::abs(v - sigma * sigma) < 5 * sigma * sigma * std::sqrt(2.0 / neff));
  CHECK(std::abs(c / v - rho) < 5 * std::sqrt((1 - rho * rho) / neff) + 1e-3);
  CHECK_THROWS_AS(ou_path(1.0, 0.0, dt, 10, s), ParameterError);
}
