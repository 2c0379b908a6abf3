#include "anyon/noise.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "anyon/errors.hpp"

namespace anyon {

namespace {

using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxLinks, 1>;

void require_finite_nonneg(double v, const char* what) {
  if (!std::isfinite(v) || v < 0) {
    std::ostringstream os;
    os << what << " must be finite and >= 0 (got " << v << ")";
    throw ParameterError(os.str());
  }
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0) {
    std::ostringstream os;
    os << what << " must be finite and > 0 (got " << v << ")";
    throw ParameterError(os.str());
  }
}

// L with L Lᵀ = C: symmetric root when C is full rank, pivoted LDLᵀ otherwise.
RealMatrix gaussian_factor(const CorrelationMatrix& C, bool* pivoted) {
  if (!C.classical()) throw ValidityError("Gaussian increments need a real (classical) correlation matrix");
  if (C.size() > kMaxLinks) throw ParameterError("too many correlated links (max 16)");
  const RealMatrix c = C.real_entries();
  if (!C.rank_deficient()) {
    *pivoted = false;
    const auto& es = C.eigen();
    const RealMatrix v = es.vectors.real();
    return v * es.values.cwiseSqrt().asDiagonal() * v.transpose();
  }
  *pivoted = true;
  Eigen::LDLT<RealMatrix> ldlt(c);
  if (ldlt.info() != Eigen::Success) throw NumericError("pivoted LDLT factorization failed");
  RealMatrix l = ldlt.matrixL();
  const RealVector d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  RealMatrix m = l * d.asDiagonal();
  return ldlt.transpositionsP().transpose() * m;
}

}  // namespace

void validate(const NoiseSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WienerNoise>) {
          require_finite_nonneg(s.d_phi, "d_phi");
        } else if constexpr (std::is_same_v<T, OrnsteinUhlenbeckNoise>) {
          require_finite_nonneg(s.sigma, "sigma");
          require_positive(s.tau_c, "tau_c");
        } else {
          require_finite_nonneg(s.spectrum.coupling, "bath coupling");
          require_finite_nonneg(s.spectrum.temperature, "bath temperature");
          require_positive(s.spectrum.cutoff, "bath cutoff");
        }
      },
      spec);
}

double noise_intensity(const NoiseSpec& spec) {
  validate(spec);
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WienerNoise>) return s.d_phi;
        else if constexpr (std::is_same_v<T, OrnsteinUhlenbeckNoise>) return s.sigma * s.sigma * s.tau_c;
        else return ohmic_sff0(s.spectrum);
      },
      spec);
}

bool is_white(const NoiseSpec& spec) { return !std::holds_alternative<OrnsteinUhlenbeckNoise>(spec); }

double effective_rate(const NoiseSpec& spec, double J) {
  require_finite_nonneg(J, "J");
  return 2.0 * J * J * noise_intensity(spec);
}

double ohmic_spectrum(const BathSpectrum& b, double omega) {
  const double w = std::abs(omega);
  const double damp = std::exp(-w / b.cutoff);
  if (w == 0.0) return 2.0 * b.coupling * b.temperature;
  if (b.temperature == 0.0) return b.coupling * w * damp;
  // ω coth(ω/2T) is even in ω
  return b.coupling * w / std::tanh(w / (2.0 * b.temperature)) * damp;
}

double ohmic_sff0(const BathSpectrum& b) {
  require_finite_nonneg(b.coupling, "bath coupling");
  require_finite_nonneg(b.temperature, "bath temperature");
  return 2.0 * b.coupling * b.temperature;
}

double lamb_shift_coefficient(const BathSpectrum& b) {
  validate(NoiseSpec{QuantumBathNoise{b}});
  if (b.coupling == 0.0) return 0.0;
  // A(ω)/ω for ω > 0, A = S tanh(ω/2T)
  auto integrand = [&b](double w) {
    const double s = ohmic_spectrum(b, w);
    const double t = b.temperature == 0.0 ? 1.0 : std::tanh(w / (2.0 * b.temperature));
    return s * t / w;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                            1e-12, &err, &l1);
  if (!std::isfinite(value) || err > 1e-9 * std::max(1.0, l1)) {
    std::ostringstream os;
    os << "Lamb-shift quadrature did not converge (value " << value << ", error estimate " << err
       << ", L1 " << l1 << ")";
    throw NumericError(os.str());
  }
  return 2.0 / std::numbers::pi * value;
}

CorrelationMatrix rate_matrix(const std::vector<double>& J, const CorrelationMatrix& D) {
  if (static_cast<Eigen::Index>(J.size()) != D.size())
    throw ShapeError("rate_matrix: amplitude count must match dim(D)");
  for (double j : J) require_finite_nonneg(j, "link amplitude");
  const auto n = D.size();
  Matrix g(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) g(a, b) = 2.0 * J[a] * J[b] * D.entries()(a, b);
  return CorrelationMatrix(g, D.classical());
}

IncrementSampler::IncrementSampler(const CorrelationMatrix& D, double dt) {
  require_positive(dt, "dt");
  factor_ = gaussian_factor(D, &pivoted_) * std::sqrt(2.0 * dt);
}

void IncrementSampler::draw(RngStream& stream, Eigen::Ref<RealVector> out) const {
  const auto n = factor_.cols();
  SmallVector xi(n);
  for (Eigen::Index k = 0; k < n; ++k) xi(k) = stream.normal();
  for (Eigen::Index a = 0; a < factor_.rows(); ++a) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) s += factor_(a, k) * xi(k);
    out(a) = s;
  }
}

RealMatrix sample_increments(const CorrelationMatrix& D, double dt, long n_steps, RngStream& stream) {
  if (n_steps < 0) throw ParameterError("n_steps must be >= 0");
  IncrementSampler sampler(D, dt);
  RealMatrix out(n_steps, sampler.size());
  RealVector row(sampler.size());
  for (long k = 0; k < n_steps; ++k) {
    sampler.draw(stream, row);
    out.row(k) = row.transpose();
  }
  return out;
}

OuSampler::OuSampler(double sigma, double tau_c, double dt, const CorrelationMatrix& C) : sigma_(sigma) {
  require_finite_nonneg(sigma, "sigma");
  require_positive(tau_c, "tau_c");
  require_positive(dt, "dt");
  bool pivoted = false;
  factor_ = gaussian_factor(C, &pivoted);
  decay_ = std::exp(-dt / tau_c);
  kick_ = sigma * std::sqrt(-std::expm1(-2.0 * dt / tau_c));
}

void OuSampler::start(RngStream& stream, Eigen::Ref<RealVector> x) const {
  const auto n = factor_.cols();
  SmallVector xi(n);
  for (Eigen::Index k = 0; k < n; ++k) xi(k) = stream.normal();
  x = sigma_ * (factor_ * xi);
}

void OuSampler::advance(RngStream& stream, Eigen::Ref<RealVector> x) const {
  const auto n = factor_.cols();
  SmallVector xi(n);
  for (Eigen::Index k = 0; k < n; ++k) xi(k) = stream.normal();
  x = decay_ * x + kick_ * (factor_ * xi);
}

std::vector<double> ou_path(double sigma, double tau_c, double dt, long n_steps, RngStream& stream) {
  if (n_steps < 0) throw ParameterError("n_steps must be >= 0");
  OuSampler sampler(sigma, tau_c, dt, CorrelationMatrix::identity(1));
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(n_steps));
  RealVector x(1);
  for (long k = 0; k < n_steps; ++k) {
    if (k == 0) sampler.start(stream, x);
    else sampler.advance(stream, x);
    path.push_back(x(0));
  }
  return path;
}

}  // namespace anyon
