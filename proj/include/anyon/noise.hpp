#pragma once

// Link phase noise: correlated Wiener increments, Ornstein–Uhlenbeck paths,
// Ohmic quantum baths, and the map from any of them to dephasing rates.

#include <variant>
#include <vector>

#include "anyon/correlation.hpp"
#include "anyon/linalg.hpp"
#include "anyon/rng.hpp"

namespace anyon {

struct WienerNoise {
  double d_phi = 1.0;  ///< phase diffusion constant, ⟨dφ²⟩ = 2 D_φ dt
};

struct OrnsteinUhlenbeckNoise {
  double sigma = 1.0;  ///< stationary standard deviation
  double tau_c = 1.0;  ///< correlation time
};

/// Symmetrized force spectrum S(ω) = η ω coth(ω/2T) e^{−|ω|/ω_c} (ħ = k_B = 1).
struct BathSpectrum {
  enum class Family { ohmic };
  Family family = Family::ohmic;
  double coupling = 0.0;     ///< η
  double temperature = 0.0;  ///< T
  double cutoff = 1.0;       ///< ω_c
};

struct QuantumBathNoise {
  BathSpectrum spectrum;
};

using NoiseSpec = std::variant<WienerNoise, OrnsteinUhlenbeckNoise, QuantumBathNoise>;

/// Throws ParameterError for negative/non-finite parameters.
void validate(const NoiseSpec& spec);

/// White-noise diffusion constant equivalent to the spec: D_φ, σ²τ_c or S(0).
double noise_intensity(const NoiseSpec& spec);

/// True for white noise (Wiener or Markovian bath).
bool is_white(const NoiseSpec& spec);

/// Γ_θ = 2 J² × noise_intensity(spec).
double effective_rate(const NoiseSpec& spec, double J);

double ohmic_spectrum(const BathSpectrum& spectrum, double omega);

/// lim_{ω→0} S(ω) = 2ηT.
double ohmic_sff0(const BathSpectrum& spectrum);

/// Static susceptibility Ξ = ∫₀^∞ χ(τ) dτ, evaluated as (2/π)∫₀^∞ A(ω)/ω dω
/// with A(ω) = S(ω) tanh(ω/2T) the commutator (antisymmetric) spectrum.
double lamb_shift_coefficient(const BathSpectrum& spectrum);

/// Γ_ab = 2 J_a J_b D_ab.
CorrelationMatrix rate_matrix(const std::vector<double>& J, const CorrelationMatrix& D);

/// Upper bound on correlated links per sampler (scratch lives on the stack).
inline constexpr Eigen::Index kMaxLinks = 16;

/// Draws correlated Gaussian increments with covariance 2 D dt.
///
/// Full-rank D uses the symmetric square root; rank-deficient D uses the
/// pivoted LDLᵀ factor, which keeps increments exactly inside range(D).
class IncrementSampler {
 public:
  IncrementSampler(const CorrelationMatrix& D, double dt);

  Eigen::Index size() const { return factor_.rows(); }
  const RealMatrix& factor() const { return factor_; }
  bool pivoted() const { return pivoted_; }

  /// One step of increments.
  void draw(RngStream& stream, Eigen::Ref<RealVector> out) const;

 private:
  RealMatrix factor_;
  bool pivoted_ = false;
};

/// n_steps × n matrix of increments; row k is step k.
RealMatrix sample_increments(const CorrelationMatrix& D, double dt, long n_steps,
                             RngStream& stream);

/// Correlated stationary OU processes with covariance σ² C and correlation
/// time τ_c, advanced with the exact one-step transition.
class OuSampler {
 public:
  OuSampler(double sigma, double tau_c, double dt, const CorrelationMatrix& C);

  Eigen::Index size() const { return factor_.rows(); }
  /// Draw x(0) from the stationary law.
  void start(RngStream& stream, Eigen::Ref<RealVector> x) const;
  /// x ← e^{−dt/τ_c} x + σ√(1−e^{−2dt/τ_c}) L ξ
  void advance(RngStream& stream, Eigen::Ref<RealVector> x) const;

 private:
  RealMatrix factor_;  ///< L with L Lᵀ = C
  double sigma_;
  double decay_;
  double kick_;
};

/// Scalar OU path φ(0..n_steps−1) with φ(0) stationary.
std::vector<double> ou_path(double sigma, double tau_c, double dt, long n_steps,
                            RngStream& stream);

}  // namespace anyon
