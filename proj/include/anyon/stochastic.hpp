#pragma once

// Stochastic Liouville–von Neumann propagation: each link current K_a couples
// to its own fluctuating phase, dρ = −i[H₀,ρ]dt − i Σ_a J_a [K_a,ρ] ∘ dφ_a.
//
// Schemes
//   stratonovich  Heun predictor–corrector, then Hermitize, renormalize and
//                 clip onto the state cone (abort if the pre-clip negativity
//                 exceeds projection_limit)
//   ito           Euler–Maruyama with the explicit −½ΣΓ_ab[K_a,[K_b,ρ]] drift;
//                 no projection, abort when ‖ρ‖₁ exceeds divergence_limit
//   exponential   ρ ← UρU†, U = exp(−i(H₀dt + Σ_a J_a K_a dφ_a))
//
// White noise (Wiener or quantum bath) uses increments with covariance
// 2·s·C·dt, s = noise_intensity. Ornstein–Uhlenbeck noise integrates the
// exact OU path with the trapezoid rule, dφ = ½(x_n + x_{n+1})dt, and is only
// valid for the Stratonovich and exponential schemes.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "anyon/correlation.hpp"
#include "anyon/linalg.hpp"
#include "anyon/noise.hpp"
#include "anyon/state.hpp"

namespace anyon {

enum class Scheme { stratonovich, ito, exponential };

std::string to_string(Scheme s);
/// Throws ParameterError for unknown names.
Scheme parse_scheme(const std::string& name);

struct TrajectoryConfig {
  Operator H0;
  std::vector<Operator> Ks;  ///< Hermitian link currents
  std::vector<double> J;     ///< link amplitudes
  NoiseSpec noise = WienerNoise{};
  CorrelationMatrix correlation = CorrelationMatrix::identity(1);  ///< C, unit diagonal
  Matrix rho0;
  SimulationGrid grid;
  Scheme scheme = Scheme::stratonovich;
  double positivity_tolerance = 1e-14;  ///< negativity below this is left alone
  double projection_limit = 1e-2;
  double divergence_limit = 10.0;
};

/// Validated, precomputed form of a TrajectoryConfig. Immutable and safe to
/// share between threads.
class StochasticModel {
 public:
  explicit StochasticModel(TrajectoryConfig config);

  const TrajectoryConfig& config() const { return cfg_; }
  Eigen::Index dim() const { return cfg_.H0.rows(); }
  std::size_t n_links() const { return cfg_.Ks.size(); }
  /// Γ_ab = 2 J_a J_b s C_ab
  const CorrelationMatrix& rate_matrix() const { return gamma_; }
  /// Deterministic generator −i[H₀,·] − ½ΣΓ_ab[K_a,[K_b,·]].
  Matrix lindblad_rhs(const Matrix& rho) const;

  /// Record callback: (record index, time, state).
  using Observer = std::function<void(std::size_t, double, const Matrix&)>;
  /// Runs stream `stream_id` of `master_seed`; throws TrajectoryError.
  void run(std::uint64_t master_seed, std::uint64_t stream_id, const Observer& observe) const;

  struct Collective {
    Operator op;
    double rate;
  };

 private:
  TrajectoryConfig cfg_;
  CorrelationMatrix gamma_;
  CorrelationMatrix link_d_;  ///< s·C, covariance of dφ/2dt
  std::vector<Collective> drift_;
  bool h0_zero_ = false;
};

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<Matrix> states;
  std::uint64_t stream_id = 0;
};

TrajectoryResult run_trajectory(const StochasticModel& model, std::uint64_t master_seed,
                                std::uint64_t stream_id);

/// ⟨ψ|ρ|ψ⟩
double survival_probability(const Matrix& rho, const Vector& psi);

/// Exact one-step expectation map E[ρ_{n+1}] = M vec(ρ_n) of the linear
/// white-noise schemes (column-stacked):
///   stratonovich  M = I + (F + 𝓓)dt + ½F²dt²
///   ito           M = I + (F + 𝓓)dt
/// with F = −i[H₀,·] and 𝓓 = −½ΣΓ_ab[K_a,[K_b,·]]. ParameterError for the
/// exponential scheme or coloured noise.
Matrix mean_step_map(const StochasticModel& model);

}  // namespace anyon
