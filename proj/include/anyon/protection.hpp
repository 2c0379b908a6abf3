#pragma once

// Closed-form protection theory: variance and covariance rules for pure
// dephasing, the two-mode Bloch-vector rate, the optimal statistical angle,
// lifetimes and the θ sweep over correlated two-link noise.

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "anyon/correlation.hpp"
#include "anyon/linalg.hpp"

namespace anyon {

/// ⟨u|K²|u⟩ − ⟨u|K|u⟩², clipped at zero.
double variance(const Operator& K, const Vector& u);

/// ⟨u|½{A,B}|u⟩ − ⟨u|A|u⟩⟨u|B|u⟩
double covariance(const Operator& A, const Operator& B, const Vector& u);

struct BlochVector {
  double x = 0.0, y = 0.0, z = 0.0;

  BlochVector() = default;
  /// ValidityError when the length exceeds 1 + 1e−12.
  BlochVector(double x, double y, double z);
  double in_plane_norm() const;
  /// Pure two-mode state with this Bloch vector; the length must be 1.
  Vector pure_state() const;
};

/// n(θ) = (−sinθ, cosθ, 0)
std::array<double, 3> current_axis(double theta);

/// Γ[1 − (n(θ)·r)²]
double dephasing_rate_bloch(double theta, double Gamma, const BlochVector& r);

inline constexpr std::size_t kProtectionGridPoints = 4096;
inline constexpr double kUndefinedInPlaneNorm = 1e-12;

struct ProtectionReport {
  double theta_star = 0.0;  ///< in [0, π); meaningless when undefined
  bool undefined = false;   ///< in-plane projection ~0, rate independent of θ
  double gamma_min = 0.0;
  std::vector<double> theta_grid;
  std::vector<double> gamma_of_theta;
  double grid_argmin = 0.0;
  double grid_step = 0.0;
  double lifetime = 0.0;  ///< at θ*, +inf when the total rate vanishes
  bool lifetime_infinite = false;
};

/// θ* = π/2 + arg(r_x + i r_y) mod π, where n(θ) ∥ ±r∥, and γ_min = Γ(1 − |r∥|²),
/// plus a dense grid minimization over [0, π) for cross-checking.
ProtectionReport optimal_angle(const BlochVector& r, double Gamma, double gamma_res = 0.0,
                               std::size_t grid_points = kProtectionGridPoints);

/// 1/(γ_res + Γ[1 − (n·r)²]); +inf when the total rate is below 1e−15.
double effective_lifetime(double theta, double Gamma, double gamma_res, const BlochVector& r);

/// Σ_ab Γ_ab Cov_u(K_a, K_b)
double multilink_rate(const CorrelationMatrix& Gamma, const std::vector<Operator>& Ks, const Vector& u);

/// {γ₊, γ₋} = 2J²(1 ± ξ)
std::array<double, 2> two_link_rates(double xi, double J);

/// Two links on the two-mode manifold with currents K_{θ+δ_a}.
struct TwoLinkModel {
  double J = 0.1;
  double noise_intensity = 1.0;                  ///< s in D = s·C
  std::array<double, 2> phase_offsets{0.0, 0.0};  ///< δ_a
  BlochVector state{1.0, 0.0, 0.0};
};

struct SweepCurve {
  double xi = 0.0;
  std::vector<double> gamma_over_J;
  std::size_t argmin_index = 0;
  double argmin_theta = 0.0;
  double min_value = 0.0;
};

struct SweepTable {
  std::vector<double> theta;
  std::vector<SweepCurve> curves;
};

/// γ_φ(θ)/J for each ξ, correlation C = [[1,ξ],[ξ,1]]. OpenMP over grid points.
SweepTable sweep_theta(const std::vector<double>& xi_values, const std::vector<double>& theta_grid,
                       const TwoLinkModel& model);
SweepTable sweep_theta_serial(const std::vector<double>& xi_values, const std::vector<double>& theta_grid,
                              const TwoLinkModel& model);

}  // namespace anyon
