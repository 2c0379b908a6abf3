#pragma once

// Deterministic master-equation engine: generators, RK4 propagation,
// Liouvillian superoperators and their spectral diagnostics.
//
// Vectorization is column stacking, vec(A X B) = (Bᵀ ⊗ A) vec(X), so
//
//   𝓛 = −i(I⊗H − Hᵀ⊗I) + Σ γ [ L̄⊗L − ½(I⊗L†L + (L†L)ᵀ⊗I) ].

#include <functional>
#include <vector>

#include "anyon/correlation.hpp"
#include "anyon/linalg.hpp"
#include "anyon/operator_algebra.hpp"
#include "anyon/state.hpp"

namespace anyon {

enum class ChannelKind { hermitian_dephasing, relaxation };

struct LindbladChannel {
  Operator jump;
  double rate = 0.0;
  ChannelKind kind = ChannelKind::relaxation;

  /// √Γ K channel; K must be Hermitian to 1e−12.
  static LindbladChannel dephasing(const Operator& K, double Gamma);
  static LindbladChannel relaxation(const Operator& L, double gamma);
};

/// −(Γ/2)[K,[K,ρ]]
Matrix dephasing_generator(const Operator& K, double Gamma, const Matrix& rho);

/// γ(LρL† − ½{L†L, ρ})
Matrix relaxation_generator(const Operator& L, double gamma, const Matrix& rho);

/// −i[H₀,ρ] + Σ channels
Matrix lindblad_rhs(const Operator& H0, const std::vector<LindbladChannel>& channels, const Matrix& rho);

/// Dephasing channels for −½ Σ_ab Γ_ab [K_a,[K_b,·]], one per eigenmode of Γ
/// with nonzero eigenvalue.
std::vector<LindbladChannel> correlated_dephasing_channels(const std::vector<Operator>& Ks,
                                                           const CorrelationMatrix& Gamma);

/// L_± = ½√(1±ξ)(a₁ ± a₂), each with rate γ.
std::vector<LindbladChannel> collective_loss_channels(const Operator& a1, const Operator& a2,
                                                      double gamma, double xi);

struct MasterResult {
  std::vector<double> times;
  std::vector<Matrix> states;
  double halving_divergence = 0.0;  ///< max entry gap vs the dt/2 run
};

inline constexpr double kHalvingTol = 1e-6;

/// Classic RK4 on the grid. A second integration at dt/2 is compared at every
/// record point; a gap above `halving_tol` raises AccuracyError.
MasterResult propagate_master(const Operator& H0, const std::vector<LindbladChannel>& channels,
                              const DensityMatrix& rho0, const SimulationGrid& grid,
                              double halving_tol = kHalvingTol);

struct Liouvillian {
  Matrix matrix;
  Eigen::Index dim = 0;  ///< Hilbert-space dimension d (matrix is d²×d²)

  Vector apply(const Vector& v) const { return matrix * v; }
  Matrix apply(const Matrix& rho) const;
};

inline constexpr double kMaxLiouvillianEntries = 1e6;

Liouvillian build_liouvillian(const Operator& H0, const std::vector<LindbladChannel>& channels,
                              double max_entries = kMaxLiouvillianEntries);

/// ‖𝓛𝓛† − 𝓛†𝓛‖_F / ‖𝓛‖_F², zero for the zero map.
double normality_defect(const Liouvillian& L);

struct SpectralReport {
  Vector eigenvalues;
  Matrix right_eigenvectors;     ///< unit columns
  RealVector condition_numbers;  ///< κ_i ≥ 1
  double min_pair_gap = 0.0;
  double normality_defect = 0.0;
  double norm = 0.0;  ///< spectral norm of 𝓛
};

inline constexpr double kClusterTol = 1e-12;

/// Full eigendecomposition with eigenvalue condition numbers
/// κ_i = ‖w_i‖‖v_i‖/|w_i·v_i|. Eigenvalues within 1e−12 (relative to
/// max(1, spectral radius)) form a cluster whose members share κ = ‖P‖₂, the
/// norm of the cluster's spectral projector.
SpectralReport spectral_report(const Liouvillian& L);

struct EpOptions {
  double gap_rel_tol = 1e-3;  ///< pair gap threshold relative to ‖𝓛‖
  double kappa_tol = 1e3;
  int refine_rounds = 3;
};

struct EpScanPoint {
  double parameter = 0.0;
  double max_kappa = 1.0;
  double min_gap = 0.0;
  double pair_gap = 0.0;    ///< gap of the worst close pair (inf if none)
  double pair_kappa = 1.0;  ///< smaller κ of that pair
  double normality_defect = 0.0;
  double norm = 0.0;
  bool candidate = false;
};

struct EpCandidate {
  double parameter = 0.0;
  double kappa = 0.0;
  double gap = 0.0;
  std::size_t grid_index = 0;
};

struct EpScan {
  std::vector<EpScanPoint> points;
  std::vector<EpCandidate> candidates;
};

using LiouvillianFamily = std::function<Liouvillian(double)>;

/// Evaluate the family at every sweep value (OpenMP over points), flag points
/// where a close eigenvalue pair (gap < gap_rel_tol·‖𝓛‖) has both κ above
/// kappa_tol, then refine each run of flagged points by bisection toward the
/// largest κ. The family must be safe to call concurrently.
EpScan detect_ep(const LiouvillianFamily& model, const std::vector<double>& sweep,
                 const EpOptions& options = {});

/// Single-threaded reference for detect_ep; identical output.
EpScan detect_ep_serial(const LiouvillianFamily& model, const std::vector<double>& sweep,
                        const EpOptions& options = {});

EpScanPoint evaluate_ep_point(const Liouvillian& L, double parameter, const EpOptions& options);

/// Collective currents of D whose eigenvalue is below 1e−10: the noiseless
/// channels.
std::vector<CollectiveCurrent> dfs_kernel(const CorrelationMatrix& D, const std::vector<Operator>& Ks,
                                          double J = 1.0);

}  // namespace anyon
