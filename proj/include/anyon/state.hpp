#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "anyon/linalg.hpp"

namespace anyon {

inline constexpr double kStateHermitianTol = 1e-10;
inline constexpr double kStateTraceTol = 1e-10;
inline constexpr double kStatePsdTol = 1e-8;

/// Hermitian, unit-trace, positive-semidefinite operator.
class DensityMatrix {
 public:
  /// Validates Hermiticity, trace and positivity; throws ValidityError.
  explicit DensityMatrix(Matrix m);

  /// |ψ⟩⟨ψ| for a normalized ψ (tolerance 1e−12).
  static DensityMatrix pure(const Vector& psi);
  /// Qubit state (I + r·σ)/2, |r| <= 1.
  static DensityMatrix from_bloch(const std::array<double, 3>& r);
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  struct Unchecked {};
  DensityMatrix(Matrix m, Unchecked) : m_(std::move(m)) {}
  Matrix m_;

  friend DensityMatrix unchecked_state(Matrix m);
};

/// Wraps a matrix the caller has already validated (hot loops).
DensityMatrix unchecked_state(Matrix m);

/// Fixed time grid; n_steps = ceil(t_final/dt); states are recorded every
/// `record_stride` steps and always at the final step.
struct SimulationGrid {
  double t_final = 1.0;
  double dt = 1e-3;
  long record_stride = 1;

  void validate() const;
  long n_steps() const;
  bool records(long step) const { return step % record_stride == 0 || step == n_steps(); }
  std::vector<long> record_steps() const;
  std::vector<double> record_times() const;
};

}  // namespace anyon
