#pragma once

#include "anyon/linalg.hpp"

namespace anyon {

/// Tolerances for accepting a correlation/rate matrix.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

/// Hermitian positive-semidefinite matrix of link-noise correlations
/// (D_ab, S_ab(0) or the rate matrix Γ_ab). The classical flag marks a real
/// symmetric matrix. Eigenvalues in [−1e−10, 0) are clipped to zero; anything
/// more negative is rejected at construction.
class CorrelationMatrix {
 public:
  struct Eigensystem {
    RealVector values;  ///< ascending, clipped at zero
    Matrix vectors;     ///< columns, first significant component real > 0
  };

  CorrelationMatrix(const Matrix& entries, bool classical);
  explicit CorrelationMatrix(const RealMatrix& entries);

  static CorrelationMatrix identity(Eigen::Index n);
  /// [[1, ξ], [ξ, 1]]
  static CorrelationMatrix two_link(double xi);

  Eigen::Index size() const { return entries_.rows(); }
  bool classical() const { return classical_; }
  const Matrix& entries() const { return entries_; }
  RealMatrix real_entries() const { return entries_.real(); }
  const Eigensystem& eigen() const { return eigen_; }

  /// Smallest eigenvalue below `tol`·max(1, largest).
  bool rank_deficient(double tol = kPsdTol) const;

  CorrelationMatrix scaled(double s) const;

 private:
  Matrix entries_;
  bool classical_;
  Eigensystem eigen_;
};

}  // namespace anyon
