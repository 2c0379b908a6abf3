#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace anyon {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Dense operators are plain complex matrices; the Hilbert-space label lives
/// with whoever built them (see HilbertSpace).
using Operator = Matrix;

inline constexpr cplx kI{0.0, 1.0};

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }
inline Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

/// (A + A†)/2
Matrix hermitian_part(const Matrix& a);

/// max |A - A†| entry; cheap Hermiticity test.
double hermiticity_defect(const Matrix& a);

/// Largest singular value.
double operator_norm(const Matrix& a);

/// ½‖A − B‖₁ for Hermitian A, B.
double trace_distance(const Matrix& a, const Matrix& b);

/// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const Matrix& a);

/// Clip negative eigenvalues of a Hermitian matrix to zero and restore the
/// trace to one.
Matrix project_to_states(const Matrix& a);

/// Kronecker product a ⊗ b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Eigen::Index dim);

/// |ψ⟩⟨ψ|
Matrix projector(const Vector& psi);

/// Deterministic phase convention for eigenvectors: the first component with
/// modulus above `tol` is made real and positive.
void fix_phase(Eigen::Ref<Vector> v, double tol = 1e-12);
void fix_sign(Eigen::Ref<RealVector> v, double tol = 1e-12);

}  // namespace anyon
