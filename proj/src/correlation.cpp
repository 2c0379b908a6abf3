#include "anyon/correlation.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

#include "anyon/errors.hpp"

namespace anyon {

CorrelationMatrix::CorrelationMatrix(const Matrix& entries, bool classical)
    : entries_(entries), classical_(classical) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw ShapeError("correlation matrix must be square and non-empty");
  if (!entries.allFinite()) throw ValidityError("correlation matrix has non-finite entries");
  if (hermiticity_defect(entries) > kHermitianTol)
    throw ValidityError("correlation matrix is not Hermitian");
  if (classical && entries.imag().cwiseAbs().maxCoeff() > 0.0)
    throw ValidityError("classical correlation matrix must be real");
  entries_ = hermitian_part(entries);

  RealVector values;
  if (classical_) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(entries_.real());
    if (es.info() != Eigen::Success) throw NumericError("correlation matrix eigensolver failed");
    values = es.eigenvalues();
    RealMatrix vecs = es.eigenvectors();
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) fix_sign(vecs.col(k));
    eigen_.vectors = vecs.cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries_);
    if (es.info() != Eigen::Success) throw NumericError("correlation matrix eigensolver failed");
    values = es.eigenvalues();
    eigen_.vectors = es.eigenvectors();
    for (Eigen::Index k = 0; k < eigen_.vectors.cols(); ++k) fix_phase(eigen_.vectors.col(k));
  }
  if (values(0) < -kPsdTol) {
    std::ostringstream os;
    os << "correlation matrix is not positive semidefinite (min eigenvalue " << values(0) << ")";
    throw ValidityError(os.str());
  }
  eigen_.values = values.cwiseMax(0.0);
}

CorrelationMatrix::CorrelationMatrix(const RealMatrix& entries)
    : CorrelationMatrix(Matrix(entries.cast<cplx>()), true) {}

CorrelationMatrix CorrelationMatrix::identity(Eigen::Index n) {
  return CorrelationMatrix(RealMatrix(RealMatrix::Identity(n, n)));
}

CorrelationMatrix CorrelationMatrix::two_link(double xi) {
  RealMatrix d(2, 2);
  d << 1.0, xi, xi, 1.0;
  return CorrelationMatrix(d);
}

bool CorrelationMatrix::rank_deficient(double tol) const {
  const double top = std::max(1.0, eigen_.values.maxCoeff());
  return eigen_.values(0) <= tol * top;
}

CorrelationMatrix CorrelationMatrix::scaled(double s) const {
  if (s < 0) throw ParameterError("correlation scale must be >= 0");
  return CorrelationMatrix(Matrix(entries_ * s), classical_);
}

}  // namespace anyon
