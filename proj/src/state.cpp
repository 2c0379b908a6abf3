#include "anyon/state.hpp"

#include <sstream>

#include "anyon/errors.hpp"

namespace anyon {

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw ShapeError("density matrix must be square");
  if (hermiticity_defect(m_) > kStateHermitianTol) throw ValidityError("density matrix is not Hermitian");
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kStateTraceTol) {
    std::ostringstream os;
    os << "density matrix trace is " << tr;
    throw ValidityError(os.str());
  }
  m_ = hermitian_part(m_);
  const double lmin = min_eigenvalue(m_);
  if (lmin < -kStatePsdTol) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << lmin;
    throw ValidityError(os.str());
  }
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-12) throw ValidityError("state vector is not normalized");
  return DensityMatrix(projector(psi));
}

DensityMatrix DensityMatrix::from_bloch(const std::array<double, 3>& r) {
  const double len = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (len > 1.0 + 1e-12) throw ValidityError("Bloch vector longer than 1");
  Matrix m = 0.5 * (Matrix::Identity(2, 2) + r[0] * pauli_x() + r[1] * pauli_y() + r[2] * pauli_z());
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(Matrix(Matrix::Identity(dim, dim) / double(dim)));
}

DensityMatrix unchecked_state(Matrix m) { return DensityMatrix(std::move(m), DensityMatrix::Unchecked{}); }

void SimulationGrid::validate() const {
  if (!(t_final > 0) || !std::isfinite(t_final)) throw ParameterError("grid.t_final must be > 0");
  if (!(dt > 0) || !std::isfinite(dt)) throw ParameterError("grid.dt must be > 0");
  if (dt > t_final) throw ParameterError("grid.dt must not exceed grid.t_final");
  if (record_stride < 1) throw ParameterError("grid.record_stride must be >= 1");
}

long SimulationGrid::n_steps() const {
  // ceil with a relative guard against t_final/dt landing a hair above an integer
  const double ratio = t_final / dt;
  const double r = std::round(ratio);
  if (std::abs(ratio - r) <= 1e-9 * std::max(1.0, r)) return static_cast<long>(r);
  return static_cast<long>(std::ceil(ratio));
}

std::vector<long> SimulationGrid::record_steps() const {
  std::vector<long> out;
  const long n = n_steps();
  for (long k = 0; k <= n; ++k)
    if (records(k)) out.push_back(k);
  return out;
}

std::vector<double> SimulationGrid::record_times() const {
  std::vector<double> out;
  for (long k : record_steps()) out.push_back(double(k) * dt);
  return out;
}

}  // namespace anyon
