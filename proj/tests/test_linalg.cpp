#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "anyon/correlation.hpp"
#include "anyon/errors.hpp"
#include "anyon/linalg.hpp"
#include "anyon/rng.hpp"
#include "anyon/state.hpp"

using namespace anyon;

namespace {

Matrix random_matrix(Eigen::Index n, std::mt19937_64& g) {
  std::normal_distribution<double> N;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(N(g), N(g));
  return m;
}

}  // namespace

TEST_CASE("Pauli matrices satisfy the su(2) relations") {
  const Matrix x = pauli_x(), y = pauli_y(), z = pauli_z(), id = Matrix::Identity(2, 2);
  CHECK((x * x - id).norm() < 1e-15);
  CHECK((commutator(x, y) - 2.0 * kI * z).norm() < 1e-15);
  CHECK((commutator(y, z) - 2.0 * kI * x).norm() < 1e-15);
  CHECK(anticommutator(x, z).norm() < 1e-15);
}

TEST_CASE("kron and column-stacking vec agree with vec(AXB) = (B^T kron A) vec(X)") {
  std::mt19937_64 g(3);
  for (int n : {2, 3}) {
    const Matrix A = random_matrix(n, g), B = random_matrix(n, g), X = random_matrix(n, g);
    CHECK((kron(B.transpose(), A) * vec(X) - vec(A * X * B)).norm() < 1e-12);
    CHECK((unvec(vec(X), n) - X).norm() == 0.0);
  }
  Matrix a(1, 2);
  a << 1.0, 2.0;
  Matrix b(2, 1);
  b << 3.0, kI;
  const Matrix k = kron(a, b);
  CHECK(k.rows() == 2);
  CHECK(k.cols() == 2);
  CHECK(k(1, 1) == 2.0 * kI);
}

TEST_CASE("trace distance, norms and projection") {
  Matrix p = Matrix::Zero(3, 3), q = Matrix::Zero(3, 3);
  p.diagonal() << 0.5, 0.3, 0.2;
  q.diagonal() << 0.1, 0.6, 0.3;
  CHECK(trace_distance(p, q) == doctest::Approx(0.5 * (0.4 + 0.3 + 0.1)).epsilon(1e-14));
  CHECK(operator_norm(pauli_x() + pauli_z()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(hermiticity_defect(pauli_y()) < 1e-16);
  CHECK(hermiticity_defect(kI * pauli_y()) > 1.0);

  Matrix bad = Matrix::Zero(2, 2);
  bad.diagonal() << 1.2, -0.2;
  const Matrix fixed = project_to_states(bad);
  CHECK(min_eigenvalue(fixed) >= 0.0);
  CHECK(fixed.trace().real() == doctest::Approx(1.0));
  CHECK(std::abs(fixed(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("phase and sign conventions") {
  Vector v(3);
  v << 0.0, cplx(0, -2), 1.0;
  fix_phase(v);
  CHECK(std::abs(v(1).imag()) < 1e-15);
  CHECK(v(1).real() > 0);
  RealVector r(2);
  r << -1.0, 2.0;
  fix_sign(r);
  CHECK(r(0) == 1.0);
}

TEST_CASE("correlation matrix validation") {
  CHECK_THROWS_AS(CorrelationMatrix(RealMatrix::Ones(2, 3)), ShapeError);
  RealMatrix ns(2, 2);
  ns << 1, 0.5, 0.4, 1;
  CHECK_THROWS_AS(CorrelationMatrix{ns}, ValidityError);
  RealMatrix neg(2, 2);
  neg << 1, 2, 2, 1;
  CHECK_THROWS_AS(CorrelationMatrix{neg}, ValidityError);
  Matrix cplx_h(2, 2);
  cplx_h << 1, kI * 0.5, -kI * 0.5, 1;
  CHECK_THROWS_AS(CorrelationMatrix(cplx_h, true), ValidityError);
  CHECK_NOTHROW(CorrelationMatrix(cplx_h, false));

  // tiny negative eigenvalue is clipped to zero
  RealMatrix almost(2, 2);
  almost << 1, 1 + 1e-11, 1 + 1e-11, 1;
  const CorrelationMatrix c(almost);
  CHECK(c.eigen().values(0) == 0.0);
  CHECK(c.rank_deficient());
}

TEST_CASE("two-link correlation eigensystem") {
  for (double xi : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    const auto c = CorrelationMatrix::two_link(xi);
    const auto& e = c.eigen();
    CHECK(e.values(0) == doctest::Approx(1 - std::abs(xi)).epsilon(1e-14));
    CHECK(e.values(1) == doctest::Approx(1 + std::abs(xi)).epsilon(1e-14));
    // eigen-equation and unit columns
    for (int k = 0; k < 2; ++k) {
      CHECK((c.entries() * e.vectors.col(k) - e.values(k) * e.vectors.col(k)).norm() < 1e-14);
      CHECK(e.vectors.col(k).norm() == doctest::Approx(1.0));
    }
    CHECK(c.rank_deficient() == (std::abs(xi) == 1.0));
  }
  CHECK_THROWS_AS(CorrelationMatrix::two_link(1.5), ValidityError);
}

TEST_CASE("density matrices") {
  CHECK_NOTHROW(DensityMatrix::from_bloch({0, 1, 0}));
  CHECK_THROWS_AS(DensityMatrix::from_bloch({1, 1, 0}), ValidityError);
  Matrix m = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix{m}, ValidityError);  // trace 2
  Matrix nh = 0.5 * Matrix::Identity(2, 2);
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{nh}, ValidityError);
  Vector psi(2);
  psi << 1.0, 1.0;
  CHECK_THROWS_AS(DensityMatrix::pure(psi), ValidityError);
  psi /= std::sqrt(2.0);
  const auto rho = DensityMatrix::pure(psi);
  CHECK(rho.purity() == doctest::Approx(1.0));
  CHECK(DensityMatrix::maximally_mixed(4).purity() == doctest::Approx(0.25));
  CHECK_THROWS_AS(DensityMatrix(Matrix::Zero(2, 3)), ShapeError);
}

TEST_CASE("simulation grid") {
  SimulationGrid g{1.0, 0.1, 3};
  CHECK(g.n_steps() == 10);
  CHECK(g.record_steps() == std::vector<long>{0, 3, 6, 9, 10});
  SimulationGrid h{1.0, 0.3, 1};
  CHECK(h.n_steps() == 4);
  SimulationGrid exact{250.0, 0.05, 5};
  CHECK(exact.n_steps() == 5000);
  CHECK(exact.record_times().back() == doctest::Approx(250.0));
  CHECK_THROWS_AS((SimulationGrid{1.0, 0.0, 1}.validate()), ParameterError);
  CHECK_THROWS_AS((SimulationGrid{1.0, 0.1, 0}.validate()), ParameterError);
  CHECK_THROWS_AS((SimulationGrid{-1.0, 0.1, 1}.validate()), ParameterError);
}

TEST_CASE("counter-based streams are reproducible and independent") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 100; ++k) {
    const auto x = a();
    CHECK(x == b());
    seen.insert(x);
    CHECK(x != c());
    CHECK(x != d());
  }
  CHECK(seen.size() == 100);

  // standard normal: mean and variance within 5 standard errors
  RngStream s(1, 0);
  const int n = 200000;
  double sum = 0, sq = 0, fourth = 0;
  for (int k = 0; k < n; ++k) {
    const double z = s.normal();
    sum += z;
    sq += z * z;
    fourth += z * z * z * z;
  }
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(fourth / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}
