#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "anyon/errors.hpp"
#include "anyon/operator_algebra.hpp"

using namespace anyon;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent construction from single-site matrices: site 0 is the leftmost
// Kronecker factor.
Matrix site_op(const Matrix& local, int site, int n_sites) {
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < n_sites; ++k) out = kron(out, k == site ? local : Matrix(Matrix::Identity(local.rows(), local.rows())));
  return out;
}

Matrix local_b(int cutoff) {
  Matrix b = Matrix::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) b(n - 1, n) = std::sqrt(double(n));
  return b;
}

Matrix local_phase(int cutoff, double theta) {
  Matrix p = Matrix::Zero(cutoff + 1, cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) p(n, n) = std::polar(1.0, theta * n);
  return p;
}

}  // namespace

TEST_CASE("Fock indexing puts site 0 in the most significant digit") {
  const HilbertSpace s(2, 1);
  CHECK(s.dim() == 4);
  CHECK(s.index_of(std::array<int, 2>{0, 1}) == 1);
  CHECK(s.index_of(std::array<int, 2>{1, 0}) == 2);
  CHECK(s.sector(1) == std::vector<std::size_t>{1, 2});
  const HilbertSpace t(3, 2);
  CHECK(t.dim() == 27);
  for (std::size_t i = 0; i < t.dim(); ++i) {
    std::array<int, 3> occ{t.occupation(i, 0), t.occupation(i, 1), t.occupation(i, 2)};
    CHECK(t.index_of(occ) == i);
  }
  CHECK(t.sector(1).size() == 3);
  CHECK(t.sector(2).size() == 6);
  CHECK_THROWS_AS(HilbertSpace(13, 1), SizeError);
  CHECK_THROWS_AS(HilbertSpace(0, 1), ParameterError);
  CHECK_THROWS_AS(t.index_of(std::array<int, 3>{0, 3, 0}), ParameterError);
}

TEST_CASE("Jordan-Wigner anyons match the Kronecker construction") {
  for (int cutoff : {1, 2}) {
    for (int n : {2, 3}) {
      const HilbertSpace space(n, cutoff);
      const double theta = 0.7;
      const auto ops = build_jw_anyon_ops(space, StatisticalAngle(theta));
      for (int j = 0; j < n; ++j) {
        Matrix string = Matrix::Identity(space.dim(), space.dim());
        for (int k = 0; k < j; ++k) string = string * site_op(local_phase(cutoff, theta), k, n);
        const Matrix expected = site_op(local_b(cutoff), j, n) * string;
        CHECK((ops[j] - expected).norm() < 1e-14);
        CHECK((number_operator(space, j) - site_op(local_b(cutoff).adjoint() * local_b(cutoff), j, n)).norm() <
              1e-14);
      }
    }
  }
}

TEST_CASE("distorted exchange algebra holds for random angles") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> U(0, 2 * kPi);
  for (int n : {2, 3}) {
    const HilbertSpace space(n, 1);
    for (int k = 0; k < 20; ++k) {
      const StatisticalAngle th(U(g));
      CHECK(verify_distorted_algebra(build_jw_anyon_ops(space, th), th) < 1e-12);
    }
  }
  // a wrong angle is detected
  const HilbertSpace space(2, 1);
  const auto ops = build_jw_anyon_ops(space, StatisticalAngle(0.4));
  CHECK(verify_distorted_algebra(ops, StatisticalAngle(0.9)) > 0.1);
  // on-site relations: hardcore a_j² = 0
  for (const auto& a : ops) CHECK((a * a).norm() < 1e-15);
}

TEST_CASE("boson and fermion limits") {
  const HilbertSpace space(2, 1);
  const auto bos = build_jw_anyon_ops(space, StatisticalAngle(0.0));
  CHECK(commutator(bos[0], bos[1]).norm() < 1e-15);
  const auto fer = build_jw_anyon_ops(space, StatisticalAngle(kPi));
  CHECK(anticommutator(fer[0], fer[1]).norm() < 1e-15);
  CHECK(anticommutator(fer[0], fer[1].adjoint()).norm() < 1e-15);
}

TEST_CASE("statistical angle reduction") {
  CHECK(StatisticalAngle(-kPi / 2).value() == doctest::Approx(1.5 * kPi));
  CHECK(StatisticalAngle(4 * kPi + 0.1).value() == doctest::Approx(0.1));
  CHECK_THROWS_AS(StatisticalAngle(std::nan("")), ParameterError);
}

TEST_CASE("exchange current on the single-excitation block") {
  const HilbertSpace space(2, 1);
  for (double theta : {0.0, 0.3, kPi / 2, 2.0, kPi}) {
    for (double delta : {0.0, kPi / 2}) {
      const StatisticalAngle th(theta);
      const auto ops = build_jw_anyon_ops(space, th);
      const Link link{0, 1, 1.0, delta};
      const Operator K = exchange_current(ops, link, th);
      CHECK(hermiticity_defect(K) < 1e-15);
      const Operator block = restrict_to(K, space.sector(1));
      CHECK((block - two_mode_K(StatisticalAngle(theta + delta))).norm() < 1e-14);
      // K = i(T − T†)
      const Operator T = hopping_operator(ops, link, th);
      CHECK((K - kI * (T - T.adjoint())).norm() < 1e-15);
    }
  }
  const auto ops = build_jw_anyon_ops(space, StatisticalAngle(0.1));
  CHECK_THROWS_AS(hopping_operator(ops, Link{0, 0}, StatisticalAngle(0.1)), ValidityError);
  CHECK_THROWS_AS(hopping_operator(ops, Link{0, 5}, StatisticalAngle(0.1)), ValidityError);
  std::vector<Operator> bad{Operator::Zero(2, 2), Operator::Zero(3, 3)};
  CHECK_THROWS_AS(verify_distorted_algebra(bad, StatisticalAngle(0.1)), ShapeError);
}

TEST_CASE("collective currents diagonalize the correlated noise") {
  const std::vector<Operator> Ks{two_mode_K(StatisticalAngle(0.4)), two_mode_K(StatisticalAngle(0.4 + kPi / 2))};
  const double J = 0.3;
  for (double xi : {-1.0, 0.0, 0.5, 1.0}) {
    const auto D = CorrelationMatrix::two_link(xi);
    const auto modes = collective_currents(Ks, D, J);
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].eigenvalue <= modes[1].eigenvalue);
    // Σ_ab D_ab K_a ⊗ K_b = Σ_ν λ_ν Q_ν ⊗ Q_ν
    Matrix lhs = Matrix::Zero(4, 4), rhs = Matrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) lhs += D.entries()(a, b) * kron(Ks[a], Ks[b]);
    for (const auto& m : modes) {
      rhs += m.eigenvalue * kron(m.op, m.op);
      CHECK(m.rate == doctest::Approx(2 * J * J * m.eigenvalue));
      CHECK(hermiticity_defect(m.op) < 1e-15);
    }
    CHECK((lhs - rhs).norm() < 1e-13);
  }
  CHECK_THROWS_AS(collective_currents({Ks[0]}, CorrelationMatrix::two_link(0.2)), ShapeError);
}
