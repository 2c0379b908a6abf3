#include "anyon/operator_algebra.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "anyon/errors.hpp"

namespace anyon {

HilbertSpace::HilbertSpace(int n_sites, int cutoff, std::size_t max_dim)
    : n_sites_(n_sites), cutoff_(cutoff), dim_(1) {
  if (n_sites < 1) throw ParameterError("HilbertSpace: n_sites must be >= 1");
  if (cutoff < 1) throw ParameterError("HilbertSpace: occupancy cutoff must be >= 1");
  const std::size_t base = static_cast<std::size_t>(cutoff) + 1;
  stride_.assign(n_sites, 1);
  for (int k = 0; k < n_sites; ++k) {
    if (dim_ > max_dim / base)
      throw SizeError("HilbertSpace: dimension (" + std::to_string(base) + ")^" +
                      std::to_string(n_sites) + " exceeds cap " + std::to_string(max_dim));
    dim_ *= base;
  }
  for (int k = n_sites - 2; k >= 0; --k) stride_[k] = stride_[k + 1] * base;
}

int HilbertSpace::occupation(std::size_t index, int site) const {
  return static_cast<int>((index / stride_[site]) % (cutoff_ + 1));
}

std::size_t HilbertSpace::index_of(std::span<const int> occupations) const {
  if (static_cast<int>(occupations.size()) != n_sites_)
    throw ShapeError("HilbertSpace::index_of: wrong number of occupations");
  std::size_t idx = 0;
  for (int k = 0; k < n_sites_; ++k) {
    if (occupations[k] < 0 || occupations[k] > cutoff_)
      throw ParameterError("HilbertSpace::index_of: occupation out of range");
    idx += static_cast<std::size_t>(occupations[k]) * stride_[k];
  }
  return idx;
}

int HilbertSpace::total_occupation(std::size_t index) const {
  int n = 0;
  for (int k = 0; k < n_sites_; ++k) n += occupation(index, k);
  return n;
}

std::vector<std::size_t> HilbertSpace::sector(int n_particles) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dim_; ++i)
    if (total_occupation(i) == n_particles) out.push_back(i);
  return out;
}

StatisticalAngle::StatisticalAngle(double theta) {
  if (!std::isfinite(theta)) throw ParameterError("statistical angle must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  theta_ = std::fmod(theta, two_pi);
  if (theta_ < 0) theta_ += two_pi;
  if (theta_ >= two_pi) theta_ = 0.0;
}

Operator boson_annihilator(const HilbertSpace& space, int site) {
  if (site < 0 || site >= space.n_sites())
    throw ParameterError("boson_annihilator: site out of range");
  const auto d = static_cast<Eigen::Index>(space.dim());
  Operator b = Operator::Zero(d, d);
  // stride of `site` is (c+1)^(N-1-site)
  std::size_t stride = 1;
  for (int k = space.n_sites() - 1; k > site; --k) stride *= space.cutoff() + 1;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const int n = space.occupation(i, site);
    if (n > 0) b(static_cast<Eigen::Index>(i - stride), static_cast<Eigen::Index>(i)) = std::sqrt(double(n));
  }
  return b;
}

Operator number_operator(const HilbertSpace& space, int site) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  Operator n = Operator::Zero(d, d);
  for (std::size_t i = 0; i < space.dim(); ++i)
    n(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = double(space.occupation(i, site));
  return n;
}

std::vector<Operator> build_jw_anyon_ops(const HilbertSpace& space, StatisticalAngle theta) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  std::vector<Operator> ops;
  ops.reserve(space.n_sites());
  for (int j = 0; j < space.n_sites(); ++j) {
    Vector string(d);
    for (std::size_t i = 0; i < space.dim(); ++i) {
      int left = 0;
      for (int k = 0; k < j; ++k) left += space.occupation(i, k);
      string(static_cast<Eigen::Index>(i)) = std::polar(1.0, theta.value() * left);
    }
    ops.push_back(boson_annihilator(space, j) * string.asDiagonal());
  }
  return ops;
}

namespace {

void require_square_family(const std::vector<Operator>& ops, const char* who) {
  if (ops.empty()) return;
  const auto d = ops.front().rows();
  for (const auto& op : ops)
    if (op.rows() != op.cols() || op.rows() != d)
      throw ShapeError(std::string(who) + ": operators must be square with equal dimensions");
}

}  // namespace

double verify_distorted_algebra(const std::vector<Operator>& ops, StatisticalAngle theta) {
  require_square_family(ops, "verify_distorted_algebra");
  const cplx phase = std::polar(1.0, theta.value());
  double worst = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      const Operator& ai = ops[i];
      const Operator& aj = ops[j];
      const Matrix r1 = ai * aj - phase * (aj * ai);
      const Matrix r2 = ai * aj.adjoint() - std::conj(phase) * (aj.adjoint() * ai);
      worst = std::max({worst, operator_norm(r1), operator_norm(r2)});
    }
  }
  return worst;
}

Operator hopping_operator(const std::vector<Operator>& ops, const Link& link,
                          StatisticalAngle theta) {
  require_square_family(ops, "hopping_operator");
  const int n = static_cast<int>(ops.size());
  if (link.i == link.j) throw ValidityError("link endpoints must differ");
  if (link.i < 0 || link.j < 0 || link.i >= n || link.j >= n)
    throw ValidityError("link index out of range");
  return std::polar(1.0, theta.value() + link.phase_offset) *
         (ops[link.i].adjoint() * ops[link.j]);
}

Operator exchange_current(const std::vector<Operator>& ops, const Link& link,
                          StatisticalAngle theta) {
  const Operator t = hopping_operator(ops, link, theta);
  Operator k = kI * (t - t.adjoint());
  return hermitian_part(k);
}

Operator two_mode_K(StatisticalAngle theta) {
  return -std::sin(theta.value()) * pauli_x() + std::cos(theta.value()) * pauli_y();
}

Operator restrict_to(const Operator& op, const std::vector<std::size_t>& indices) {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Operator out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      out(r, c) = op(static_cast<Eigen::Index>(indices[r]), static_cast<Eigen::Index>(indices[c]));
  return out;
}

std::vector<CollectiveCurrent> collective_currents(const std::vector<Operator>& Ks,
                                                   const CorrelationMatrix& D, double J) {
  if (static_cast<Eigen::Index>(Ks.size()) != D.size())
    throw ShapeError("collective_currents: number of currents must match dim(D)");
  require_square_family(Ks, "collective_currents");
  const auto& es = D.eigen();
  std::vector<CollectiveCurrent> out;
  for (Eigen::Index nu = 0; nu < D.size(); ++nu) {
    CollectiveCurrent c;
    c.coefficients = es.vectors.col(nu);
    c.eigenvalue = es.values(nu);
    c.rate = 2.0 * J * J * c.eigenvalue;
    c.op = Operator::Zero(Ks.front().rows(), Ks.front().cols());
    for (std::size_t a = 0; a < Ks.size(); ++a) c.op += c.coefficients(static_cast<Eigen::Index>(a)) * Ks[a];
    if (D.classical()) c.op = hermitian_part(c.op);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace anyon
