#include "anyon/lindblad.hpp"

#include <cmath>
#include <sstream>

#include "anyon/errors.hpp"

namespace anyon {

namespace {

void require_rate(double r, const char* what) {
  if (!std::isfinite(r) || r < 0) {
    std::ostringstream os;
    os << what << " must be finite and >= 0 (got " << r << ")";
    throw ParameterError(os.str());
  }
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw ShapeError(std::string(who) + ": dimension mismatch");
}

// Precomputed right-hand side: −i[H,ρ] + Σ γ(LρL† − ½{L†L,ρ}).
class Generator {
 public:
  Generator(const Operator& H0, const std::vector<LindbladChannel>& channels) : h_(H0) {
    for (const auto& c : channels) {
      require_same_dim(H0, c.jump, "lindblad generator");
      if (c.rate == 0.0) continue;
      jumps_.push_back(c.jump);
      rates_.push_back(c.rate);
      ldl_.push_back(c.jump.adjoint() * c.jump);
    }
  }

  void operator()(const Matrix& rho, Matrix& out) const {
    out.noalias() = -kI * (h_ * rho);
    out.noalias() += kI * (rho * h_);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      const double g = rates_[k];
      out.noalias() += g * (jumps_[k] * rho * jumps_[k].adjoint());
      out.noalias() -= (0.5 * g) * (ldl_[k] * rho);
      out.noalias() -= (0.5 * g) * (rho * ldl_[k]);
    }
  }

 private:
  Matrix h_;
  std::vector<Matrix> jumps_;
  std::vector<double> rates_;
  std::vector<Matrix> ldl_;
};

struct Rk4 {
  const Generator& f;
  Matrix k1, k2, k3, k4, tmp;

  void step(Matrix& rho, double dt) {
    f(rho, k1);
    tmp = rho + (0.5 * dt) * k1;
    f(tmp, k2);
    tmp = rho + (0.5 * dt) * k2;
    f(tmp, k3);
    tmp = rho + dt * k3;
    f(tmp, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

}  // namespace

LindbladChannel LindbladChannel::dephasing(const Operator& K, double Gamma) {
  require_rate(Gamma, "dephasing rate");
  if (K.rows() != K.cols()) throw ShapeError("dephasing operator must be square");
  if (hermiticity_defect(K) > 1e-12) throw ValidityError("dephasing channel needs a Hermitian operator");
  return {K, Gamma, ChannelKind::hermitian_dephasing};
}

LindbladChannel LindbladChannel::relaxation(const Operator& L, double gamma) {
  require_rate(gamma, "relaxation rate");
  if (L.rows() != L.cols()) throw ShapeError("jump operator must be square");
  return {L, gamma, ChannelKind::relaxation};
}

Matrix dephasing_generator(const Operator& K, double Gamma, const Matrix& rho) {
  require_same_dim(K, rho, "dephasing_generator");
  if (hermiticity_defect(K) > 1e-12) throw ValidityError("dephasing_generator: K must be Hermitian");
  return -0.5 * Gamma * commutator(K, commutator(K, rho));
}

Matrix relaxation_generator(const Operator& L, double gamma, const Matrix& rho) {
  require_same_dim(L, rho, "relaxation_generator");
  require_rate(gamma, "relaxation rate");
  const Matrix ldl = L.adjoint() * L;
  return gamma * (L * rho * L.adjoint() - 0.5 * anticommutator(ldl, rho));
}

Matrix lindblad_rhs(const Operator& H0, const std::vector<LindbladChannel>& channels, const Matrix& rho) {
  require_same_dim(H0, rho, "lindblad_rhs");
  Generator g(H0, channels);
  Matrix out(rho.rows(), rho.cols());
  g(rho, out);
  return out;
}

std::vector<LindbladChannel> correlated_dephasing_channels(const std::vector<Operator>& Ks,
                                                           const CorrelationMatrix& Gamma) {
  // J = 1/√2 makes collective_currents' 2J²λ equal to λ(Γ)
  const auto modes = collective_currents(Ks, Gamma, std::sqrt(0.5));
  std::vector<LindbladChannel> out;
  for (const auto& m : modes) {
    if (m.eigenvalue == 0.0) continue;
    if (Gamma.classical()) out.push_back(LindbladChannel::dephasing(m.op, m.eigenvalue));
    else out.push_back(LindbladChannel::relaxation(m.op, m.eigenvalue));
  }
  return out;
}

std::vector<LindbladChannel> collective_loss_channels(const Operator& a1, const Operator& a2,
                                                      double gamma, double xi) {
  if (std::abs(xi) > 1.0) throw ValidityError("collective loss correlation |xi| must be <= 1");
  require_rate(gamma, "loss rate");
  return {LindbladChannel::relaxation(0.5 * std::sqrt(1.0 + xi) * (a1 + a2), gamma),
          LindbladChannel::relaxation(0.5 * std::sqrt(1.0 - xi) * (a1 - a2), gamma)};
}

MasterResult propagate_master(const Operator& H0, const std::vector<LindbladChannel>& channels,
                              const DensityMatrix& rho0, const SimulationGrid& grid, double halving_tol) {
  grid.validate();
  require_same_dim(H0, rho0.matrix(), "propagate_master");
  const Generator g(H0, channels);
  Rk4 coarse{g, {}, {}, {}, {}, {}};
  Rk4 fine{g, {}, {}, {}, {}, {}};

  MasterResult res;
  Matrix rho = rho0.matrix();
  Matrix rho_fine = rho;
  const long n = grid.n_steps();
  for (long k = 0;; ++k) {
    if (grid.records(k)) {
      res.times.push_back(double(k) * grid.dt);
      res.states.push_back(hermitian_part(rho));
      res.halving_divergence = std::max(res.halving_divergence, (rho - rho_fine).cwiseAbs().maxCoeff());
    }
    if (k == n) break;
    coarse.step(rho, grid.dt);
    fine.step(rho_fine, 0.5 * grid.dt);
    fine.step(rho_fine, 0.5 * grid.dt);
  }
  if (res.halving_divergence > halving_tol) {
    std::ostringstream os;
    os << "propagate_master: step-halving check failed (divergence " << res.halving_divergence
       << " > " << halving_tol << "); reduce grid.dt";
    throw AccuracyError(os.str());
  }
  return res;
}

Matrix Liouvillian::apply(const Matrix& rho) const { return unvec(matrix * vec(rho), dim); }

Liouvillian build_liouvillian(const Operator& H0, const std::vector<LindbladChannel>& channels,
                              double max_entries) {
  if (H0.rows() != H0.cols()) throw ShapeError("build_liouvillian: H0 must be square");
  const Eigen::Index d = H0.rows();
  const double entries = std::pow(double(d), 4);
  if (entries > max_entries) {
    std::ostringstream os;
    os << "build_liouvillian: superoperator would have " << entries << " entries (cap " << max_entries << ")";
    throw SizeError(os.str());
  }
  const Matrix id = Matrix::Identity(d, d);
  Liouvillian L;
  L.dim = d;
  L.matrix = -kI * (kron(id, H0) - kron(H0.transpose(), id));
  for (const auto& c : channels) {
    require_same_dim(H0, c.jump, "build_liouvillian");
    if (c.rate == 0.0) continue;
    const Matrix ldl = c.jump.adjoint() * c.jump;
    L.matrix += c.rate * (kron(c.jump.conjugate(), c.jump) -
                          0.5 * (kron(id, ldl) + kron(ldl.transpose(), id)));
  }
  return L;
}

std::vector<CollectiveCurrent> dfs_kernel(const CorrelationMatrix& D, const std::vector<Operator>& Ks,
                                          double J) {
  std::vector<CollectiveCurrent> out;
  for (auto& c : collective_currents(Ks, D, J))
    if (c.eigenvalue < kPsdTol) out.push_back(std::move(c));
  return out;
}

}  // namespace anyon
