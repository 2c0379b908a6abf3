#include "anyon/stochastic.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "anyon/errors.hpp"
#include "anyon/lindblad.hpp"
#include "anyon/rng.hpp"

namespace anyon {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::stratonovich: return "stratonovich";
    case Scheme::ito: return "ito";
    case Scheme::exponential: return "exponential";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "stratonovich") return Scheme::stratonovich;
  if (name == "ito") return Scheme::ito;
  if (name == "exponential") return Scheme::exponential;
  throw ParameterError("unknown scheme '" + name + "' (stratonovich, ito, exponential)");
}

namespace {

using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxLinks, 1>;

void check_square(const Matrix& m, Eigen::Index d, const char* what) {
  if (m.rows() != d || m.cols() != d) {
    std::ostringstream os;
    os << what << " must be " << d << "x" << d << " (got " << m.rows() << "x" << m.cols() << ")";
    throw ShapeError(os.str());
  }
}

}  // namespace

StochasticModel::StochasticModel(TrajectoryConfig config)
    : cfg_(std::move(config)), gamma_(CorrelationMatrix::identity(1)), link_d_(CorrelationMatrix::identity(1)) {
  const Eigen::Index d = cfg_.H0.rows();
  if (d == 0) throw ShapeError("H0 must not be empty");
  check_square(cfg_.H0, d, "H0");
  if (hermiticity_defect(cfg_.H0) > 1e-12) throw ValidityError("H0 must be Hermitian");
  if (cfg_.Ks.empty()) throw ParameterError("at least one link current is required");
  if (cfg_.Ks.size() != cfg_.J.size()) throw ShapeError("one amplitude per link current is required");
  if (static_cast<Eigen::Index>(cfg_.Ks.size()) != cfg_.correlation.size())
    throw ShapeError("correlation matrix size must equal the number of links");
  if (static_cast<Eigen::Index>(cfg_.Ks.size()) > kMaxLinks) throw ParameterError("too many links (max 16)");
  for (const auto& K : cfg_.Ks) {
    check_square(K, d, "link current");
    if (hermiticity_defect(K) > 1e-12) throw ValidityError("link currents must be Hermitian");
  }
  if (!cfg_.correlation.classical()) throw ValidityError("trajectory noise needs a real correlation matrix");
  validate(cfg_.noise);
  cfg_.grid.validate();
  if (!(cfg_.projection_limit > 0)) throw ParameterError("projection_limit must be > 0");
  if (!(cfg_.divergence_limit > 1)) throw ParameterError("divergence_limit must be > 1");
  if (cfg_.scheme == Scheme::ito && !is_white(cfg_.noise))
    throw ParameterError("the Ito scheme needs white noise (wiener or quantum_bath)");
  cfg_.rho0 = DensityMatrix(cfg_.rho0).matrix();
  check_square(cfg_.rho0, d, "initial state");

  const double s = noise_intensity(cfg_.noise);
  link_d_ = cfg_.correlation.scaled(s);
  gamma_ = anyon::rate_matrix(cfg_.J, link_d_);
  for (const auto& ch : correlated_dephasing_channels(cfg_.Ks, gamma_)) drift_.push_back({ch.jump, ch.rate});
  h0_zero_ = cfg_.H0.cwiseAbs().maxCoeff() == 0.0;
}

Matrix StochasticModel::lindblad_rhs(const Matrix& rho) const {
  Matrix out = -kI * commutator(cfg_.H0, rho);
  for (const auto& c : drift_) out += dephasing_generator(c.op, c.rate, rho);
  return out;
}

namespace {

// Allocation-free trajectory kernel over matrix type Mat (fixed-capacity for
// small dimensions, dynamic otherwise).
template <class Mat>
class Kernel {
 public:
  Kernel(const StochasticModel& model, const CorrelationMatrix& link_d, const std::vector<StochasticModel::Collective>& drift,
         bool h0_zero)
      : cfg_(model.config()), d_(model.dim()), h0_zero_(h0_zero) {
    h0dt_ = Mat(cfg_.H0 * cfg_.grid.dt);
    for (std::size_t a = 0; a < cfg_.Ks.size(); ++a) jk_.push_back(Mat(cfg_.J[a] * cfg_.Ks[a]));
    for (const auto& c : drift) {
      drift_ops_.push_back(Mat(c.op));
      drift_rates_.push_back(c.rate);
    }
    if (is_white(cfg_.noise)) {
      white_.emplace(link_d, cfg_.grid.dt);
    } else {
      const auto& ou = std::get<OrnsteinUhlenbeckNoise>(cfg_.noise);
      ou_.emplace(ou.sigma, ou.tau_c, cfg_.grid.dt, cfg_.correlation);
    }
    es_ = Eigen::SelfAdjointEigenSolver<Mat>(d_);
  }

  void run(std::uint64_t seed, std::uint64_t stream_id, const StochasticModel::Observer& observe) {
    RngStream rng(seed, stream_id);
    const auto n_links = static_cast<Eigen::Index>(jk_.size());
    SmallVector dphi(n_links), x(n_links), x_next(n_links);
    if (ou_) ou_->start(rng, x);

    rho_ = Mat(cfg_.rho0);
    const long n = cfg_.grid.n_steps();
    const double dt = cfg_.grid.dt;
    std::size_t rec = 0;
    for (long k = 0;; ++k) {
      if (cfg_.grid.records(k)) {
        if (!rho_.allFinite()) fail(k, stream_id, "state became non-finite");
        out_ = rho_;
        observe(rec++, double(k) * dt, out_);
      }
      if (k == n) break;

      if (white_) {
        white_->draw(rng, dphi);
      } else {
        x_next = x;
        ou_->advance(rng, x_next);
        dphi = 0.5 * dt * (x + x_next);
        x = x_next;
      }
      // M = H₀dt + Σ J_a K_a dφ_a
      if (h0_zero_) mgen_.setZero(d_, d_);
      else mgen_ = h0dt_;
      for (Eigen::Index a = 0; a < n_links; ++a) mgen_ += dphi(a) * jk_[a];

      switch (cfg_.scheme) {
        case Scheme::stratonovich: heun(k, stream_id); break;
        case Scheme::ito: euler_maruyama(k, stream_id, dt); break;
        case Scheme::exponential: exponential(); break;
      }
    }
  }

 private:
  // out = −i[M, x]
  void lvn(const Mat& x, Mat& out) {
    out.noalias() = mgen_.lazyProduct(x);
    out.noalias() -= x.lazyProduct(mgen_);
    out *= -kI;
  }

  void heun(long k, std::uint64_t id) {
    lvn(rho_, a_);
    pred_ = rho_ + a_;
    lvn(pred_, b_);
    rho_ += 0.5 * (a_ + b_);
    restore_state(k, id);
  }

  void euler_maruyama(long k, std::uint64_t id, double dt) {
    lvn(rho_, a_);
    for (std::size_t c = 0; c < drift_ops_.size(); ++c) {
      const Mat& q = drift_ops_[c];
      // −½γ[Q,[Q,ρ]] = −½γ(QQρ − 2QρQ + ρQQ)
      b_.noalias() = q.lazyProduct(rho_);
      pred_.noalias() = b_.lazyProduct(q);
      c_.noalias() = q.lazyProduct(b_);
      b_ = c_.adjoint();
      c_ += b_;
      a_ += (-0.5 * drift_rates_[c] * dt) * (c_ - 2.0 * pred_);
    }
    rho_ += a_;
    // ‖ρ‖₁ ≤ √d‖ρ‖_F, exact check only when the bound trips
    const double bound = std::sqrt(double(d_)) * rho_.norm();
    if (!(bound <= cfg_.divergence_limit)) {
      if (!rho_.allFinite()) fail(k + 1, id, "Ito trajectory became non-finite");
      es_.compute(Mat(0.5 * (rho_ + rho_.adjoint())), Eigen::EigenvaluesOnly);
      const double tn = es_.eigenvalues().cwiseAbs().sum();
      if (tn > cfg_.divergence_limit) {
        std::ostringstream os;
        os << "Ito trajectory diverged (trace norm " << tn << " > " << cfg_.divergence_limit << ")";
        fail(k + 1, id, os.str());
      }
    }
  }

  void exponential() {
    es_.compute(mgen_);
    const auto& v = es_.eigenvectors();
    a_.noalias() = v * (-kI * es_.eigenvalues().template cast<cplx>()).array().exp().matrix().asDiagonal() *
                   v.adjoint();
    b_.noalias() = a_ * rho_;
    rho_.noalias() = b_ * a_.adjoint();
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
  }

  // Hermitize, fix the trace, clip negative eigenvalues.
  void restore_state(long k, std::uint64_t id) {
    a_ = rho_.adjoint();
    rho_ = 0.5 * (rho_ + a_);
    const cplx tr = rho_.trace();
    if (!std::isfinite(tr.real()) || tr.real() <= 0) fail(k + 1, id, "trace collapsed");
    rho_ /= tr.real();
    double lmin;
    if (d_ == 2) {
      const double p = rho_(0, 0).real(), q = rho_(1, 1).real();
      lmin = 0.5 * (p + q) - std::sqrt(0.25 * (p - q) * (p - q) + std::norm(rho_(0, 1)));
    } else {
      es_.compute(rho_, Eigen::EigenvaluesOnly);
      lmin = es_.eigenvalues()(0);
    }
    if (!std::isfinite(lmin)) fail(k + 1, id, "state became non-finite");
    if (lmin >= -cfg_.positivity_tolerance) return;
    if (lmin < -cfg_.projection_limit) {
      std::ostringstream os;
      os << "negativity " << -lmin << " exceeds projection_limit " << cfg_.projection_limit;
      fail(k + 1, id, os.str());
    }
    es_.compute(rho_);
    auto w = es_.eigenvalues().cwiseMax(0.0).eval();
    w /= w.sum();
    rho_.noalias() = es_.eigenvectors() * w.template cast<cplx>().asDiagonal() * es_.eigenvectors().adjoint();
  }

  [[noreturn]] void fail(long step, std::uint64_t id, const std::string& what) {
    std::ostringstream os;
    os << to_string(cfg_.scheme) << " trajectory " << id << " aborted at step " << step << ": " << what;
    throw TrajectoryError(os.str(), step, id);
  }

  const TrajectoryConfig& cfg_;
  Eigen::Index d_;
  bool h0_zero_;
  Mat h0dt_;
  std::vector<Mat> jk_;
  std::vector<Mat> drift_ops_;
  std::vector<double> drift_rates_;
  std::optional<IncrementSampler> white_;
  std::optional<OuSampler> ou_;
  Eigen::SelfAdjointEigenSolver<Mat> es_;
  Mat rho_, mgen_, a_, b_, c_, pred_;
  Matrix out_;
};

using SmallMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;

}  // namespace

void StochasticModel::run(std::uint64_t master_seed, std::uint64_t stream_id, const Observer& observe) const {
  if (dim() <= 8) {
    Kernel<SmallMat> k(*this, link_d_, drift_, h0_zero_);
    k.run(master_seed, stream_id, observe);
  } else {
    Kernel<Matrix> k(*this, link_d_, drift_, h0_zero_);
    k.run(master_seed, stream_id, observe);
  }
}

TrajectoryResult run_trajectory(const StochasticModel& model, std::uint64_t master_seed, std::uint64_t stream_id) {
  TrajectoryResult r;
  r.stream_id = stream_id;
  model.run(master_seed, stream_id, [&](std::size_t, double t, const Matrix& rho) {
    r.times.push_back(t);
    r.states.push_back(rho);
  });
  return r;
}

double survival_probability(const Matrix& rho, const Vector& psi) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size()) throw ShapeError("survival_probability: size mismatch");
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

Matrix mean_step_map(const StochasticModel& model) {
  const auto& cfg = model.config();
  if (cfg.scheme == Scheme::exponential) throw ParameterError("mean_step_map: the exponential scheme is not linear");
  if (!is_white(cfg.noise)) throw ParameterError("mean_step_map: needs white noise");
  const Eigen::Index d = model.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix F = -kI * (kron(id, cfg.H0) - kron(cfg.H0.transpose(), id));
  std::vector<LindbladChannel> chans = correlated_dephasing_channels(cfg.Ks, model.rate_matrix());
  const Matrix D = build_liouvillian(Matrix::Zero(d, d), chans).matrix;
  const double dt = cfg.grid.dt;
  Matrix M = Matrix::Identity(d * d, d * d) + (F + D) * dt;
  if (cfg.scheme == Scheme::stratonovich) M += 0.5 * F * F * dt * dt;
  return M;
}

}  // namespace anyon
