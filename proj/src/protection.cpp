#include "anyon/protection.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "anyon/errors.hpp"
#include "anyon/noise.hpp"
#include "anyon/operator_algebra.hpp"

namespace anyon {

namespace {

constexpr double kPi = std::numbers::pi;

void check_state(const Operator& A, const Vector& u, const char* who) {
  if (A.rows() != A.cols() || A.rows() != u.size()) throw ShapeError(std::string(who) + ": dimension mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-12) throw ValidityError(std::string(who) + ": state vector is not normalized");
  if (hermiticity_defect(A) > 1e-12) throw ValidityError(std::string(who) + ": operator is not Hermitian");
}

double expect(const Operator& A, const Vector& u) { return u.dot(A * u).real(); }

double reduce_mod_pi(double t) {
  double r = std::fmod(t, kPi);
  if (r < 0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

}  // namespace

double variance(const Operator& K, const Vector& u) {
  check_state(K, u, "variance");
  const Vector ku = K * u;
  const double m = expect(K, u);
  const double v = ku.squaredNorm() - m * m;
  if (v < -1e-14) {
    std::ostringstream os;
    os << "variance: negative value " << v;
    throw NumericError(os.str());
  }
  return std::max(0.0, v);
}

double covariance(const Operator& A, const Operator& B, const Vector& u) {
  check_state(A, u, "covariance");
  check_state(B, u, "covariance");
  // ⟨½{A,B}⟩ = Re⟨Au|Bu⟩ for Hermitian A, B
  return (A * u).dot(B * u).real() - expect(A, u) * expect(B, u);
}

BlochVector::BlochVector(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) throw ValidityError("Bloch vector must be finite");
  if (std::sqrt(x * x + y * y + z * z) > 1.0 + 1e-12) throw ValidityError("Bloch vector longer than 1");
}

double BlochVector::in_plane_norm() const { return std::hypot(x, y); }

Vector BlochVector::pure_state() const {
  const double len = std::sqrt(x * x + y * y + z * z);
  if (std::abs(len - 1.0) > 1e-12) throw ValidityError("pure_state needs a unit Bloch vector");
  const double alpha = std::acos(std::clamp(z / len, -1.0, 1.0));
  const double phi = std::atan2(y, x);
  Vector u(2);
  u << std::cos(alpha / 2), std::polar(std::sin(alpha / 2), phi);
  return u;
}

std::array<double, 3> current_axis(double theta) { return {-std::sin(theta), std::cos(theta), 0.0}; }

double dephasing_rate_bloch(double theta, double Gamma, const BlochVector& r) {
  if (!(Gamma >= 0) || !std::isfinite(Gamma)) throw ParameterError("Gamma must be finite and >= 0");
  const auto n = current_axis(theta);
  const double p = n[0] * r.x + n[1] * r.y;
  return Gamma * (1.0 - p * p);
}

double effective_lifetime(double theta, double Gamma, double gamma_res, const BlochVector& r) {
  if (!(gamma_res >= 0) || !std::isfinite(gamma_res)) throw ParameterError("gamma_res must be finite and >= 0");
  const double total = gamma_res + dephasing_rate_bloch(theta, Gamma, r);
  if (total < 1e-15) return std::numeric_limits<double>::infinity();
  return 1.0 / total;
}

ProtectionReport optimal_angle(const BlochVector& r, double Gamma, double gamma_res, std::size_t grid_points) {
  if (grid_points == 0) throw ParameterError("optimal_angle: grid needs at least one point");
  ProtectionReport rep;
  const double rpar = r.in_plane_norm();
  rep.undefined = rpar < kUndefinedInPlaneNorm;
  rep.theta_star = rep.undefined ? 0.0 : reduce_mod_pi(kPi / 2 + std::atan2(r.y, r.x));
  rep.gamma_min = Gamma * (1.0 - rpar * rpar);

  rep.grid_step = kPi / double(grid_points);
  rep.theta_grid.resize(grid_points);
  rep.gamma_of_theta.resize(grid_points);
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid_points; ++k) {
    rep.theta_grid[k] = double(k) * rep.grid_step;
    rep.gamma_of_theta[k] = dephasing_rate_bloch(rep.theta_grid[k], Gamma, r);
    if (rep.gamma_of_theta[k] < rep.gamma_of_theta[best]) best = k;
  }
  rep.grid_argmin = rep.theta_grid[best];

  rep.lifetime = effective_lifetime(rep.theta_star, Gamma, gamma_res, r);
  rep.lifetime_infinite = std::isinf(rep.lifetime);
  return rep;
}

double multilink_rate(const CorrelationMatrix& Gamma, const std::vector<Operator>& Ks, const Vector& u) {
  if (static_cast<Eigen::Index>(Ks.size()) != Gamma.size())
    throw ShapeError("multilink_rate: one current per rate-matrix row is required");
  const auto n = Gamma.size();
  double rate = 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const cplx g = Gamma.entries()(a, b);
      if (g == cplx(0.0)) continue;
      rate += (g * covariance(Ks[a], Ks[b], u)).real();
    }
  return rate;
}

std::array<double, 2> two_link_rates(double xi, double J) {
  if (!(std::abs(xi) <= 1.0)) throw ValidityError("two_link_rates: |xi| must be <= 1");
  return {2.0 * J * J * (1.0 + xi), 2.0 * J * J * (1.0 - xi)};
}

namespace {

void validate_sweep(const std::vector<double>& xi_values, const std::vector<double>& theta_grid,
                    const TwoLinkModel& m) {
  if (xi_values.empty()) throw ParameterError("sweep: xi list must be nonempty");
  if (theta_grid.empty()) throw ParameterError("sweep: theta grid must be nonempty");
  for (double xi : xi_values)
    if (!(std::abs(xi) <= 1.0)) throw ValidityError("sweep: |xi| must be <= 1");
  if (!(m.J > 0) || !std::isfinite(m.J)) throw ParameterError("sweep: J must be > 0");
  if (!(m.noise_intensity >= 0)) throw ParameterError("sweep: noise intensity must be >= 0");
}

double sweep_point(double xi, double theta, const TwoLinkModel& m, const Vector& u) {
  const CorrelationMatrix D = CorrelationMatrix::two_link(xi).scaled(m.noise_intensity);
  const CorrelationMatrix G = rate_matrix({m.J, m.J}, D);
  const std::vector<Operator> Ks{two_mode_K(StatisticalAngle(theta + m.phase_offsets[0])),
                                 two_mode_K(StatisticalAngle(theta + m.phase_offsets[1]))};
  return multilink_rate(G, Ks, u) / m.J;
}

SweepTable assemble(const std::vector<double>& xi_values, const std::vector<double>& theta_grid,
                    std::vector<double> values) {
  SweepTable t;
  t.theta = theta_grid;
  const std::size_t nt = theta_grid.size();
  for (std::size_t x = 0; x < xi_values.size(); ++x) {
    SweepCurve c;
    c.xi = xi_values[x];
    c.gamma_over_J.assign(values.begin() + long(x * nt), values.begin() + long((x + 1) * nt));
    for (std::size_t k = 1; k < nt; ++k)
      if (c.gamma_over_J[k] < c.gamma_over_J[c.argmin_index]) c.argmin_index = k;
    c.argmin_theta = theta_grid[c.argmin_index];
    c.min_value = c.gamma_over_J[c.argmin_index];
    t.curves.push_back(std::move(c));
  }
  return t;
}

}  // namespace

SweepTable sweep_theta_serial(const std::vector<double>& xi_values, const std::vector<double>& theta_grid,
                              const TwoLinkModel& model) {
  validate_sweep(xi_values, theta_grid, model);
  const Vector u = model.state.pure_state();
  const std::size_t nt = theta_grid.size();
  std::vector<double> values(xi_values.size() * nt);
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = sweep_point(xi_values[i / nt], theta_grid[i % nt], model, u);
  return assemble(xi_values, theta_grid, std::move(values));
}

SweepTable sweep_theta(const std::vector<double>& xi_values, const std::vector<double>& theta_grid,
                       const TwoLinkModel& model) {
  validate_sweep(xi_values, theta_grid, model);
  const Vector u = model.state.pure_state();
  const std::size_t nt = theta_grid.size();
  const long total = static_cast<long>(xi_values.size() * nt);
  std::vector<double> values(static_cast<std::size_t>(total));
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    try {
      values[i] = sweep_point(xi_values[i / nt], theta_grid[i % nt], model, u);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(xi_values, theta_grid, std::move(values));
}

}  // namespace anyon
