// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "anyon/ensemble.hpp"
#include "anyon/lindblad.hpp"
#include "anyon/noise.hpp"
#include "anyon/operator_algebra.hpp"
#include "anyon/protection.hpp"
#include "anyon/stochastic.hpp"
#include "commands.hpp"

using namespace anyon;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double circular_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

Vector random_unit(Eigen::Index n, std::mt19937_64& g) {
  std::normal_distribution<double> N;
  Vector u(n);
  for (Eigen::Index k = 0; k < n; ++k) u(k) = cplx(N(g), N(g));
  return u.normalized();
}

Matrix random_hermitian(Eigen::Index n, std::mt19937_64& g) {
  std::normal_distribution<double> N;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(N(g), N(g));
  return 0.5 * (m + m.adjoint());
}

RealMatrix random_psd(Eigen::Index n, std::mt19937_64& g) {
  std::normal_distribution<double> N;
  RealMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = N(g);
  RealMatrix d = a * a.transpose() / double(n);
  if (n > 1 && g() % 3 == 0) {
    // a rank-deficient case every so often
    const RealVector v = a.col(0);
    d = v * v.transpose();
  }
  return d;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

// ------------------------------------------------------------------ 1

Outcome fig2_sweep() {
  const fs::path dir = fs::temp_directory_path() / ("anyon_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cmd = std::string(ANYON_SIM) + " sweep --preset fig2 --output-dir " + dir.string() + " >/dev/null";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "anyon-sim exited abnormally"};
  std::ifstream f(dir / "sweep.json");
  const auto env = nlohmann::json::parse(f);
  const auto& p = env.at("payload");
  const double step = kPi / 720;
  bool ok = p.at("theta_points") == 721 && p.at("curves").size() == 3;
  double worst = 0.0;
  std::vector<double> xis;
  for (const auto& c : p.at("curves")) {
    xis.push_back(c.at("xi").get<double>());
    worst = std::max(worst, circular_gap(c.at("argmin_theta").get<double>(), kPi / 2));
  }
  ok = ok && xis == std::vector<double>{0.0, 0.5, 0.9} && worst <= step + 1e-12 && secs < 5.0;
  fs::remove_all(dir);
  return {ok, "max |argmin - pi/2| = " + fmt(worst) + " (step " + fmt(step) + "), " + fmt(secs) + " s"};
}

// ------------------------------------------------------------------ 2

Outcome ensembles_vs_master() {
  const double J = 0.1;
  const auto G = rate_matrix({J}, CorrelationMatrix::identity(1));
  const double Gamma = G.entries()(0, 0).real();
  TrajectoryConfig c;
  c.H0 = Matrix::Zero(2, 2);
  c.Ks = {two_mode_K(StatisticalAngle(kPi / 2))};
  c.J = {J};
  c.noise = WienerNoise{1.0};
  c.correlation = CorrelationMatrix::identity(1);
  c.rho0 = DensityMatrix::from_bloch({0.0, 1.0, 0.0}).matrix();
  c.grid = {5.0 / 0.02, 0.05, 5};

  const auto t0 = std::chrono::steady_clock::now();
  const auto exact =
      propagate_master(c.H0, correlated_dephasing_channels(c.Ks, G), DensityMatrix(c.rho0), c.grid);
  double worst = 0.0;
  std::string per;
  for (Scheme s : {Scheme::stratonovich, Scheme::ito}) {
    c.scheme = s;
    const auto ens = ensemble_average(StochasticModel(c), 10000, 2024);
    double d = 0.0;
    for (std::size_t k = 0; k < ens.times.size(); ++k) d = std::max(d, trace_distance(ens.mean_states[k], exact.states[k]));
    worst = std::max(worst, d);
    per += " " + to_string(s) + "=" + fmt(d);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = std::abs(Gamma - 0.02) < 1e-15 && worst < 0.02 && secs < 300.0;
  return {ok, "Gamma=" + fmt(Gamma) + ", max trace distance" + per + ", " + fmt(secs) + " s"};
}

// ------------------------------------------------------------------ 3

Outcome two_link_spectrum() {
  const auto t0 = std::chrono::steady_clock::now();
  const double J = 0.1;
  const std::vector<Operator> Ks{two_mode_K(StatisticalAngle(kPi / 2)), two_mode_K(StatisticalAngle(kPi))};
  double worst = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double xi = -1.0 + 0.1 * k;
    const auto L = build_liouvillian(Matrix::Zero(2, 2),
                                     correlated_dephasing_channels(Ks, rate_matrix({J, J}, CorrelationMatrix::two_link(xi))));
    Eigen::ComplexEigenSolver<Matrix> es(L.matrix);
    std::vector<double> got;
    for (Eigen::Index i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(es.eigenvalues()(i).imag()));
      got.push_back(es.eigenvalues()(i).real());
    }
    // Bloch components along the two collective axes decay at 2γ of the other
    // mode, the out-of-plane one at 2(γ₊+γ₋)
    const double gp = 2 * J * J * (1 + xi), gm = 2 * J * J * (1 - xi);
    std::vector<double> want{0.0, -2 * gp, -2 * gm, -2 * (gp + gm)};
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    const auto r = two_link_rates(xi, J);
    worst = std::max({worst, std::abs(r[0] - gp), std::abs(r[1] - gm)});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-10 && secs < 1.0, "max eigenvalue mismatch " + fmt(worst) + ", " + fmt(secs) + " s"};
}

// ------------------------------------------------------------------ 4

Outcome survival_slope() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(404);
  std::uniform_real_distribution<double> U(0, 2 * kPi), R(0.01, 0.5);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector u = random_unit(2, g);
    const Operator K = two_mode_K(StatisticalAngle(U(g)));
    const double Gamma = R(g);
    const std::vector<LindbladChannel> ch{LindbladChannel::dephasing(K, Gamma)};
    auto survival = [&](double h) {
      const auto res = propagate_master(Matrix::Zero(2, 2), ch, DensityMatrix::pure(u), {h, h / 10, 10});
      return survival_probability(res.states.back(), u);
    };
    const double h = 1e-3;
    const double slope = 2 * (survival(h / 2) - 1) / (h / 2) - (survival(h) - 1) / h;
    worst = std::max(worst, std::abs(slope + Gamma * variance(K, u)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-6 && secs < 10.0, "max |slope + Gamma Var K| = " + fmt(worst) + ", " + fmt(secs) + " s"};
}

// ------------------------------------------------------------------ 5

Outcome normality() {
  std::mt19937_64 g(55);
  double defect = 0.0, imag = 0.0, kappa = 1.0;
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index d = 2 + Eigen::Index(g() % 3);
    const Eigen::Index links = 1 + Eigen::Index(g() % 2);
    std::vector<Operator> Ks;
    std::vector<double> J;
    for (Eigen::Index a = 0; a < links; ++a) {
      Ks.push_back(random_hermitian(d, g));
      J.push_back(0.1 + 0.9 * double(g() % 1000) / 1000.0);
    }
    const auto G = rate_matrix(J, CorrelationMatrix(random_psd(links, g)));
    const auto rep = spectral_report(build_liouvillian(Matrix::Zero(d, d), correlated_dephasing_channels(Ks, G)));
    defect = std::max(defect, rep.normality_defect);
    imag = std::max(imag, rep.eigenvalues.imag().cwiseAbs().maxCoeff());
    kappa = std::max(kappa, rep.condition_numbers.maxCoeff());
  }
  Matrix sm = Matrix::Zero(2, 2);
  sm(0, 1) = 1.0;
  const double lower =
      spectral_report(build_liouvillian(Matrix::Zero(2, 2), {LindbladChannel::relaxation(sm, 1.0)})).normality_defect;
  const bool ok = defect < 1e-12 && imag < 1e-10 && kappa < 1 + 1e-8 && lower > 0.1;
  return {ok, "defect " + fmt(defect) + ", max |Im| " + fmt(imag) + ", max kappa-1 " + fmt(kappa - 1) +
                  ", lowering-channel defect " + fmt(lower)};
}

// ------------------------------------------------------------------ 6

Outcome dfs_modes() {
  const double J = 0.1;
  const std::vector<Operator> Ks{two_mode_K(StatisticalAngle(kPi / 2)), two_mode_K(StatisticalAngle(kPi))};
  const double s = 1.0 / std::sqrt(2.0);
  bool ok = true;
  double drift = 0.0;
  for (double xi : {1.0, -1.0}) {
    const auto D = CorrelationMatrix::two_link(xi);
    const auto kernel = dfs_kernel(D, Ks, J);
    if (kernel.size() != 1) return {false, "kernel size " + std::to_string(kernel.size()) + " at xi=" + fmt(xi)};
    Vector want(2);
    want << s, (xi > 0 ? -s : s);
    const Vector c = kernel[0].coefficients;
    ok = ok && std::abs(std::abs(c.dot(want)) - 1.0) < 1e-12;

    // the state pinned by the noisy collective current
    const auto modes = collective_currents(Ks, D, J);
    const auto& noisy = modes.back();
    Eigen::SelfAdjointEigenSolver<Matrix> es(noisy.op);
    const Vector psi = es.eigenvectors().col(0);
    const auto res = propagate_master(Matrix::Zero(2, 2),
                                      correlated_dephasing_channels(Ks, rate_matrix({J, J}, D)),
                                      DensityMatrix::pure(psi), {10.0 / J, 0.05, 20});
    const cplx c0 = res.states.front()(0, 1);
    for (const auto& rho : res.states) drift = std::max(drift, std::abs(rho(0, 1) - c0));

    // same state under perfectly (anti)correlated phase noise
    TrajectoryConfig tc;
    tc.H0 = Matrix::Zero(2, 2);
    tc.Ks = Ks;
    tc.J = {J, J};
    tc.correlation = D;
    tc.rho0 = DensityMatrix::pure(psi).matrix();
    tc.grid = {10.0 / J, 0.05, 20};
    const auto ens = ensemble_average(StochasticModel(tc), 64, 6);
    for (const auto& rho : ens.mean_states) drift = std::max(drift, std::abs(rho(0, 1) - c0));
    ok = ok && std::abs(c0) > 0.49;
  }
  ok = ok && drift < 1e-8;
  return {ok, "one kernel mode each, coherence drift " + fmt(drift) + " over t=10/J"};
}

// ------------------------------------------------------------------ 7

Outcome ep_sweep() {
  using namespace anyon::cli;
  const auto t0 = std::chrono::steady_clock::now();
  Options ep;
  ep.command = "spectrum";
  const auto loss = run_command("spectrum", resolve_config(ep), 0);
  std::size_t good = 0;
  for (const auto& c : loss.payload.at("candidates")) {
    const double kappa = c.at("kappa").is_null() ? INFINITY : c.at("kappa").get<double>();
    const double norm = loss.table->rows.at(c.at("grid_index").get<std::size_t>()).at(6);
    if (kappa > 1e3 && c.at("gap").get<double>() < 1e-3 * norm) ++good;
  }
  Options herm;
  herm.command = "spectrum";
  herm.preset = "two-link-dfs";
  nlohmann::ordered_json xs = nlohmann::ordered_json::array();
  for (int k = 0; k <= 200; ++k) xs.push_back(-1.0 + 0.01 * k);
  herm.sets = {"system.manifold=full", "sweep.parameter=xi", "sweep.values=" + xs.dump()};
  const auto deph = run_command("spectrum", resolve_config(herm), 0);
  const std::size_t herm_cands = deph.payload.at("candidates").size();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {good >= 1 && herm_cands == 0 && secs < 30.0,
          std::to_string(good) + " loss candidate(s), " + std::to_string(herm_cands) + " dephasing candidate(s), " +
              fmt(secs) + " s"};
}

// ------------------------------------------------------------------ 8

Outcome optimal_angles() {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> U(0, 2 * kPi);
  const std::size_t N = 4096;
  const double step = kPi / N;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double phi = U(g);
    const BlochVector r(std::cos(phi), std::sin(phi), 0.0);
    const Vector u = r.pure_state();
    const double star = optimal_angle(r, 1.0).theta_star;
    std::size_t best = 0;
    double best_var = INFINITY;
    for (std::size_t i = 0; i < N; ++i) {
      const double v = variance(two_mode_K(StatisticalAngle(kPi * double(i) / N)), u);
      if (v < best_var) best_var = v, best = i;
    }
    worst = std::max(worst, circular_gap(star, kPi * double(best) / N) / step);
  }

  // r = (1,0,0) under arbitrary PSD correlations of identically phased links
  const BlochVector rx(1.0, 0.0, 0.0);
  const Vector ux = rx.pure_state();
  bool universal = std::abs(optimal_angle(rx, 1.0).theta_star - kPi / 2) < 1e-12;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index links = 2 + Eigen::Index(k % 2);
    const auto G = rate_matrix(std::vector<double>(std::size_t(links), 0.1), CorrelationMatrix(random_psd(links, g)));
    std::size_t best = 0;
    double best_rate = INFINITY;
    for (std::size_t i = 0; i < N; ++i) {
      const Operator K = two_mode_K(StatisticalAngle(kPi * double(i) / N));
      const double rate = multilink_rate(G, std::vector<Operator>(std::size_t(links), K), ux);
      if (rate < best_rate) best_rate = rate, best = i;
    }
    universal = universal && circular_gap(kPi * double(best) / N, kPi / 2) <= step + 1e-12 && best_rate < 1e-12;
  }
  return {worst <= 1.0 + 1e-9 && universal,
          "max |theta* - grid| = " + fmt(worst) + " steps; r=(1,0,0) optimum " + (universal ? "pi/2" : "not pi/2")};
}

// ------------------------------------------------------------------ 9

Outcome algebra() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> U(0, 2 * kPi);
  double worst = 0.0;
  for (int n : {2, 3}) {
    const HilbertSpace space(n, 1);
    for (int k = 0; k < 20; ++k) {
      const StatisticalAngle a(U(g));
      worst = std::max(worst, verify_distorted_algebra(build_jw_anyon_ops(space, a), a));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-12 && secs < 1.0, "max residual " + fmt(worst) + ", " + fmt(secs) + " s"};
}

// ------------------------------------------------------------------ 10

Outcome bath_rate() {
  std::mt19937_64 g(10);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    QuantumBathNoise q;
    q.spectrum.coupling = U(g);
    q.spectrum.temperature = U(g);
    q.spectrum.cutoff = 0.5 + U(g);
    const double J = U(g);
    const double want = 2 * J * J * 2 * q.spectrum.coupling * q.spectrum.temperature;
    worst = std::max(worst, std::abs(effective_rate(q, J) - want));
  }
  return {worst < 1e-12, "max deviation " + fmt(worst)};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{fig2_sweep,    ensembles_vs_master, two_link_spectrum,
                                                       survival_slope, normality,           dfs_modes,
                                                       ep_sweep,       optimal_angles,      algebra,
                                                       bath_rate};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
