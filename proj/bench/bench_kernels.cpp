// Serial reference versus OpenMP kernels. Usage: bench_kernels [n_traj]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <omp.h>

#include "anyon/ensemble.hpp"
#include "anyon/lindblad.hpp"
#include "anyon/operator_algebra.hpp"
#include "anyon/protection.hpp"

using namespace anyon;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-10s serial %8.3f s  parallel %8.3f s  speedup %5.2fx\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_traj = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 2000;
  std::printf("threads: %d\n", omp_get_max_threads());

  TrajectoryConfig c;
  c.H0 = Matrix::Zero(2, 2);
  c.Ks = {two_mode_K(StatisticalAngle(kPi / 2))};
  c.J = {0.1};
  c.rho0 = DensityMatrix::from_bloch({0.0, 1.0, 0.0}).matrix();
  c.grid = {250.0, 0.05, 5};
  for (Scheme s : {Scheme::stratonovich, Scheme::ito}) {
    c.scheme = s;
    const StochasticModel m(c);
    const double a = seconds([&] { ensemble_average_serial(m, n_traj, 1); });
    const double b = seconds([&] { ensemble_average(m, n_traj, 1); });
    report(to_string(s).c_str(), a, b);
  }

  std::vector<double> grid, xis;
  for (int k = 0; k < 4096; ++k) grid.push_back(kPi * k / 4096);
  for (int k = 0; k <= 20; ++k) xis.push_back(-1.0 + 0.1 * k);
  const TwoLinkModel tl;
  report("sweep", seconds([&] { sweep_theta_serial(xis, grid, tl); }), seconds([&] { sweep_theta(xis, grid, tl); }));

  // collective loss on the full two-site space, the EP family
  const HilbertSpace space(2, 1);
  const StatisticalAngle th(kPi / 2);
  const auto ops = build_jw_anyon_ops(space, th);
  const Operator H = -(hopping_operator(ops, {0, 1, 1.0, 0.0}, th) + hopping_operator(ops, {0, 1, 1.0, 0.0}, th).adjoint());
  const LiouvillianFamily fam = [&](double xi) {
    return build_liouvillian(H, collective_loss_channels(ops[0], ops[1], 8.0, xi));
  };
  std::vector<double> sweep;
  for (int k = 0; k <= 400; ++k) sweep.push_back(-1.0 + 0.005 * k);
  report("detect_ep", seconds([&] { detect_ep_serial(fam, sweep); }), seconds([&] { detect_ep(fam, sweep); }));
  return 0;
}
