#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "anyon/ensemble.hpp"
#include "anyon/errors.hpp"
#include "anyon/protection.hpp"

namespace anyon::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlgebraTol = 1e-10;

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

double reduce_mod_pi(double t) {
  double r = std::fmod(t, kPi);
  if (r < 0) r += kPi;
  return r >= kPi ? 0.0 : r;
}

// ---------------------------------------------------------------- algebra

CommandResult cmd_algebra(const RunConfig& rc) {
  const HilbertSpace space(rc.n_sites, rc.cutoff);
  CommandResult out;
  json thetas = json::array(), residuals = json::array();
  double worst = 0.0;
  for (long k = 0; k < rc.algebra_theta_points; ++k) {
    const double theta = 2.0 * kPi * double(k) / double(rc.algebra_theta_points);
    const StatisticalAngle a(theta);
    const double res = verify_distorted_algebra(build_jw_anyon_ops(space, a), a);
    thetas.push_back(theta);
    residuals.push_back(res);
    worst = std::max(worst, res);
  }
  const bool hardcore = space.hardcore();
  out.payload = {{"n_sites", rc.n_sites},  {"cutoff", rc.cutoff},   {"dim", space.dim()},
                 {"theta", thetas},        {"residual", residuals}, {"max_residual", worst},
                 {"tolerance", kAlgebraTol}, {"hardcore", hardcore}, {"advisory", !hardcore}};
  std::ostringstream s;
  s << "algebra-check: max residual " << format_double(worst) << " over " << rc.algebra_theta_points << " angles";
  if (!hardcore) {
    out.payload["warning"] = "soft-core truncation: the exchange algebra is reported as advisory only";
    s << " (soft-core, advisory)";
  } else if (!(worst < kAlgebraTol)) {
    out.exit_code = kAssertion;
    s << " exceeds " << kAlgebraTol;
  }
  out.summary = s.str();
  return out;
}

// ---------------------------------------------------------------- sweep

CommandResult cmd_sweep(const RunConfig& rc) {
  if (rc.links.size() != 2) throw ConfigError("system.links: the theta sweep needs exactly two links");
  std::vector<double> xis = rc.sweep.values;
  if (rc.sweep.parameter == "none" || xis.empty()) xis = {rc.correlation(0, 1).real()};
  else if (rc.sweep.parameter != "xi") throw ConfigError("sweep.parameter: the theta sweep varies xi");
  const auto& b = rc.initial_state;
  if (b.at("kind") != "bloch") throw ConfigError("initial_state.kind: the theta sweep needs a Bloch state");
  const auto r = b.at("bloch").get<std::vector<double>>();
  if (r.size() != 3) throw ConfigError("initial_state.bloch: expected three components");

  TwoLinkModel m;
  m.J = rc.links[0].amplitude;
  if (rc.links[1].amplitude != m.J) throw ConfigError("system.links: both links need the same amplitude");
  m.noise_intensity = noise_intensity(rc.noise);
  m.phase_offsets = {rc.links[0].phase_offset, rc.links[1].phase_offset};
  m.state = BlochVector(r[0], r[1], r[2]);

  const auto grid = rc.sweep.theta_grid();
  const SweepTable t = sweep_theta(xis, grid, m);
  CommandResult out;
  Table tab{{"xi", "theta", "gamma_over_J"}, {}};
  json curves = json::array();
  std::ostringstream s;
  s << "sweep:";
  for (const auto& c : t.curves) {
    for (std::size_t k = 0; k < grid.size(); ++k) tab.rows.push_back({c.xi, grid[k], c.gamma_over_J[k]});
    curves.push_back({{"xi", c.xi},
                      {"argmin_theta", c.argmin_theta},
                      {"argmin_index", c.argmin_index},
                      {"min_gamma_over_J", c.min_value}});
    s << " xi=" << c.xi << " argmin=" << format_double(c.argmin_theta);
  }
  const double step = grid.size() > 1 ? std::abs(grid[1] - grid[0]) : 0.0;
  out.payload = {{"curves", curves}, {"theta_points", grid.size()}, {"grid_step", step}};
  out.table = std::move(tab);
  out.summary = s.str();
  return out;
}

// ---------------------------------------------------------------- converge

CommandResult cmd_converge(const RunConfig& rc, int workers) {
  if (rc.relaxation.model != "none")
    throw ConfigError("system.relaxation.model: trajectories only carry phase noise; use none");
  const SystemModel sys = build_system(rc);
  const Matrix rho0 = initial_density(rc, sys);
  const double threshold = 0.02 * std::sqrt(1e4 / double(rc.n_traj));

  std::vector<LindbladChannel> chans = build_channels(rc, sys);
  const MasterResult exact = propagate_master(sys.H0, chans, DensityMatrix(rho0), rc.grid);

  CommandResult out;
  Table tab{{"t"}, {}};
  for (double t : exact.times) tab.rows.push_back({t});
  json schemes = json::array();
  bool pass = true;
  std::ostringstream s;
  s << "converge: threshold " << format_double(threshold);
  for (Scheme sc : rc.schemes) {
    TrajectoryConfig tc;
    tc.H0 = sys.H0;
    tc.Ks = sys.currents;
    tc.J = sys.amplitudes;
    tc.noise = rc.noise;
    tc.correlation = link_correlation(rc);
    tc.rho0 = rho0;
    tc.grid = rc.grid;
    tc.scheme = sc;
    const StochasticModel model(tc);
    const EnsembleResult ens = ensemble_average(model, std::size_t(rc.n_traj), rc.master_seed, workers);
    double max_dist = 0.0, max_z = 0.0;
    tab.header.push_back("trace_distance_" + to_string(sc));
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      const double dist = trace_distance(ens.mean_states[k], exact.states[k]);
      max_dist = std::max(max_dist, dist);
      tab.rows[k].push_back(dist);
      const Matrix diff = ens.mean_states[k] - exact.states[k];
      const Matrix& se = ens.standard_errors[k];
      for (Eigen::Index i = 0; i < diff.rows(); ++i)
        for (Eigen::Index j = 0; j < diff.cols(); ++j) {
          if (se(i, j).real() > 0) max_z = std::max(max_z, std::abs(diff(i, j).real()) / se(i, j).real());
          if (se(i, j).imag() > 0) max_z = std::max(max_z, std::abs(diff(i, j).imag()) / se(i, j).imag());
        }
    }
    const bool ok = max_dist < threshold;
    pass = pass && ok;
    schemes.push_back({{"scheme", to_string(sc)}, {"max_trace_distance", max_dist}, {"max_abs_z", max_z}, {"pass", ok}});
    s << "; " << to_string(sc) << " max distance " << format_double(max_dist) << (ok ? " (pass)" : " (FAIL)");
  }
  out.payload = {{"n_traj", rc.n_traj},
                 {"threshold", threshold},
                 {"gamma_matrix_trace", rate_matrix(sys.amplitudes, link_correlation(rc).scaled(noise_intensity(rc.noise)))
                                            .entries()
                                            .trace()
                                            .real()},
                 {"master_halving_divergence", exact.halving_divergence},
                 {"schemes", schemes},
                 {"pass", pass}};
  out.table = std::move(tab);
  out.exit_code = pass ? kOk : kAssertion;
  out.summary = s.str();
  return out;
}

// ---------------------------------------------------------------- spectrum

RunConfig with_parameter(RunConfig rc, const std::string& name, double p) {
  if (name == "xi") {
    rc.relaxation.xi = p;
    if (rc.correlation.rows() == 2) rc.correlation(0, 1) = rc.correlation(1, 0) = p;
  } else if (name == "gamma") {
    rc.relaxation.gamma = p;
  }
  return rc;
}

Liouvillian liouvillian_of(const RunConfig& rc) {
  const SystemModel sys = build_system(rc);
  return build_liouvillian(sys.H0, build_channels(rc, sys));
}

json report_json(const SpectralReport& r) {
  json ev = json::array(), kappa = json::array();
  for (Eigen::Index k = 0; k < r.eigenvalues.size(); ++k) {
    ev.push_back(complex_pair(r.eigenvalues(k)));
    kappa.push_back(finite_or_null(r.condition_numbers(k)));
  }
  return {{"eigenvalues", ev},
          {"condition_numbers", kappa},
          {"max_condition_number", finite_or_null(r.condition_numbers.maxCoeff())},
          {"min_pair_gap", finite_or_null(r.min_pair_gap)},
          {"normality_defect", r.normality_defect},
          {"norm", r.norm}};
}

CommandResult cmd_spectrum(const RunConfig& rc) {
  CommandResult out;
  const bool sweeping = rc.sweep.parameter != "none" && !rc.sweep.values.empty();
  const RunConfig first = sweeping ? with_parameter(rc, rc.sweep.parameter, rc.sweep.values.front()) : rc;
  const SpectralReport rep = spectral_report(liouvillian_of(first));
  out.payload = {{"report", report_json(rep)}};
  std::ostringstream s;
  s << "spectrum: normality defect " << format_double(rep.normality_defect);
  if (sweeping) {
    const std::string name = rc.sweep.parameter;
    const LiouvillianFamily family = [&rc, name](double p) { return liouvillian_of(with_parameter(rc, name, p)); };
    const EpScan scan = detect_ep(family, rc.sweep.values);
    Table tab{{"parameter", "max_kappa", "min_gap", "pair_gap", "pair_kappa", "normality_defect", "norm", "candidate"},
              {}};
    double worst_defect = 0.0;
    for (const auto& p : scan.points) {
      tab.rows.push_back({p.parameter, p.max_kappa, p.min_gap, p.pair_gap, p.pair_kappa, p.normality_defect, p.norm,
                          p.candidate ? 1.0 : 0.0});
      worst_defect = std::max(worst_defect, p.normality_defect);
    }
    json cands = json::array();
    for (const auto& c : scan.candidates)
      cands.push_back({{"parameter", c.parameter},
                       {"kappa", finite_or_null(c.kappa)},
                       {"gap", c.gap},
                       {"grid_index", c.grid_index}});
    out.payload["sweep_parameter"] = name;
    out.payload["sweep_points"] = scan.points.size();
    out.payload["max_normality_defect"] = worst_defect;
    out.payload["candidates"] = cands;
    out.table = std::move(tab);
    s << " at first point; " << scan.candidates.size() << " EP candidate(s) over " << scan.points.size()
      << " points";
  }
  out.summary = s.str();
  return out;
}

// ---------------------------------------------------------------- lifetime

CommandResult cmd_lifetime(const RunConfig& rc) {
  if (rc.links.size() != 1) throw ConfigError("system.links: lifetime analysis needs exactly one link");
  if (rc.manifold != "single_excitation" || rc.n_sites != 2)
    throw ConfigError("system: lifetime analysis needs the two-site single-excitation manifold");
  if (rc.initial_state.at("kind") != "bloch") throw ConfigError("initial_state.kind: lifetime needs a Bloch state");
  const auto b = rc.initial_state.at("bloch").get<std::vector<double>>();
  if (b.size() != 3) throw ConfigError("initial_state.bloch: expected three components");
  const BlochVector r(b[0], b[1], b[2]);
  const double Gamma = effective_rate(rc.noise, rc.links[0].amplitude);
  const double gres = rc.relaxation.gamma_res;
  const double delta = rc.links[0].phase_offset;

  // the current couples at θ+δ, so the optimum in θ is shifted by −δ
  const ProtectionReport rep = optimal_angle(r, Gamma, gres);
  const double theta_star = reduce_mod_pi(rep.theta_star - delta);
  const double rate_here = gres + dephasing_rate_bloch(rc.theta + delta, Gamma, r);
  const double life_here = effective_lifetime(rc.theta + delta, Gamma, gres, r);

  CommandResult out;
  out.payload = {{"Gamma_theta", Gamma},
                 {"gamma_res", gres},
                 {"theta_star", rep.undefined ? json(nullptr) : json(theta_star)},
                 {"undefined", rep.undefined},
                 {"gamma_min", rep.gamma_min},
                 {"grid_argmin", reduce_mod_pi(rep.grid_argmin - delta)},
                 {"grid_step", rep.grid_step},
                 {"lifetime", finite_or_null(rep.lifetime)},
                 {"lifetime_infinite", rep.lifetime_infinite},
                 {"theta", rc.theta},
                 {"total_rate_at_theta", rate_here},
                 {"lifetime_at_theta", finite_or_null(life_here)}};
  Table tab{{"theta", "gamma"}, {}};
  for (std::size_t k = 0; k < rep.theta_grid.size(); ++k)
    tab.rows.push_back({reduce_mod_pi(rep.theta_grid[k] - delta), rep.gamma_of_theta[k]});
  std::sort(tab.rows.begin(), tab.rows.end());
  out.table = std::move(tab);
  std::ostringstream s;
  s << "lifetime: theta* " << (rep.undefined ? std::string("undefined") : format_double(theta_star)) << ", lifetime "
    << format_double(rep.lifetime);
  out.summary = s.str();
  return out;
}

// ---------------------------------------------------------------- dfs

std::string mode_label(const Vector& c) {
  if (c.size() != 2) return "other";
  const double s = 1.0 / std::sqrt(2.0);
  if ((c - Vector::Constant(2, s)).norm() < 1e-8) return "symmetric";
  Vector anti(2);
  anti << s, -s;
  if ((c - anti).norm() < 1e-8) return "antisymmetric";
  return "other";
}

CommandResult cmd_dfs(const RunConfig& rc) {
  const SystemModel sys = build_system(rc);
  const CorrelationMatrix D = link_correlation(rc).scaled(noise_intensity(rc.noise));
  const double J = rc.links[0].amplitude;
  auto mode_json = [](const CollectiveCurrent& m) {
    json coeff = json::array();
    for (Eigen::Index k = 0; k < m.coefficients.size(); ++k) coeff.push_back(complex_pair(m.coefficients(k)));
    return json{{"eigenvalue", m.eigenvalue}, {"rate", m.rate}, {"coefficients", coeff},
                {"label", mode_label(m.coefficients)}};
  };
  json kernel = json::array(), modes = json::array();
  for (const auto& m : dfs_kernel(D, sys.currents, J)) kernel.push_back(mode_json(m));
  for (const auto& m : collective_currents(sys.currents, D, J)) modes.push_back(mode_json(m));
  CommandResult out;
  out.payload = {{"kernel", kernel}, {"modes", modes}, {"rank_deficient", D.rank_deficient()}};
  std::ostringstream s;
  s << "dfs: " << kernel.size() << " noiseless mode(s)";
  for (const auto& k : kernel) s << " [" << k["label"].get<std::string>() << "]";
  out.summary = s.str();
  return out;
}

void write_table(const fs::path& path, const Table& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t k = 0; k < t.header.size(); ++k) f << (k ? "," : "") << t.header[k];
  f << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << format_double(row[k]);
    f << '\n';
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> command_names() { return {"algebra-check", "sweep", "converge", "spectrum", "lifetime", "dfs"}; }

std::string default_preset(const std::string& command) {
  if (command == "algebra-check") return "algebra";
  if (command == "sweep") return "fig2";
  if (command == "converge") return "converge";
  if (command == "spectrum") return "ep-sweep";
  if (command == "lifetime") return "lifetime";
  if (command == "dfs") return "two-link-dfs";
  throw ConfigError("command: unknown command '" + command + "'");
}

json resolve_config(const Options& opts) {
  const json schema = base_config();
  json config = preset(opts.preset.value_or(default_preset(opts.command)));
  if (opts.config_path) {
    std::ifstream f(*opts.config_path);
    if (!f) throw ConfigError("--config: cannot open '" + *opts.config_path + "'");
    json file;
    try {
      file = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ConfigError("--config: " + std::string(e.what()));
    }
    if (file.is_object() && file.contains("config_echo") && file.contains("payload")) file = file["config_echo"];
    merge_checked(config, file, schema);
  }
  for (const auto& s : opts.sets) apply_set(config, s, schema);
  if (opts.seed) config["ensemble"]["master_seed"] = *opts.seed;
  validate_config(config);
  return config;
}

CommandResult run_command(const std::string& command, const json& config, int workers) {
  const RunConfig rc = parse_config(config);
  if (command == "algebra-check") return cmd_algebra(rc);
  if (command == "sweep") return cmd_sweep(rc);
  if (command == "converge") return cmd_converge(rc, workers);
  if (command == "spectrum") return cmd_spectrum(rc);
  if (command == "lifetime") return cmd_lifetime(rc);
  if (command == "dfs") return cmd_dfs(rc);
  throw ConfigError("command: unknown command '" + command + "'");
}

int execute(const Options& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (opts.workers < 0) throw ConfigError("--workers: must be >= 0");
    if (opts.workers > 0) omp_set_num_threads(opts.workers);
    const json config = resolve_config(opts);
    CommandResult res = run_command(opts.command, config, opts.workers);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir(opts.output_dir);
    fs::create_directories(dir);
    const json envelope = {{"command", opts.command},
                           {"config_echo", config},
                           {"tool_version", ANYON_VERSION},
                           {"wall_time", wall},
                           {"payload", res.payload}};
    {
      std::ofstream f(dir / (opts.command + ".json"), std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + (dir / (opts.command + ".json")).string());
      f << envelope.dump(2) << '\n';
    }
    if (res.table) write_table(dir / (opts.command + ".csv"), *res.table);
    std::cout << res.summary << '\n';
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const SizeError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kResource;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ValidityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ShapeError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace anyon::cli
