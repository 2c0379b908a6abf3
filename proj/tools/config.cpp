#include "config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "anyon/errors.hpp"

namespace anyon::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

json linspace(double a, double b, int n) {
  json out = json::array();
  for (int k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
  return out;
}

}  // namespace

json base_config() {
  return json{
      {"system",
       {{"n_sites", 2},
        {"cutoff", 1},
        {"manifold", "single_excitation"},
        {"theta", kPi / 2},
        {"site_energies", json::array()},
        {"hopping", 0.0},
        {"links", json::array({{{"i", 0}, {"j", 1}, {"amplitude", 0.1}, {"phase_offset", 0.0}}})},
        {"relaxation", {{"model", "none"}, {"gamma", 0.0}, {"xi", 0.0}, {"gamma_res", 0.0}}}}},
      {"noise",
       {{"model", "wiener"},
        {"d_phi", 1.0},
        {"sigma", 1.0},
        {"tau_c", 1.0},
        {"bath", {{"coupling", 0.0}, {"temperature", 0.0}, {"cutoff", 1.0}}},
        {"correlation", json::array({json::array({1.0})})}}},
      {"initial_state", {{"kind", "bloch"}, {"bloch", {0.0, 1.0, 0.0}}, {"site", 0}, {"vector", json::array()}}},
      {"grid", {{"t_final", 10.0}, {"dt", 0.01}, {"record_stride", 10}}},
      {"ensemble", {{"n_traj", 1000}, {"master_seed", 1}, {"schemes", {"stratonovich", "ito"}}}},
      {"sweep",
       {{"parameter", "none"},
        {"values", json::array()},
        {"theta_grid", {{"start", 0.0}, {"stop", kPi}, {"points", 721}}}}},
      {"algebra", {{"theta_points", 8}}},
  };
}

std::vector<std::string> preset_names() {
  return {"fig2", "two-link-dfs", "ep-sweep", "converge", "lifetime", "algebra"};
}

json preset(const std::string& name) {
  json c = base_config();
  const json two_links_same = json::array({{{"i", 0}, {"j", 1}, {"amplitude", 0.1}, {"phase_offset", 0.0}},
                                           {{"i", 0}, {"j", 1}, {"amplitude", 0.1}, {"phase_offset", 0.0}}});
  const json identity2 = json::array({{1.0, 0.0}, {0.0, 1.0}});
  if (name == "fig2") {
    c["system"]["links"] = two_links_same;
    c["noise"]["correlation"] = identity2;
    c["initial_state"]["bloch"] = {1.0, 0.0, 0.0};
    c["sweep"]["parameter"] = "xi";
    c["sweep"]["values"] = {0.0, 0.5, 0.9};
  } else if (name == "two-link-dfs") {
    c["system"]["links"] = json::array({{{"i", 0}, {"j", 1}, {"amplitude", 0.1}, {"phase_offset", 0.0}},
                                        {{"i", 0}, {"j", 1}, {"amplitude", 0.1}, {"phase_offset", kPi / 2}}});
    c["noise"]["correlation"] = json::array({{1.0, 1.0}, {1.0, 1.0}});
    c["initial_state"]["bloch"] = {1.0, 0.0, 0.0};
  } else if (name == "ep-sweep") {
    c["system"]["manifold"] = "full";
    c["system"]["hopping"] = 1.0;
    c["system"]["links"] = json::array({{{"i", 0}, {"j", 1}, {"amplitude", 1.0}, {"phase_offset", 0.0}}});
    c["system"]["relaxation"] = {{"model", "collective_loss"}, {"gamma", 8.0}, {"xi", 0.0}, {"gamma_res", 0.0}};
    c["noise"]["d_phi"] = 0.0;
    c["initial_state"] = {{"kind", "site"}, {"bloch", {0.0, 1.0, 0.0}}, {"site", 0}, {"vector", json::array()}};
    c["sweep"]["parameter"] = "xi";
    c["sweep"]["values"] = linspace(-1.0, 1.0, 201);
  } else if (name == "converge") {
    c["grid"] = {{"t_final", 250.0}, {"dt", 0.05}, {"record_stride", 5}};
    c["ensemble"]["n_traj"] = 10000;
  } else if (name == "lifetime") {
    c["initial_state"]["bloch"] = {1.0, 0.0, 0.0};
  } else if (name == "algebra") {
    c["system"]["manifold"] = "full";
  } else {
    std::ostringstream os;
    os << "unknown preset '" << name << "' (";
    for (const auto& p : preset_names()) os << ' ' << p;
    os << " )";
    throw ConfigError("--preset: " + os.str());
  }
  return c;
}

void merge_checked(json& target, const json& overlay, const json& schema, const std::string& path) {
  if (!overlay.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const std::string p = join(path, it.key());
    if (!schema.is_object() || !schema.contains(it.key())) fail(p, "unknown key");
    const json& sub = schema.at(it.key());
    if (sub.is_object()) {
      if (!it.value().is_object()) fail(p, "expected an object");
      merge_checked(target[it.key()], it.value(), sub, p);
    } else {
      target[it.key()] = it.value();
    }
  }
}

void apply_set(json& config, const std::string& assignment, const json& schema) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set: expected KEY=VALUE, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  // rebuild the dotted path as a nested object and merge it
  json overlay = value;
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("--set: empty path component in '" + key + "'");
    parts.push_back(part);
  }
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) overlay = json{{*it, overlay}};
  merge_checked(config, overlay, schema);
}

namespace {

// Path-aware typed accessors.
struct Reader {
  const json& root;

  const json& at(const std::string& path) const {
    const json* node = &root;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) {
      if (!node->is_object() || !node->contains(part)) fail(path, "missing");
      node = &node->at(part);
    }
    return *node;
  }
  double num(const std::string& path) const { return number(at(path), path); }
  static double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }
  long integer(const std::string& path) const { return integer(at(path), path); }
  static long integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long>();
  }
  std::string str(const std::string& path, std::initializer_list<const char*> allowed) const {
    const json& v = at(path);
    if (!v.is_string()) fail(path, "expected a string");
    const auto s = v.get<std::string>();
    for (const char* a : allowed)
      if (s == a) return s;
    std::string msg = "unknown value '" + s + "' (allowed:";
    for (const char* a : allowed) msg += std::string(" ") + a;
    fail(path, msg + ")");
  }
  std::vector<double> numbers(const std::string& path) const {
    const json& v = at(path);
    if (!v.is_array()) fail(path, "expected an array");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
  }
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

}  // namespace

std::vector<double> SweepSpec::theta_grid() const {
  std::vector<double> out;
  for (long k = 0; k < theta_points; ++k)
    out.push_back(theta_points == 1 ? theta_start
                                    : theta_start + (theta_stop - theta_start) * double(k) / double(theta_points - 1));
  return out;
}

void validate_config(const json& config) {
  // unknown-key check against the schema, then a full typed parse
  json scratch = base_config();
  merge_checked(scratch, config, base_config());
  (void)parse_config(config);
}

RunConfig parse_config(const json& config) {
  const Reader r{config};
  RunConfig rc;

  rc.n_sites = int(r.integer("system.n_sites"));
  require(rc.n_sites >= 1 && rc.n_sites <= 12, "system.n_sites", "must be in [1, 12]");
  rc.cutoff = int(r.integer("system.cutoff"));
  require(rc.cutoff >= 1, "system.cutoff", "must be >= 1");
  rc.manifold = r.str("system.manifold", {"single_excitation", "full"});
  rc.theta = r.num("system.theta");
  rc.site_energies = r.numbers("system.site_energies");
  require(rc.site_energies.empty() || int(rc.site_energies.size()) == rc.n_sites, "system.site_energies",
          "must be empty or have n_sites entries");
  rc.hopping = r.num("system.hopping");

  const json& links = r.at("system.links");
  require(links.is_array() && !links.empty(), "system.links", "expected a nonempty array");
  for (std::size_t k = 0; k < links.size(); ++k) {
    const std::string p = "system.links[" + std::to_string(k) + "]";
    const json& l = links[k];
    require(l.is_object(), p, "expected an object");
    for (auto it = l.begin(); it != l.end(); ++it)
      if (it.key() != "i" && it.key() != "j" && it.key() != "amplitude" && it.key() != "phase_offset")
        fail(p + "." + it.key(), "unknown key");
    LinkSpec s;
    if (l.contains("i")) s.i = int(Reader::integer(l["i"], p + ".i"));
    if (l.contains("j")) s.j = int(Reader::integer(l["j"], p + ".j"));
    if (l.contains("amplitude")) s.amplitude = Reader::number(l["amplitude"], p + ".amplitude");
    if (l.contains("phase_offset")) s.phase_offset = Reader::number(l["phase_offset"], p + ".phase_offset");
    require(s.i >= 0 && s.i < rc.n_sites, p + ".i", "site index out of range");
    require(s.j >= 0 && s.j < rc.n_sites, p + ".j", "site index out of range");
    require(s.i != s.j, p, "i and j must differ");
    require(s.amplitude >= 0, p + ".amplitude", "must be >= 0");
    rc.links.push_back(s);
  }
  require(rc.links.size() <= std::size_t(kMaxLinks), "system.links", "at most 16 links");

  rc.relaxation.model = r.str("system.relaxation.model", {"none", "collective_loss", "local_loss"});
  rc.relaxation.gamma = r.num("system.relaxation.gamma");
  rc.relaxation.xi = r.num("system.relaxation.xi");
  rc.relaxation.gamma_res = r.num("system.relaxation.gamma_res");
  require(rc.relaxation.gamma >= 0, "system.relaxation.gamma", "must be >= 0");
  require(rc.relaxation.gamma_res >= 0, "system.relaxation.gamma_res", "must be >= 0");
  require(std::abs(rc.relaxation.xi) <= 1, "system.relaxation.xi", "|xi| must be <= 1");
  if (rc.relaxation.model != "none") {
    require(rc.manifold == "full", "system.relaxation.model", "loss channels need system.manifold = full");
    if (rc.relaxation.model == "collective_loss")
      require(rc.n_sites >= 2, "system.relaxation.model", "collective loss needs two sites");
  }

  const std::string model = r.str("noise.model", {"wiener", "ornstein_uhlenbeck", "quantum_bath"});
  if (model == "wiener") {
    rc.noise = WienerNoise{r.num("noise.d_phi")};
  } else if (model == "ornstein_uhlenbeck") {
    rc.noise = OrnsteinUhlenbeckNoise{r.num("noise.sigma"), r.num("noise.tau_c")};
  } else {
    BathSpectrum b;
    b.coupling = r.num("noise.bath.coupling");
    b.temperature = r.num("noise.bath.temperature");
    b.cutoff = r.num("noise.bath.cutoff");
    rc.noise = QuantumBathNoise{b};
  }
  try {
    validate(rc.noise);
  } catch (const Error& e) {
    fail("noise", e.what());
  }

  const json& corr = r.at("noise.correlation");
  const std::size_t nl = rc.links.size();
  require(corr.is_array() && corr.size() == nl, "noise.correlation", "must be an n_links x n_links array");
  rc.correlation = Matrix::Zero(Eigen::Index(nl), Eigen::Index(nl));
  for (std::size_t a = 0; a < nl; ++a) {
    const std::string p = "noise.correlation[" + std::to_string(a) + "]";
    require(corr[a].is_array() && corr[a].size() == nl, p, "row has the wrong length");
    for (std::size_t b = 0; b < nl; ++b)
      rc.correlation(Eigen::Index(a), Eigen::Index(b)) = Reader::number(corr[a][b], p + "[" + std::to_string(b) + "]");
  }
  try {
    (void)CorrelationMatrix(rc.correlation.real().eval());
  } catch (const Error& e) {
    fail("noise.correlation", e.what());
  }

  rc.initial_state = r.at("initial_state");
  (void)r.str("initial_state.kind", {"bloch", "site", "vector"});

  rc.grid.t_final = r.num("grid.t_final");
  rc.grid.dt = r.num("grid.dt");
  rc.grid.record_stride = r.integer("grid.record_stride");
  try {
    rc.grid.validate();
  } catch (const Error& e) {
    fail("grid", e.what());
  }
  require(rc.grid.n_steps() <= 100'000'000, "grid", "more than 1e8 steps");

  rc.n_traj = r.integer("ensemble.n_traj");
  require(rc.n_traj >= 1, "ensemble.n_traj", "must be >= 1");
  const json& seed = r.at("ensemble.master_seed");
  require(seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<long long>() >= 0),
          "ensemble.master_seed", "expected a nonnegative integer");
  rc.master_seed = seed.get<std::uint64_t>();
  const json& schemes = r.at("ensemble.schemes");
  require(schemes.is_array() && !schemes.empty(), "ensemble.schemes", "expected a nonempty array");
  for (std::size_t k = 0; k < schemes.size(); ++k) {
    const std::string p = "ensemble.schemes[" + std::to_string(k) + "]";
    require(schemes[k].is_string(), p, "expected a string");
    try {
      rc.schemes.push_back(parse_scheme(schemes[k].get<std::string>()));
    } catch (const Error& e) {
      fail(p, e.what());
    }
  }

  rc.sweep.parameter = r.str("sweep.parameter", {"none", "xi", "gamma"});
  rc.sweep.values = r.numbers("sweep.values");
  rc.sweep.theta_start = r.num("sweep.theta_grid.start");
  rc.sweep.theta_stop = r.num("sweep.theta_grid.stop");
  rc.sweep.theta_points = r.integer("sweep.theta_grid.points");
  require(rc.sweep.theta_points >= 1, "sweep.theta_grid.points", "must be >= 1");
  require(rc.sweep.theta_points <= 1'000'000, "sweep.theta_grid.points", "must be <= 1e6");
  if (rc.sweep.parameter == "xi")
    for (std::size_t k = 0; k < rc.sweep.values.size(); ++k)
      require(std::abs(rc.sweep.values[k]) <= 1, "sweep.values[" + std::to_string(k) + "]", "|xi| must be <= 1");
  if (rc.sweep.parameter == "gamma")
    for (std::size_t k = 0; k < rc.sweep.values.size(); ++k)
      require(rc.sweep.values[k] >= 0, "sweep.values[" + std::to_string(k) + "]", "gamma must be >= 0");

  rc.algebra_theta_points = r.integer("algebra.theta_points");
  require(rc.algebra_theta_points >= 1, "algebra.theta_points", "must be >= 1");
  return rc;
}

SystemModel build_system(const RunConfig& rc) {
  SystemModel sys{HilbertSpace(rc.n_sites, rc.cutoff), {}, {}, {}, {}, {}};
  const StatisticalAngle theta(rc.theta);
  if (rc.manifold == "full") {
    for (std::size_t k = 0; k < sys.space.dim(); ++k) sys.basis.push_back(k);
  } else {
    sys.basis = sys.space.sector(1);
  }
  const auto full_ops = build_jw_anyon_ops(sys.space, theta);
  if (rc.manifold == "full") sys.anyons = full_ops;

  const auto d = Eigen::Index(sys.basis.size());
  Operator H = Operator::Zero(d, d);
  for (int s = 0; s < int(rc.site_energies.size()); ++s)
    H += rc.site_energies[s] * restrict_to(number_operator(sys.space, s), sys.basis);
  for (const auto& l : rc.links) {
    const Link link{l.i, l.j, l.amplitude, l.phase_offset};
    sys.currents.push_back(restrict_to(exchange_current(full_ops, link, theta), sys.basis));
    sys.amplitudes.push_back(l.amplitude);
    if (rc.hopping != 0.0) {
      const Operator T = restrict_to(hopping_operator(full_ops, link, theta), sys.basis);
      H -= rc.hopping * l.amplitude * (T + T.adjoint());
    }
  }
  sys.H0 = hermitian_part(H);
  return sys;
}

CorrelationMatrix link_correlation(const RunConfig& rc) {
  return CorrelationMatrix(rc.correlation.real().eval());
}

std::vector<LindbladChannel> build_channels(const RunConfig& rc, const SystemModel& sys) {
  const double s = noise_intensity(rc.noise);
  std::vector<LindbladChannel> out;
  if (s > 0) {
    const CorrelationMatrix G = rate_matrix(sys.amplitudes, link_correlation(rc).scaled(s));
    out = correlated_dephasing_channels(sys.currents, G);
  }
  const auto& rel = rc.relaxation;
  if (rel.model == "collective_loss") {
    for (auto& c : collective_loss_channels(sys.anyons[0], sys.anyons[1], rel.gamma, rel.xi)) out.push_back(c);
  } else if (rel.model == "local_loss") {
    for (const auto& a : sys.anyons) out.push_back(LindbladChannel::relaxation(a, rel.gamma));
  }
  return out;
}

Matrix initial_density(const RunConfig& rc, const SystemModel& sys) {
  const json& st = rc.initial_state;
  const Reader r{st};
  const std::string kind = st.at("kind").get<std::string>();
  const Eigen::Index d = sys.dim();
  try {
    if (kind == "bloch") {
      if (d != 2) fail("initial_state.kind", "a Bloch vector needs a two-dimensional system");
      const auto b = r.numbers("bloch");
      if (b.size() != 3) fail("initial_state.bloch", "expected three components");
      return DensityMatrix::from_bloch({b[0], b[1], b[2]}).matrix();
    }
    if (kind == "site") {
      const long site = r.integer("site");
      if (site < 0 || site >= rc.n_sites) fail("initial_state.site", "site index out of range");
      std::vector<int> occ(std::size_t(rc.n_sites), 0);
      occ[std::size_t(site)] = 1;
      const std::size_t idx = sys.space.index_of(occ);
      Vector psi = Vector::Zero(d);
      for (Eigen::Index k = 0; k < d; ++k)
        if (sys.basis[std::size_t(k)] == idx) psi(k) = 1.0;
      return DensityMatrix::pure(psi).matrix();
    }
    const json& v = st.at("vector");
    if (!v.is_array() || Eigen::Index(v.size()) != d) fail("initial_state.vector", "expected dim entries [re, im]");
    Vector psi(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const std::string p = "initial_state.vector[" + std::to_string(k) + "]";
      const json& e = v[std::size_t(k)];
      if (!e.is_array() || e.size() != 2) fail(p, "expected [re, im]");
      psi(k) = cplx(Reader::number(e[0], p), Reader::number(e[1], p));
    }
    return DensityMatrix::pure(psi).matrix();
  } catch (const ValidityError& e) {
    fail("initial_state", e.what());
  }
}

}  // namespace anyon::cli
