#pragma once

// Run configuration: built-in presets, deep merge of a JSON file and dotted
// `--set` overrides, strict key/type validation against the full default
// document, and conversion into library objects.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "anyon/correlation.hpp"
#include "anyon/lindblad.hpp"
#include "anyon/noise.hpp"
#include "anyon/operator_algebra.hpp"
#include "anyon/state.hpp"
#include "anyon/stochastic.hpp"

namespace anyon::cli {

using json = nlohmann::ordered_json;

/// Invalid or inconsistent configuration; the message starts with the
/// offending dotted path. Exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every key the schema knows, with default values.
json base_config();

std::vector<std::string> preset_names();
/// Base config with the preset's overrides applied; ConfigError if unknown.
json preset(const std::string& name);

/// Recursively merges `overlay` into `target`. Objects merge key by key,
/// everything else (arrays included) is replaced whole. Keys absent from
/// `schema` raise ConfigError with their path.
void merge_checked(json& target, const json& overlay, const json& schema, const std::string& path = "");

/// Applies "a.b.c=VALUE"; VALUE is parsed as JSON, falling back to a string.
void apply_set(json& config, const std::string& assignment, const json& schema);

/// Structural and type validation of a merged document.
void validate_config(const json& config);

struct LinkSpec {
  int i = 0, j = 1;
  double amplitude = 0.1;
  double phase_offset = 0.0;
};

struct RelaxationSpec {
  std::string model = "none";  ///< none | collective_loss | local_loss
  double gamma = 0.0;
  double xi = 0.0;
  double gamma_res = 0.0;
};

struct SweepSpec {
  std::string parameter = "none";  ///< none | xi | gamma
  std::vector<double> values;
  double theta_start = 0.0, theta_stop = 0.0;
  long theta_points = 0;
  std::vector<double> theta_grid() const;
};

/// Typed view of a validated config document.
struct RunConfig {
  int n_sites = 2;
  int cutoff = 1;
  std::string manifold = "single_excitation";
  double theta = 0.0;
  std::vector<double> site_energies;
  double hopping = 0.0;
  std::vector<LinkSpec> links;
  RelaxationSpec relaxation;

  NoiseSpec noise = WienerNoise{};
  Matrix correlation;

  json initial_state;
  SimulationGrid grid;

  long n_traj = 1;
  std::uint64_t master_seed = 0;
  std::vector<Scheme> schemes;

  SweepSpec sweep;
  long algebra_theta_points = 8;
};

RunConfig parse_config(const json& config);

/// Operators of a parsed system on its manifold.
struct SystemModel {
  HilbertSpace space;
  std::vector<std::size_t> basis;  ///< retained Fock indices
  std::vector<Operator> anyons;    ///< a_j restricted to the basis (full manifold only)
  std::vector<Operator> currents;  ///< K per link
  std::vector<double> amplitudes;  ///< J per link
  Operator H0;
  Eigen::Index dim() const { return H0.rows(); }
};

SystemModel build_system(const RunConfig& rc);

/// Link correlation C, optionally with the two-link ξ replaced.
CorrelationMatrix link_correlation(const RunConfig& rc);

/// All channels (correlated dephasing plus relaxation) of the system.
std::vector<LindbladChannel> build_channels(const RunConfig& rc, const SystemModel& sys);

Matrix initial_density(const RunConfig& rc, const SystemModel& sys);

}  // namespace anyon::cli
