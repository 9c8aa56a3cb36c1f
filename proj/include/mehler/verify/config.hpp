#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mehler/levy.hpp"

namespace mehler::verify {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Probe grids for the residual suites. Defaults are filled in per dimension
// when the config omits them.
struct Grids {
  std::vector<double> t;
  std::vector<double> s;
  std::vector<Eigen::VectorXd> y;
};

struct Tolerances {
  double quad_tol = 1e-10;
  double cocycle = 1e-8;
  double roundtrip = 1e-9;
  double decomposability = 1e-8;
  double diamond = 1e-9;
  double factor_gap = 1e-6;
  double cf_band_scale = 4.0;  // band multiple of 1/sqrt(N) for CF checks
  double ks_alpha = 0.01;
};

// Second model pair for the stationary-limit experiment.
struct ExperimentConfig {
  std::optional<LevyModel> finite_model;    // satisfies the log-moment condition
  std::optional<LevyModel> infinite_model;  // violates it
  std::vector<double> horizons = {2.0, 4.0, 8.0, 16.0, 32.0};
  std::int64_t n_samples = 10000;
  double grid_step = 0.25;
};

struct RunConfig {
  std::optional<LevyModel> model;
  Eigen::MatrixXd generator;
  std::vector<std::string> suites;
  Grids grids;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::map<std::string, std::int64_t> n_samples;
  double grid_step = 1.0 / 256.0;
  double epsilon = 0.5;  // tail threshold for the infinitesimality suite
  std::string output_dir = "out";
  std::optional<ExperimentConfig> experiment;
  std::string config_hash;

  const LevyModel& require_model() const {
    if (!model) throw ConfigError("config: no model specified");
    return *model;
  }

  std::int64_t samples_for(const std::string& suite, std::int64_t fallback) const {
    const auto it = n_samples.find(suite);
    return it == n_samples.end() ? fallback : it->second;
  }
};

const std::vector<std::string>& known_suites();

LevyModel parse_model(const nlohmann::json& doc);
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Deterministic probe directions y for a given dimension: a magnitude ladder
// over seeded unit directions, axis-aligned in one dimension.
std::vector<Eigen::VectorXd> default_probe_grid(int dim, int count);

}  // namespace mehler::verify
