#include "mehler/verify/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mehler/rng.hpp"
#include "mehler/verify/report.hpp"

namespace mehler::verify {

namespace {

Eigen::VectorXd parse_vector(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a nonempty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(std::string(what) + ": expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected row arrays");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(std::string(what) + ": expected row arrays");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError(std::string(what) + ": ragged matrix");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ConfigError(std::string(what) + ": expected numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

JumpLaw parse_jump_law(const nlohmann::json& j, int dim) {
  if (!j.contains("kind")) throw ConfigError("jump_law: missing kind");
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  try {
    if (kind == "point_mass") return JumpLaw::point_mass(parse_vector(params.at("a"), "jump a"));
    if (kind == "gaussian") {
      return JumpLaw::gaussian(parse_vector(params.at("mean"), "jump mean"),
                               parse_matrix(params.at("cov"), "jump cov"));
    }
    if (kind == "uniform_ball") return JumpLaw::uniform_ball(dim, params.at("radius").get<double>());
    if (kind == "pareto_radial") {
      return JumpLaw::pareto_radial(dim, params.at("alpha").get<double>(),
                                    params.at("scale").get<double>());
    }
    if (kind == "log_pareto_radial") {
      return JumpLaw::log_pareto_radial(dim, params.at("scale").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("jump_law: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("jump_law: ") + e.what());
  }
  throw ConfigError("jump_law: unknown kind '" + kind + "'");
}

}  // namespace

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names = {
      "cocycle", "semigroup", "representation", "roundtrip",
      "urbanik", "marginals", "infinitesimal"};
  return names;
}

LevyModel parse_model(const nlohmann::json& doc) {
  try {
    const int dim = doc.at("dim").get<int>();
    if (dim < 1) throw ConfigError("model: dim must be >= 1");
    const Eigen::VectorXd drift = parse_vector(doc.at("drift"), "drift");
    const Eigen::MatrixXd covariance = parse_matrix(doc.at("covariance"), "covariance");
    const double rate = doc.value("jump_rate", 0.0);
    std::optional<JumpLaw> law;
    if (rate > 0.0) {
      if (!doc.contains("jump_law")) throw ConfigError("model: jump_rate > 0 needs jump_law");
      law = parse_jump_law(doc.at("jump_law"), dim);
    }
    if (drift.size() != dim) throw ConfigError("model: drift size != dim");
    return LevyModel(drift, covariance, rate, law);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

std::vector<Eigen::VectorXd> default_probe_grid(int dim, int count) {
  std::vector<Eigen::VectorXd> grid;
  grid.reserve(static_cast<std::size_t>(count));
  RngStream rng(0x70726f6265ULL);  // fixed probe seed: grids must not drift between runs
  for (int k = 0; k < count; ++k) {
    const double magnitude = 0.1 + 1.9 * (static_cast<double>(k) + 0.5) / count;
    if (dim == 1) {
      Eigen::VectorXd y(1);
      y << (k % 2 == 0 ? magnitude : -magnitude);
      grid.push_back(y);
    } else {
      grid.push_back(magnitude * rng.unit_sphere(dim));
    }
  }
  return grid;
}

RunConfig parse_config(const nlohmann::json& doc) {
  RunConfig cfg;
  try {
    if (!doc.contains("seed")) throw ConfigError("config: seed is required (no ambient randomness)");
    cfg.seed = doc.at("seed").get<std::uint64_t>();

    if (doc.contains("model")) cfg.model = parse_model(doc.at("model"));
    if (!doc.contains("generator")) throw ConfigError("config: generator is required");
    cfg.generator = parse_matrix(doc.at("generator"), "generator");
    if (cfg.model && cfg.generator.rows() != cfg.model->dim()) {
      throw ConfigError("config: generator and model dimensions differ");
    }

    for (const auto& suite : doc.value("suites", nlohmann::json::array())) {
      const std::string name = suite.get<std::string>();
      if (std::find(known_suites().begin(), known_suites().end(), name) == known_suites().end()) {
        throw ConfigError("config: unknown suite '" + name + "'");
      }
      cfg.suites.push_back(name);
    }

    const int dim = static_cast<int>(cfg.generator.rows());
    if (doc.contains("grids")) {
      const auto& grids = doc.at("grids");
      if (grids.contains("t")) cfg.grids.t = grids.at("t").get<std::vector<double>>();
      if (grids.contains("s")) cfg.grids.s = grids.at("s").get<std::vector<double>>();
      if (grids.contains("y")) {
        for (const auto& row : grids.at("y")) {
          const Eigen::VectorXd y = parse_vector(row, "grids.y");
          if (y.size() != dim) throw ConfigError("config: grids.y entry has wrong dimension");
          cfg.grids.y.push_back(y);
        }
      }
    }
    if (cfg.grids.t.empty()) cfg.grids.t = {0.1, 0.5, 1.0, 2.0, 4.0};
    if (cfg.grids.s.empty()) cfg.grids.s = {0.1, 0.5, 1.0, 2.0, 4.0};
    if (cfg.grids.y.empty()) cfg.grids.y = default_probe_grid(dim, 20);

    if (doc.contains("tolerances")) {
      const auto& tol = doc.at("tolerances");
      cfg.tolerances.quad_tol = tol.value("quad_tol", cfg.tolerances.quad_tol);
      cfg.tolerances.cocycle = tol.value("cocycle", cfg.tolerances.cocycle);
      cfg.tolerances.roundtrip = tol.value("roundtrip", cfg.tolerances.roundtrip);
      cfg.tolerances.decomposability = tol.value("decomposability", cfg.tolerances.decomposability);
      cfg.tolerances.diamond = tol.value("diamond", cfg.tolerances.diamond);
      cfg.tolerances.factor_gap = tol.value("factor_gap", cfg.tolerances.factor_gap);
      cfg.tolerances.cf_band_scale = tol.value("cf_band_scale", cfg.tolerances.cf_band_scale);
      cfg.tolerances.ks_alpha = tol.value("ks_alpha", cfg.tolerances.ks_alpha);
    }

    if (doc.contains("n_samples")) {
      for (const auto& [suite, count] : doc.at("n_samples").items()) {
        cfg.n_samples[suite] = count.get<std::int64_t>();
      }
    }
    cfg.grid_step = doc.value("grid_step", cfg.grid_step);
    if (!(cfg.grid_step > 0.0)) throw ConfigError("config: grid_step must be > 0");
    cfg.epsilon = doc.value("epsilon", cfg.epsilon);
    if (!(cfg.epsilon > 0.0)) throw ConfigError("config: epsilon must be > 0");
    cfg.output_dir = doc.value("output_dir", cfg.output_dir);

    if (doc.contains("experiment")) {
      const auto& exp = doc.at("experiment");
      ExperimentConfig ec;
      if (exp.contains("finite_model")) ec.finite_model = parse_model(exp.at("finite_model"));
      if (exp.contains("infinite_model")) ec.infinite_model = parse_model(exp.at("infinite_model"));
      if (exp.contains("horizons")) ec.horizons = exp.at("horizons").get<std::vector<double>>();
      ec.n_samples = exp.value("n_samples", ec.n_samples);
      ec.grid_step = exp.value("grid_step", ec.grid_step);
      cfg.experiment = std::move(ec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  RunConfig cfg = parse_config(doc);
  cfg.config_hash = fnv1a_hex(bytes);
  return cfg;
}

}  // namespace mehler::verify
