#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mehler/verify/config.hpp"
#include "mehler/verify/report.hpp"
#include "mehler/verify/suites.hpp"

using mehler::verify::ConfigError;
using mehler::verify::parse_config;
using mehler::verify::RunConfig;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "model": {
      "dim": 1,
      "drift": [0.0],
      "covariance": [[1.0]],
      "jump_rate": 0.0
    },
    "generator": [[-1.0]],
    "suites": ["cocycle", "roundtrip"],
    "grids": {"t": [0.5, 1.0], "s": [0.5], "y": [[0.5], [1.0], [1.5], [2.0]]},
    "seed": 20250808,
    "grid_step": 0.015625,
    "n_samples": {
      "representation": 2000,
      "marginals": 2000,
      "urbanik": 2000,
      "infinitesimal": 5000,
      "semigroup": 500,
      "semigroup_inner": 100
    },
    "output_dir": "out"
  })");
}

}  // namespace

TEST_SUITE_BEGIN("verify");

TEST_CASE("config parsing applies defaults and validates") {
  const RunConfig cfg = parse_config(base_config());
  CHECK(cfg.require_model().dim() == 1);
  CHECK(cfg.generator(0, 0) == -1.0);
  CHECK(cfg.suites.size() == 2);
  CHECK(cfg.seed == 20250808);
  CHECK(cfg.grids.y.size() == 4);
  CHECK(cfg.tolerances.quad_tol == 1e-10);
  CHECK(cfg.samples_for("marginals", 0) == 2000);
  CHECK(cfg.samples_for("unknown", 7) == 7);
}

TEST_CASE("config errors") {
  json no_seed = base_config();
  no_seed.erase("seed");
  CHECK_THROWS_AS((void)parse_config(no_seed), ConfigError);

  json bad_suite = base_config();
  bad_suite["suites"] = {"nonsense"};
  CHECK_THROWS_AS((void)parse_config(bad_suite), ConfigError);

  json bad_model = base_config();
  bad_model["model"]["covariance"] = {{-1.0}};
  CHECK_THROWS_AS((void)parse_config(bad_model), ConfigError);

  json mismatched = base_config();
  mismatched["generator"] = {{-1.0, 0.0}, {0.0, -1.0}};
  CHECK_THROWS_AS((void)parse_config(mismatched), ConfigError);

  json rate_no_law = base_config();
  rate_no_law["model"]["jump_rate"] = 1.0;
  CHECK_THROWS_AS((void)parse_config(rate_no_law), ConfigError);
}

TEST_CASE("unknown suite is rejected at run time") {
  const RunConfig cfg = parse_config(base_config());
  CHECK_THROWS_AS((void)mehler::verify::run_suite(cfg, "nope"), ConfigError);
}

TEST_CASE("cocycle suite passes on the Gaussian reference model") {
  const RunConfig cfg = parse_config(base_config());
  const auto report = mehler::verify::run_suite(cfg, "cocycle");
  CHECK(report.pass());
  CHECK(report.records().size() == 2 * 1 * 4);
  CHECK(report.n_fail() == 0);
  CHECK(report.n_pass() == static_cast<int>(report.records().size()));
}

TEST_CASE("roundtrip suite passes and reports per-path records") {
  const RunConfig cfg = parse_config(base_config());
  const auto report = mehler::verify::run_suite(cfg, "roundtrip");
  CHECK(report.pass());
  CHECK(report.records().size() == 5);
}

TEST_CASE("representation suite at reduced size") {
  const RunConfig cfg = parse_config(base_config());
  const auto report = mehler::verify::run_suite(cfg, "representation");
  CHECK(report.pass());
}

TEST_CASE("urbanik suite at reduced size") {
  const RunConfig cfg = parse_config(base_config());
  const auto report = mehler::verify::run_suite(cfg, "urbanik");
  CHECK(report.pass());
}

TEST_CASE("marginals suite with negative control") {
  const RunConfig cfg = parse_config(base_config());
  const auto report = mehler::verify::run_suite(cfg, "marginals");
  CHECK(report.pass());
  bool saw_control = false;
  for (const auto& record : report.records()) {
    if (record.name == "negative_control") {
      saw_control = true;
      // The control passes because the KS test rejects.
      CHECK(record.residual > record.tolerance);
      CHECK(record.pass);
    }
  }
  CHECK(saw_control);
}

TEST_CASE("infinitesimal suite with the Gaussian tail oracle") {
  const RunConfig cfg = parse_config(base_config());
  const auto report = mehler::verify::run_suite(cfg, "infinitesimal");
  CHECK(report.pass());
  bool saw_oracle = false;
  for (const auto& record : report.records()) {
    if (record.name == "gaussian_tail_oracle") saw_oracle = true;
  }
  CHECK(saw_oracle);
}

TEST_CASE("semigroup suite at reduced size") {
  const RunConfig cfg = parse_config(base_config());
  const auto report = mehler::verify::run_suite(cfg, "semigroup");
  CHECK(report.pass());
  CHECK(report.records().size() == 4);  // 2 (t,s) pairs x {cos, sin}
}

TEST_CASE("reports are deterministic modulo the timestamp") {
  const RunConfig cfg = parse_config(base_config());
  const auto a = mehler::verify::run_suite(cfg, "cocycle").to_json("T0");
  const auto b = mehler::verify::run_suite(cfg, "cocycle").to_json("T0");
  CHECK(a.dump() == b.dump());
  const auto c = mehler::verify::run_suite(cfg, "cocycle").to_json("T1");
  nlohmann::ordered_json c_stripped = c;
  nlohmann::ordered_json a_stripped = a;
  c_stripped.erase("timestamp");
  a_stripped.erase("timestamp");
  CHECK(a_stripped.dump() == c_stripped.dump());
}

TEST_CASE("report JSON and CSV carry the summary and records") {
  const RunConfig cfg = parse_config(base_config());
  auto report = mehler::verify::run_suite(cfg, "cocycle");
  const auto j = report.to_json("2026-01-01T00:00:00Z");
  CHECK(j.at("suite") == "cocycle");
  CHECK(j.at("summary").at("pass").get<bool>() == report.pass());
  CHECK(j.at("summary").at("n_pass").get<int>() + j.at("summary").at("n_fail").get<int>() ==
        static_cast<int>(report.records().size()));
  CHECK(j.at("provenance").contains("artifact_version"));
  const std::string csv = report.to_csv();
  CHECK(csv.rfind("name,", 0) == 0);
  CHECK(csv.find("residual,tolerance,pass") != std::string::npos);
  CHECK(csv.find("cocycle") != std::string::npos);
}

TEST_CASE("report writing produces the JSON and CSV artifacts") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mehler_report_test";
  fs::remove_all(dir);
  const RunConfig cfg = parse_config(base_config());
  auto report = mehler::verify::run_suite(cfg, "roundtrip");
  report.write(dir.string(), "2026-01-01T00:00:00Z");
  CHECK(fs::exists(dir / "roundtrip_report.json"));
  CHECK(fs::exists(dir / "roundtrip_records.csv"));
  std::ifstream json_in(dir / "roundtrip_report.json");
  const auto parsed = nlohmann::json::parse(json_in);
  CHECK(parsed.at("timestamp") == "2026-01-01T00:00:00Z");
  CHECK(parsed.at("summary").at("pass").get<bool>());
  std::ifstream csv_in(dir / "roundtrip_records.csv");
  std::string header;
  std::getline(csv_in, header);
  CHECK(header.rfind("name,", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("logmoment experiment: deterministic drift model converges") {
  json spec = base_config();
  spec["experiment"] = json::parse(R"({
    "finite_model": {"dim": 1, "drift": [1.0], "covariance": [[0.0]], "jump_rate": 0.0},
    "horizons": [8.0, 16.0, 32.0],
    "n_samples": 200,
    "grid_step": 0.25
  })");
  const RunConfig cfg = parse_config(spec);
  const auto report = mehler::verify::run_logmoment_experiment(cfg);
  const auto& model = report.json.at("models").at(0);
  CHECK(model.at("role") == "finite_log_moment");
  CHECK(model.at("label") == "CONVERGENT");
  CHECK(model.at("degenerate").get<bool>());
}

TEST_CASE("logmoment experiment: log-Pareto jumps diverge") {
  json spec = base_config();
  spec["experiment"] = json::parse(R"({
    "infinite_model": {"dim": 1, "drift": [0.0], "covariance": [[0.0]], "jump_rate": 0.1,
                       "jump_law": {"kind": "log_pareto_radial", "params": {"scale": 1.0}}},
    "horizons": [2.0, 4.0, 8.0],
    "n_samples": 2000,
    "grid_step": 0.5
  })");
  const RunConfig cfg = parse_config(spec);
  const auto report = mehler::verify::run_logmoment_experiment(cfg);
  const auto& model = report.json.at("models").at(0);
  CHECK(model.at("role") == "infinite_log_moment");
  CHECK(model.at("label") == "DIVERGENT");

  const auto again = mehler::verify::run_logmoment_experiment(cfg);
  CHECK(report.json.dump() == again.json.dump());
}

TEST_CASE("experiment requires a stable generator and a model") {
  json spec = base_config();
  spec["generator"] = {{0.0}};
  spec["experiment"] = json::parse(R"({
    "finite_model": {"dim": 1, "drift": [1.0], "covariance": [[0.0]], "jump_rate": 0.0}
  })");
  CHECK_THROWS_AS((void)mehler::verify::run_logmoment_experiment(parse_config(spec)),
                  ConfigError);

  json no_models = base_config();
  no_models["experiment"] = json::object();
  CHECK_THROWS_AS((void)mehler::verify::run_logmoment_experiment(parse_config(no_models)),
                  ConfigError);
}

TEST_SUITE_END();
