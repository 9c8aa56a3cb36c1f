#pragma once

#include <string>

#include <json.hpp>

#include "mehler/verify/config.hpp"
#include "mehler/verify/report.hpp"

namespace mehler::verify {

// Runs one named verification suite. Deterministic given config + seed.
// Suites: cocycle, semigroup, representation, roundtrip, urbanik, marginals,
// infinitesimal.
VerificationReport run_suite(const RunConfig& config, const std::string& suite);

// Runs the suite and writes the JSON report and CSV table into
// config.output_dir. Returns the process exit status: 0 all-pass, 1 failure.
int run_and_write(const RunConfig& config, const std::string& suite);

// Exploratory stationary-limit experiment around the log-moment condition.
// Emits observations (CONVERGENT / DIVERGENT labels), never failures.
struct ExperimentReport {
  nlohmann::ordered_json json;
  std::string csv;
  void write(const std::string& output_dir, const std::string& timestamp) const;
};

ExperimentReport run_logmoment_experiment(const RunConfig& config);

}  // namespace mehler::verify
