#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace mehler::verify {

// One verified statement: the probe inputs, the measured residual and its
// tolerance. For statements that are not residual-shaped (e.g. a KS pass),
// residual/tolerance carry the statistic and critical value.
struct CheckRecord {
  std::string name;
  std::vector<std::pair<std::string, std::string>> inputs;  // ordered, stringified
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

std::string format_double(double v);

class VerificationReport {
 public:
  explicit VerificationReport(std::string suite) : suite_(std::move(suite)) {}

  void add(CheckRecord record) { records_.push_back(std::move(record)); }

  const std::string& suite() const { return suite_; }
  const std::vector<CheckRecord>& records() const { return records_; }
  int n_pass() const;
  int n_fail() const;
  bool pass() const { return n_fail() == 0; }

  void set_provenance(std::string config_hash, std::uint64_t seed);

  // Deterministic except for the timestamp field.
  nlohmann::ordered_json to_json(const std::string& timestamp) const;

  // CSV: one row per record, header from the union of input keys, then
  // residual, tolerance, pass.
  std::string to_csv() const;

  // Writes <output_dir>/<suite>_report.json and <output_dir>/<suite>_records.csv.
  void write(const std::string& output_dir, const std::string& timestamp) const;

 private:
  std::string suite_;
  std::vector<CheckRecord> records_;
  std::string config_hash_;
  std::uint64_t seed_ = 0;
};

std::string iso8601_utc_now();
std::string fnv1a_hex(const std::string& bytes);
void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

}  // namespace mehler::verify
