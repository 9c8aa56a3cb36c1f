#include "mehler/verify/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "mehler/version.hpp"

namespace mehler::verify {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

int VerificationReport::n_pass() const {
  int count = 0;
  for (const auto& r : records_) count += r.pass ? 1 : 0;
  return count;
}

int VerificationReport::n_fail() const { return static_cast<int>(records_.size()) - n_pass(); }

void VerificationReport::set_provenance(std::string config_hash, std::uint64_t seed) {
  config_hash_ = std::move(config_hash);
  seed_ = seed;
}

nlohmann::ordered_json VerificationReport::to_json(const std::string& timestamp) const {
  nlohmann::ordered_json out;
  out["suite"] = suite_;
  out["timestamp"] = timestamp;
  out["provenance"] = {{"config_hash", config_hash_},
                       {"seed", seed_},
                       {"artifact_version", mehler::kVersion}};
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& r : records_) {
    nlohmann::ordered_json rec;
    rec["name"] = r.name;
    nlohmann::ordered_json inputs;
    for (const auto& [key, value] : r.inputs) inputs[key] = value;
    rec["inputs"] = inputs;
    rec["residual"] = r.residual;
    rec["tolerance"] = r.tolerance;
    rec["pass"] = r.pass;
    records.push_back(std::move(rec));
  }
  out["records"] = std::move(records);
  out["summary"] = {{"n_pass", n_pass()}, {"n_fail", n_fail()}, {"pass", pass()}};
  return out;
}

std::string VerificationReport::to_csv() const {
  // Header: name, then the union of input keys in first-seen order.
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (const auto& r : records_) {
    for (const auto& [key, _] : r.inputs) {
      if (seen.insert(key).second) keys.push_back(key);
    }
  }
  std::string csv = "name";
  for (const auto& key : keys) csv += "," + key;
  csv += ",residual,tolerance,pass\n";
  for (const auto& r : records_) {
    csv += r.name;
    for (const auto& key : keys) {
      csv += ",";
      for (const auto& [k, v] : r.inputs) {
        if (k == key) {
          csv += v;
          break;
        }
      }
    }
    csv += "," + format_double(r.residual) + "," + format_double(r.tolerance) + "," +
           (r.pass ? "1" : "0") + "\n";
  }
  return csv;
}

void VerificationReport::write(const std::string& output_dir, const std::string& timestamp) const {
  ensure_directory(output_dir);
  write_text_file(output_dir + "/" + suite_ + "_report.json", to_json(timestamp).dump(2) + "\n");
  write_text_file(output_dir + "/" + suite_ + "_records.csv", to_csv());
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + path + "': " + ec.message());
}

}  // namespace mehler::verify
