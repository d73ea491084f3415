#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace dilatlab {

// Flat key=value experiment description; '#' starts a comment line.
// Unknown keys for the declared kind are rejected at validation time.
struct ExperimentConfig {
  std::map<std::string, std::string> kv;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);

  const std::string& kind() const;
  std::uint64_t seed() const;
  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;

  // throws std::invalid_argument naming the offending key
  void validate() const;
};

struct RunResult {
  nlohmann::json report;
  int exit_code = 0;  // 0 pass, 1 check failure, 2 validation error
  std::vector<std::string> artifacts;  // files written under out_dir
};

// Dispatches the experiment, writes report.json plus one CSV per ladder
// (columns eps,value,residual) under out_dir (created if missing; empty =
// current directory).  All file writes are write-temp-then-rename.
RunResult run(const ExperimentConfig& config, const std::string& out_dir);

void write_atomic(const std::string& path, const std::string& content);

}  // namespace dilatlab
