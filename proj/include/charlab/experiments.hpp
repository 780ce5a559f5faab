#pragma once

// Experiment runner: configuration in, report with checked invariants out.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "charlab/config.hpp"

namespace charlab {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind {
  GroupInfo,
  CharTable,
  LangCheck,
  DftCheck,
  GaussEqui,
  Kloosterman,
  Hyp,
  StratReport,
  DensityReport,
  DescendCoset,
};

std::optional<ExperimentKind> parse_kind(std::string_view name);
std::string to_string(ExperimentKind kind);
const std::vector<ExperimentKind>& all_kinds();

struct Check {
  std::string name;
  std::string module;
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

// Written as <name>.csv and <name>.dat.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  std::string csv() const;
  std::string dat() const;
};

struct RunOptions {
  unsigned workers = 1;
  u64 seed = 0;
};

struct Report {
  std::string kind;
  nlohmann::json config;  // echo, including workers and seed
  double seconds = 0;
  nlohmann::json payload;
  std::vector<Check> checks;
  std::vector<Table> tables;

  bool ok() const;
  nlohmann::json to_json() const;
  // Serialized payload, the part covered by the determinism contract.
  std::string payload_bytes() const { return payload.dump(); }
};

// Throws ConfigError (before any computation) or the module error.
Report run_experiment(ExperimentKind kind, const Config& cfg, const RunOptions& opt);

// report.json plus one .csv and one .dat per table.
void write_outputs(const Report& report, const std::filesystem::path& dir);

struct SelftestOptions {
  bool corrupt_modulus = false;
  unsigned workers = 8;
};

// Invariant suite at the smallest scales. A failing module marks every later
// module skipped.
Report selftest(const SelftestOptions& opt = {});

// A small configuration per kind, as used by selftest.
Config selftest_config(ExperimentKind kind);

}  // namespace charlab
