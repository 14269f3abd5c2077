#pragma once

// Scenario files (JSON) and line-delimited reports.
//
// Scenario, schema_version 1:
//   name            string
//   kind            "strategy" | "raw" | "distribution" | "sweep"
//   seed            integer, default 0
//   game            optional {"nu": [...], "f": [...], "k": n}; unit weights otherwise
//   witness         bool, default true
//   witness_tol     number, default 1e-7
//   csv             bool, default true
//
// kind "strategy":
//   strategy        "binary_phase" | "dary_phase" | "paired_phase" |
//                   "classical_counting" | "random_pgm"
//   params          per strategy: d, nu, k, m, internal_dim, max_kraus, lossy
//   dephase         bool, default false
// kind "raw":
//   hilbert         {"k", "m", "internal_dims"}
//   d               modulus
//   prep            {"ket": [c...]} | {"rho": [[c...]...]} | {"random": {"rank"}}
//   program         {"local": [box][x][kraus] matrices} | {"joint": [config][tuple][kraus]}
//                   | {"random_local": {...}} | {"random_joint": {...}}
//   povm            {"effects": [matrices]} | {"pgm": {"nu": [...]}} | {"random": {}}
//   fold_outcome    default 0
//   dephase         bool, default false
// kind "distribution":
//   source          {"table": {"m", "d", "rows"}} | {"uniform": {"m", "d"}}
//                   | {"synthetic": {"m", "d", "n"}}
// kind "sweep":
//   sweep           "composition" {"moduli", "count"}
//                   | "random_programs" {"k", "m", "moduli", "count", "internal_dim",
//                                        "max_kraus", "lossy", "dephase"}
//
// Complex numbers are [re, im] pairs; a bare number is read as real.
// Matrices are arrays of rows.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "parity/strategies.hpp"

namespace parity {

inline constexpr int kSchemaVersion = 1;

/// Malformed scenario or report file.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  std::string kind;
  std::uint64_t seed = 0;
  bool witness = true;
  double witness_tol = kChannelTol;
  bool csv = true;
  nlohmann::json body;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  /// One JSON object per report line, in scenario order.
  std::vector<nlohmann::json> records;
  /// (m, d, nu, b, |J|, I) projection, empty when the scenario disables it.
  std::string csv;
  double wall_seconds = 0.0;
};

/// Executes a scenario. Throws ScenarioError / DomainError on bad content,
/// DimensionCapError before simulating oversized spaces, InvariantError when a
/// simulated object breaks a physical contract.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

std::string render_report(const std::vector<nlohmann::json>& records);
std::vector<nlohmann::json> parse_report(const std::string& text);

/// Writes <name>.report.jsonl, <name>.csv and <name>.timing.json into `dir`.
void write_outputs(const Scenario& scenario, const RunResult& result, const std::filesystem::path& dir);

struct VerifyResult {
  bool pass = true;
  std::vector<std::string> mismatches;
};

/// Fieldwise comparison: numbers within `tol`, everything else exact.
VerifyResult compare_reports(const std::vector<nlohmann::json>& actual, const std::vector<nlohmann::json>& expected,
                             double tol);

/// Scenario files (*.scenario) in `dir`, sorted by name.
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

// Helpers shared with the CLI and tests.
Complex complex_from_json(const nlohmann::json& j);
ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

/// Scenario document equivalent to a built-in strategy, with the `strategy`
/// discriminator set.
nlohmann::json strategy_scenario(const std::string& name, const std::string& strategy, const nlohmann::json& params);

/// Serializes an explicit strategy as a "raw" scenario body.
nlohmann::json strategy_to_raw_scenario(const std::string& name, const Strategy& strategy);

}  // namespace parity
