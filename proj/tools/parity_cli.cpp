// parity: scenario runner.
//
//   parity run <file> [--out DIR] [--seed N] [--threads N]
//   parity verify <file> <golden> [--tol X]
//   parity list-scenarios [--dir DIR]
//
// Exit codes: 0 ok, 1 verify mismatch, 2 unreadable/invalid scenario,
// 3 dimension cap exceeded, 4 invariant violated during simulation.
// PARITY_THREADS overrides --threads.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "parity/scenario.hpp"

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitParse = 2;
constexpr int kExitDimension = 3;
constexpr int kExitInvariant = 4;

void apply_threads(int requested) {
  if (const char* env = std::getenv("PARITY_THREADS")) {
    try {
      requested = std::stoi(env);
    } catch (const std::exception&) {
      throw parity::ScenarioError("PARITY_THREADS is not an integer");
    }
  }
  if (requested < 0) throw parity::ScenarioError("thread count must be non-negative");
  parity::set_kernel_threads(requested);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parity::ScenarioError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modulo-game interference scenarios"};
  app.require_subcommand(1);

  std::string file;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;
  auto* run = app.add_subcommand("run", "Run a scenario and write its report");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--threads", threads, "Worker threads (0 = runtime default)");

  std::string golden;
  double tol = 1e-9;
  auto* verify = app.add_subcommand("verify", "Re-run a scenario and compare with a golden report");
  verify->add_option("file", file, "Scenario file")->required();
  verify->add_option("golden", golden, "Golden report (.report.jsonl)")->required();
  verify->add_option("--tol", tol, "Absolute tolerance for numeric fields");
  verify->add_option("--threads", threads, "Worker threads (0 = runtime default)");

  std::string dir = PARITY_SCENARIO_DIR;
  auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");
  list->add_option("--dir", dir, "Scenario directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*list) {
      for (const auto& path : parity::list_scenarios(dir)) std::cout << path.stem().string() << '\t' << path.string() << '\n';
      return 0;
    }
    apply_threads(threads);
    const parity::Scenario scenario = parity::load_scenario(file);
    if (*run) {
      parity::RunOptions options;
      if (*seed_opt) options.seed = seed;
      const parity::RunResult result = parity::run_scenario(scenario, options);
      parity::write_outputs(scenario, result, out_dir);
      std::cout << scenario.name << ": " << result.records.size() << " records, " << result.wall_seconds << " s\n";
      return 0;
    }
    const parity::RunResult result = parity::run_scenario(scenario);
    const auto expected = parity::parse_report(slurp(golden));
    const parity::VerifyResult v = parity::compare_reports(result.records, expected, tol);
    if (v.pass) {
      std::cout << scenario.name << ": PASS (" << expected.size() << " records)\n";
      return 0;
    }
    std::cout << scenario.name << ": FAIL, " << v.mismatches.size() << " mismatches\n";
    for (std::size_t i = 0; i < v.mismatches.size() && i < 20; ++i) std::cout << "  " << v.mismatches[i] << '\n';
    return kExitMismatch;
  } catch (const parity::DimensionCapError& e) {
    std::cerr << "dimension cap: " << e.what() << '\n';
    return kExitDimension;
  } catch (const parity::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const parity::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return kExitParse;
  } catch (const parity::DomainError& e) {
    std::cerr << "invalid scenario content: " << e.what() << '\n';
    return kExitParse;
  }
}
