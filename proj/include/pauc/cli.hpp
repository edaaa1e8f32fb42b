#pragma once

// Command-line front end. Every command writes its report to `out` and
// returns a process exit code: 0 on success, 1 for usage or configuration
// errors, 2 for malformed data.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pauc/estimator.hpp"
#include "pauc/simulation.hpp"

namespace pauc {

enum class OutputFormat { kJson, kTable };

struct TestCommand {
  std::string data_path;
  std::optional<std::string> config_path;
  std::optional<TrimSpec> trim;
  std::optional<std::vector<TrimSpec>> grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> bootstrap_reps;
  std::optional<double> delta;
  unsigned workers = 1;
  OutputFormat out = OutputFormat::kTable;
};

struct SimulateCommand {
  std::optional<std::string> preset;
  std::optional<std::string> config_path;
  std::optional<std::vector<std::size_t>> n_grid;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> bootstrap_reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> lambdas;
  std::optional<std::vector<TrimSpec>> trims;
  unsigned workers = 1;
  OutputFormat out = OutputFormat::kTable;
};

struct RocCommand {
  std::string data_path;
  std::optional<TrimSpec> trim;
  OutputFormat out = OutputFormat::kJson;
};

// One row of a simulation table: a procedure (trim) at an effect size.
// lambda absent means a type-I error row.
struct PlanRow {
  TrimSpec trim = TrimSpec::total();
  std::optional<double> lambda;
};

// A scenario plus the grid of rows and group sizes to run it over.
struct SimulationPlan {
  ScenarioSpec scenario;
  std::vector<std::size_t> n_grid;
  std::vector<PlanRow> rows;
  std::uint64_t seed = 1;
};

// Names of the built-in presets ("table1", "table2", "table3").
std::vector<std::string> preset_names();
nlohmann::json preset_json(const std::string& name);

// Accepts {"scenario": {...}, "rows": [...], "n_grid": [...], "seed": s},
// {"preset": name, <overrides>} or a bare scenario object.
SimulationPlan plan_from_json(const nlohmann::json& j);
SimulationPlan preset_plan(const std::string& name);

struct PlanResult {
  ExperimentReport report;
  PlanRow row;
};

std::vector<PlanResult> run_plan(const SimulationPlan& plan, unsigned workers = 1);

int cmd_test(const TestCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_roc(const RocCommand& cmd, std::ostream& out, std::ostream& err);

// Parses argv (including the program name) and dispatches.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pauc
