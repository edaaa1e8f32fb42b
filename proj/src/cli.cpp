#include "pauc/cli.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pauc/inference.hpp"
#include "pauc/io.hpp"
#include "pauc_presets.hpp"

namespace pauc {

using nlohmann::json;

namespace {

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError(what + ": '" + item + "' is not a non-negative integer");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError(what + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

TrimSpec parse_single_trim(const std::string& text) {
  const auto trims = parse_trim_grid(text);
  if (trims.size() != 1) throw UsageError("--trim takes a single p,q pair");
  return trims.front();
}

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::kJson;
  if (s == "table") return OutputFormat::kTable;
  throw UsageError("--out must be json or table");
}

std::string trim_label(const TrimSpec& t) {
  std::ostringstream os;
  os << "(" << t.p() << "," << t.q() << ")";
  return os.str();
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<PlanRow> rows_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("plan: 'rows' must be a non-empty array");
  std::vector<PlanRow> rows;
  for (const auto& r : j) {
    PlanRow row;
    if (!r.contains("trim")) throw UsageError("plan: every row needs a 'trim'");
    row.trim = trim_from_json(r.at("trim"));
    if (r.contains("lambda") && !r.at("lambda").is_null()) row.lambda = r.at("lambda").get<double>();
    rows.push_back(row);
  }
  return rows;
}

void apply_plan_overrides(SimulationPlan& plan, const json& j) {
  if (j.contains("n_grid")) plan.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  if (j.contains("rows")) plan.rows = rows_from_json(j.at("rows"));
  if (j.contains("seed")) plan.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("sim_runs")) plan.scenario.sim_runs = j.at("sim_runs").get<std::size_t>();
  if (j.contains("bootstrap_reps")) {
    plan.scenario.bootstrap_reps = j.at("bootstrap_reps").get<std::size_t>();
  }
}

}  // namespace

std::vector<std::string> preset_names() { return {"table1", "table2", "table3"}; }

json preset_json(const std::string& name) {
  const char* text = nullptr;
  if (name == "table1") text = presets::kTable1;
  if (name == "table2") text = presets::kTable2;
  if (name == "table3") text = presets::kTable3;
  if (!text) throw UsageError("unknown preset '" + name + "' (expected table1, table2 or table3)");
  return json::parse(text);
}

SimulationPlan plan_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("simulation config must be an object");
  if (j.contains("preset")) {
    SimulationPlan plan = plan_from_json(preset_json(j.at("preset").get<std::string>()));
    apply_plan_overrides(plan, j);
    return plan;
  }
  const bool wrapped = j.contains("scenario");
  SimulationPlan plan{scenario_from_json(wrapped ? j.at("scenario") : j), {}, {}, 1};
  plan.n_grid = {plan.scenario.group_size};
  plan.rows = {PlanRow{plan.scenario.trim, std::nullopt}};
  if (wrapped) apply_plan_overrides(plan, j);
  return plan;
}

SimulationPlan preset_plan(const std::string& name) { return plan_from_json(preset_json(name)); }

std::vector<PlanResult> run_plan(const SimulationPlan& plan, unsigned workers) {
  if (plan.scenario.sim_runs == 0) throw UsageError("sim_runs must be positive");
  if (plan.n_grid.empty()) throw UsageError("empty n grid");
  std::vector<PlanResult> out;
  for (const PlanRow& row : plan.rows) {
    ScenarioSpec base = plan.scenario;
    base.trim = row.trim;
    if (row.lambda) base = with_effect(base, *row.lambda);
    for (std::size_t n : plan.n_grid) {
      if (n < 2) throw UsageError("group sizes must be at least 2");
      ScenarioSpec spec = base;
      spec.group_size = n;
      ExperimentReport rep = row.lambda ? run_power_experiment(spec, plan.seed, workers)
                                        : run_type1_experiment(spec, plan.seed, workers);
      out.push_back(PlanResult{std::move(rep), row});
    }
  }
  return out;
}

int cmd_test(const TestCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TrialDataset data = read_trial_csv_file(cmd.data_path);
    const std::size_t kappa = data.sample.markers();
    const json config = cmd.config_path ? read_json_file(*cmd.config_path) : json::object();
    if (!config.is_object()) throw UsageError("test config must be an object");

    std::optional<ContrastMatrix> contrast;
    if (config.contains("contrast")) {
      contrast = contrast_from_json(config.at("contrast"), kappa);
    } else {
      if (kappa < 2) throw UsageError("a single marker needs a custom contrast");
      contrast = tukey(kappa);
    }

    std::vector<TrimSpec> trims;
    bool grid_mode = false;
    if (cmd.grid) {
      trims = *cmd.grid;
      grid_mode = true;
    } else if (cmd.trim) {
      trims = {*cmd.trim};
    } else if (config.contains("grid")) {
      for (const auto& t : config.at("grid")) trims.push_back(trim_from_json(t));
      if (trims.empty()) throw UsageError("config: 'grid' is empty");
      grid_mode = true;
    } else if (config.contains("trim")) {
      trims = {trim_from_json(config.at("trim"))};
    } else {
      trims = {TrimSpec::total()};
    }

    MctOptions opts;
    opts.delta = cmd.delta.value_or(config.value("delta", 0.05));
    opts.bootstrap_reps = cmd.bootstrap_reps.value_or(config.value("bootstrap_reps", std::size_t{2000}));
    opts.seed = cmd.seed.value_or(config.value("seed", std::uint64_t{1}));
    opts.workers = cmd.workers;
    opts.assume_independent_groups = config.value("assume_independent_groups", true);

    std::vector<MctResult> results;
    for (const TrimSpec& t : trims) results.push_back(run_mct(data.sample, *contrast, t, opts));
    std::vector<double> raw;
    for (const auto& r : results) raw.push_back(r.global_p);
    const std::vector<double> holm = holm_adjust(raw);

    if (cmd.out == OutputFormat::kJson) {
      json j{{"markers", data.marker_names},
             {"alpha", data.sample.alpha()},
             {"beta", data.sample.beta()},
             {"seed", opts.seed},
             {"contrast", contrast_to_json(*contrast)},
             {"results", json::array()}};
      for (std::size_t k = 0; k < trims.size(); ++k) {
        j["results"].push_back(mct_result_to_json(results[k], *contrast, trims[k]));
      }
      if (grid_mode) {
        json g{{"trims", json::array()}, {"raw_p", raw}, {"holm_p", holm}};
        for (const auto& t : trims) g["trims"].push_back({{"p", t.p()}, {"q", t.q()}});
        j["grid"] = g;
      }
      out << j.dump(2) << '\n';
    } else {
      out << "markers: " << kappa << "  non-diseased: " << data.sample.alpha()
          << "  diseased: " << data.sample.beta() << "  B: " << opts.bootstrap_reps
          << "  seed: " << opts.seed << "\n\n";
      for (std::size_t k = 0; k < trims.size(); ++k) {
        const MctResult& r = results[k];
        out << "trim " << trim_label(trims[k]) << "  critical value " << format_number(r.critical_value)
            << "  global p " << format_number(r.global_p)
            << (r.global_rejection() ? "  (reject)" : "") << '\n';
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < contrast->hypotheses(); ++i) {
          const auto e = static_cast<Eigen::Index>(i);
          rows.push_back({contrast->labels()[i], format_number(r.estimates[e]),
                          format_number(r.statistics[e], 3), format_number(r.adjusted_p[e]),
                          format_number(r.intervals[i].first), format_number(r.intervals[i].second),
                          r.decisions[i] ? "yes" : "no"});
        }
        out << format_table({"contrast", "estimate", "T", "adj. p", "lower", "upper", "reject"}, rows);
        for (const auto& w : r.warnings) out << "warning: " << w << '\n';
        out << '\n';
      }
      if (grid_mode) {
        std::vector<std::string> header{"(p,q)"};
        std::vector<std::string> raw_row{"raw p"};
        std::vector<std::string> holm_row{"Holm p"};
        for (std::size_t k = 0; k < trims.size(); ++k) {
          header.push_back(trim_label(trims[k]));
          raw_row.push_back(format_number(raw[k], 3));
          holm_row.push_back(format_number(holm[k], 3));
        }
        out << format_table(header, {raw_row, holm_row});
      }
    }
    return 0;
  });
}

int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cmd.preset && cmd.config_path) throw UsageError("give either --preset or --config, not both");
    if (!cmd.preset && !cmd.config_path) throw UsageError("simulate needs --preset or --config");
    SimulationPlan plan =
        cmd.preset ? preset_plan(*cmd.preset) : plan_from_json(read_json_file(*cmd.config_path));
    if (cmd.runs) plan.scenario.sim_runs = *cmd.runs;
    if (cmd.bootstrap_reps) plan.scenario.bootstrap_reps = *cmd.bootstrap_reps;
    if (cmd.n_grid) plan.n_grid = *cmd.n_grid;
    if (cmd.seed) plan.seed = *cmd.seed;
    if (plan.scenario.sim_runs == 0) throw UsageError("sim_runs must be positive");

    if (cmd.lambdas) {
      std::vector<TrimSpec> trims;
      if (cmd.trims) {
        trims = *cmd.trims;
      } else {
        for (const auto& r : plan.rows) {
          if (std::find(trims.begin(), trims.end(), r.trim) == trims.end()) trims.push_back(r.trim);
        }
      }
      plan.rows.clear();
      for (const auto& t : trims) {
        for (double l : *cmd.lambdas) plan.rows.push_back(PlanRow{t, l});
      }
    } else if (cmd.trims) {
      std::vector<PlanRow> rows;
      for (const auto& t : *cmd.trims) {
        bool found = false;
        for (const auto& r : plan.rows) {
          if (r.trim == t) {
            rows.push_back(r);
            found = true;
          }
        }
        if (!found) rows.push_back(PlanRow{t, std::nullopt});
      }
      plan.rows = rows;
    }
    plan.scenario.validate();

    const std::vector<PlanResult> results = run_plan(plan, cmd.workers);

    if (cmd.out == OutputFormat::kJson) {
      json j{{"scenario", plan.scenario.name},
             {"seed", plan.seed},
             {"sim_runs", plan.scenario.sim_runs},
             {"bootstrap_reps", plan.scenario.bootstrap_reps},
             {"n_grid", plan.n_grid},
             {"reports", json::array()}};
      for (const auto& r : results) j["reports"].push_back(experiment_report_to_json(r.report));
      out << j.dump(2) << '\n';
    } else {
      std::vector<std::string> header{"(p,q)", "lambda"};
      for (std::size_t n : plan.n_grid) header.push_back("n=" + std::to_string(n));
      std::vector<std::vector<std::string>> rows;
      for (std::size_t k = 0; k < results.size(); k += plan.n_grid.size()) {
        const PlanRow& row = results[k].row;
        std::vector<std::string> cells{trim_label(row.trim),
                                       row.lambda ? format_number(*row.lambda, 3) : "0"};
        for (std::size_t c = 0; c < plan.n_grid.size(); ++c) {
          cells.push_back(format_number(results[k + c].report.rejection_rate));
        }
        rows.push_back(cells);
      }
      out << "scenario " << plan.scenario.name << "  runs " << plan.scenario.sim_runs << "  B "
          << plan.scenario.bootstrap_reps << "  delta " << plan.scenario.delta << "  seed "
          << plan.seed << '\n';
      out << format_table(header, rows);
    }
    return 0;
  });
}

int cmd_roc(const RocCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TrialDataset data = read_trial_csv_file(cmd.data_path);
    json curves = json::array();
    std::ostringstream text;
    for (std::size_t i = 0; i < data.sample.markers(); ++i) {
      const RocCurve roc = empirical_roc(data.sample.nondiseased().column(i),
                                         data.sample.diseased().column(i), cmd.trim);
      curves.push_back(roc_to_json(data.marker_names[i], roc));
      text << "marker " << data.marker_names[i];
      if (roc.lower_cut) {
        text << "  a = " << format_number(roc.lower_cut->to_double())
             << "  b = " << format_number(roc.upper_cut->to_double());
      }
      text << '\n';
      std::vector<std::vector<std::string>> rows;
      for (const auto& v : roc.vertices) {
        rows.push_back({format_number(v.threshold), format_number(v.fpr), format_number(v.tpr)});
      }
      text << format_table({"threshold", "fpr", "tpr"}, rows) << '\n';
    }
    if (cmd.out == OutputFormat::kJson) {
      json j{{"markers", curves}};
      if (cmd.trim) j["trim"] = {{"p", cmd.trim->p()}, {"q", cmd.trim->q()}};
      out << j.dump(2) << '\n';
    } else {
      out << text.str();
    }
    return 0;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simultaneous inference for partial areas under ROC curves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pauc 0.1.0");

  std::string data_path;
  std::string config_path;
  std::string preset;
  std::string trim_text;
  std::string grid_text;
  std::string n_text;
  std::string lambda_text;
  std::string out_text;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::size_t runs = 0;
  double delta = 0.05;
  unsigned workers = 1;

  auto* test = app.add_subcommand("test", "Run the multiple contrast test on a CSV dataset");
  test->add_option("data", data_path, "CSV file: id, status (0/1), marker columns")->required();
  test->add_option("-c,--config", config_path, "JSON test configuration");
  test->add_option("--trim", trim_text, "single p,q pair");
  test->add_option("--grid", grid_text, "list of p,q pairs separated by ';'");
  test->add_option("--seed", seed, "bootstrap seed");
  test->add_option("--bootstrap-reps", reps, "bootstrap replicates B");
  test->add_option("--delta", delta, "family-wise level");
  test->add_option("--workers", workers, "worker threads (0 = all cores)");
  test->add_option("--out", out_text, "json or table");

  auto* sim = app.add_subcommand("simulate", "Run a type-I error or power experiment");
  sim->add_option("--preset", preset, "table1, table2 or table3");
  sim->add_option("-c,--config", config_path, "JSON scenario or plan");
  sim->add_option("--n", n_text, "comma-separated group sizes");
  sim->add_option("--runs", runs, "Monte Carlo runs");
  sim->add_option("--bootstrap-reps", reps, "bootstrap replicates B");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--lambda", lambda_text, "comma-separated effect sizes");
  sim->add_option("--grid,--trim", grid_text, "p,q pairs separated by ';'");
  sim->add_option("--workers", workers, "worker threads (0 = all cores)");
  sim->add_option("--out", out_text, "json or table");

  auto* roc = app.add_subcommand("roc", "Emit empirical ROC vertices per marker");
  roc->add_option("data", data_path, "CSV file")->required();
  roc->add_option("--trim", trim_text, "p,q pair marking the relevant segment");
  roc->add_option("--out", out_text, "json or table");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  return guarded(err, [&]() -> int {
    if (test->parsed()) {
      TestCommand cmd;
      cmd.data_path = data_path;
      if (!config_path.empty()) cmd.config_path = config_path;
      if (!trim_text.empty()) cmd.trim = parse_single_trim(trim_text);
      if (!grid_text.empty()) cmd.grid = parse_trim_grid(grid_text);
      if (test->count("--seed")) cmd.seed = seed;
      if (test->count("--bootstrap-reps")) cmd.bootstrap_reps = reps;
      if (test->count("--delta")) cmd.delta = delta;
      cmd.workers = workers;
      cmd.out = out_text.empty() ? OutputFormat::kTable : parse_format(out_text);
      return cmd_test(cmd, out, err);
    }
    if (sim->parsed()) {
      SimulateCommand cmd;
      if (!preset.empty()) cmd.preset = preset;
      if (!config_path.empty()) cmd.config_path = config_path;
      if (!n_text.empty()) cmd.n_grid = parse_size_list(n_text, "--n");
      if (sim->count("--runs")) cmd.runs = runs;
      if (sim->count("--bootstrap-reps")) cmd.bootstrap_reps = reps;
      if (sim->count("--seed")) cmd.seed = seed;
      if (!lambda_text.empty()) cmd.lambdas = parse_double_list(lambda_text, "--lambda");
      if (!grid_text.empty()) cmd.trims = parse_trim_grid(grid_text);
      cmd.workers = workers;
      cmd.out = out_text.empty() ? OutputFormat::kTable : parse_format(out_text);
      return cmd_simulate(cmd, out, err);
    }
    RocCommand cmd;
    cmd.data_path = data_path;
    if (!trim_text.empty()) cmd.trim = parse_single_trim(trim_text);
    cmd.out = out_text.empty() ? OutputFormat::kJson : parse_format(out_text);
    return cmd_roc(cmd, out, err);
  });
}

}  // namespace pauc
