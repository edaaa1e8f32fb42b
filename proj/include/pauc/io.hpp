#pragma once

// Trial data ingest, JSON configuration, and report formatting.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pauc/contrasts.hpp"
#include "pauc/estimator.hpp"
#include "pauc/inference.hpp"
#include "pauc/simulation.hpp"

namespace pauc {

// Malformed input data (exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or command line (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV with a header row: subject id, disease status (0 = non-diseased,
// 1 = diseased), then one column per marker. '.' is the decimal separator
// and empty cells are rejected.
struct TrialDataset {
  std::vector<std::string> marker_names;
  std::vector<std::string> nondiseased_ids;
  std::vector<std::string> diseased_ids;
  DiagnosticSample sample;
};

TrialDataset read_trial_csv(std::istream& in, const std::string& source = "<input>");
TrialDataset read_trial_csv_file(const std::string& path);
void write_trial_csv(std::ostream& out, const TrialDataset& data);

// Empirical ROC vertices (FPR, TPR) = (1 - F_n(t), 1 - G_n(t)), from (0, 0)
// at the largest observation down to (1, 1) at t = -inf.
struct RocPoint {
  double threshold;  // -inf for the final vertex
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> vertices;
  std::optional<ExtendedReal> lower_cut;  // a = quantile(xi, 1 - p)
  std::optional<ExtendedReal> upper_cut;  // b = quantile(eta, 1 - q)
  std::vector<RocPoint> segment;          // vertices with a <= t <= b
};

RocCurve empirical_roc(const Sample& nondiseased, const Sample& diseased,
                       const std::optional<TrimSpec>& trim = std::nullopt);

// JSON round trips for configuration objects.
MarginalSpec marginal_from_json(const nlohmann::json& j);
nlohmann::json marginal_to_json(const MarginalSpec& m);

// {"type": "tukey"} | {"type": "dunnett", "reference": k (1-based)} |
// {"type": "interaction", "a_levels": a, "b_levels": b} |
// {"type": "custom", "rows": [[...], ...], "labels": [...]}
ContrastMatrix contrast_from_json(const nlohmann::json& j, std::size_t kappa);
nlohmann::json contrast_to_json(const ContrastMatrix& c);

TrimSpec trim_from_json(const nlohmann::json& j);
std::vector<TrimSpec> parse_trim_grid(const std::string& text);  // "1,0;0.8,0.6"

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& s);

nlohmann::json mct_result_to_json(const MctResult& r, const ContrastMatrix& c,
                                  const TrimSpec& trim);
nlohmann::json experiment_report_to_json(const ExperimentReport& r);
nlohmann::json roc_to_json(const std::string& marker, const RocCurve& roc);

// Pure-ASCII table with right-aligned columns.
std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

std::string format_number(double v, int precision = 4);

nlohmann::json read_json_file(const std::string& path);

}  // namespace pauc
