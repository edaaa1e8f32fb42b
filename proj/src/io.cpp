#include "pauc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace pauc {

using nlohmann::json;

namespace {

std::string trim_ws(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  for (;;) {
    const auto comma = rest.find(',');
    cells.push_back(trim_ws(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string location(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw UsageError(what + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw UsageError(what + ": row " + std::to_string(r + 1) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw UsageError(what + ": entry (" + std::to_string(r + 1) + "," +
                         std::to_string(c + 1) + ") is not a number");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json extended_to_json(const ExtendedReal& x) {
  if (x.is_neg_inf()) return "-inf";
  if (x.is_pos_inf()) return "inf";
  return x.value();
}

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw UsageError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(where + ": field '" + std::string(key) + "' has the wrong type");
  }
}

}  // namespace

TrialDataset read_trial_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim_ws(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw DataError(source + ": missing header row");
  if (header.size() < 3) {
    throw DataError(location(source, line_no) +
                    "header needs an id column, a status column and at least one marker");
  }
  // Strip a UTF-8 byte order mark.
  if (header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0] = header[0].substr(3);
  const std::size_t kappa = header.size() - 2;

  TrialDataset out{std::vector<std::string>(header.begin() + 2, header.end()), {}, {},
                   DiagnosticSample(PairedSample::from_rows({{0.0}, {1.0}}),
                                    PairedSample::from_rows({{0.0}, {1.0}}))};
  std::vector<std::vector<double>> xi_rows;
  std::vector<std::vector<double>> eta_rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim_ws(line).empty()) continue;
    const auto cells = split_csv_line(line);
    const std::string where = location(source, line_no);
    if (cells.size() != header.size()) {
      throw DataError(where + "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    }
    const std::string& id = cells[0];
    const std::string& status = cells[1];
    if (status != "0" && status != "1") {
      throw DataError(where + "subject '" + id + "' has status '" + status +
                      "', expected 0 or 1");
    }
    std::vector<double> markers(kappa);
    for (std::size_t i = 0; i < kappa; ++i) {
      const std::string& cell = cells[i + 2];
      if (cell.empty()) {
        throw DataError(where + "missing value for marker '" + header[i + 2] + "'");
      }
      const auto v = parse_double(cell);
      if (!v) {
        throw DataError(where + "marker '" + header[i + 2] + "' value '" + cell +
                        "' is not a finite number");
      }
      markers[i] = *v;
    }
    if (status == "0") {
      out.nondiseased_ids.push_back(id);
      xi_rows.push_back(std::move(markers));
    } else {
      out.diseased_ids.push_back(id);
      eta_rows.push_back(std::move(markers));
    }
  }
  if (xi_rows.size() < 2 || eta_rows.size() < 2) {
    throw DataError(source + ": need at least 2 subjects with status 0 and 2 with status 1 (found " +
                    std::to_string(xi_rows.size()) + " and " + std::to_string(eta_rows.size()) +
                    ")");
  }
  out.sample = DiagnosticSample(PairedSample::from_rows(xi_rows), PairedSample::from_rows(eta_rows));
  return out;
}

TrialDataset read_trial_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return read_trial_csv(in, path);
}

void write_trial_csv(std::ostream& out, const TrialDataset& data) {
  out << "id,status";
  for (const auto& name : data.marker_names) out << ',' << name;
  out << '\n';
  auto write_group = [&](const PairedSample& group, const std::vector<std::string>& ids,
                         int status) {
    for (std::size_t r = 0; r < group.rows(); ++r) {
      out << ids[r] << ',' << status;
      for (std::size_t i = 0; i < group.markers(); ++i) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, group.column(i).values()[r]);
        out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
      }
      out << '\n';
    }
  };
  write_group(data.sample.nondiseased(), data.nondiseased_ids, 0);
  write_group(data.sample.diseased(), data.diseased_ids, 1);
}

RocCurve empirical_roc(const Sample& nondiseased, const Sample& diseased,
                       const std::optional<TrimSpec>& trim) {
  std::vector<double> pooled(nondiseased.sorted().begin(), nondiseased.sorted().end());
  pooled.insert(pooled.end(), diseased.sorted().begin(), diseased.sorted().end());
  std::sort(pooled.begin(), pooled.end(), std::greater<>());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  const double a = static_cast<double>(nondiseased.size());
  const double b = static_cast<double>(diseased.size());
  auto point = [&](double t) {
    return RocPoint{t, 1.0 - static_cast<double>(nondiseased.count_at_most(t)) / a,
                    1.0 - static_cast<double>(diseased.count_at_most(t)) / b};
  };
  RocCurve roc;
  for (double t : pooled) roc.vertices.push_back(point(t));
  roc.vertices.push_back(RocPoint{-std::numeric_limits<double>::infinity(), 1.0, 1.0});

  if (trim) {
    roc.lower_cut = quantile(nondiseased, 1.0 - trim->p());
    roc.upper_cut = quantile(diseased, 1.0 - trim->q());
    for (const RocPoint& v : roc.vertices) {
      const bool above_a = roc.lower_cut->is_neg_inf() ||
                           (std::isfinite(v.threshold) && v.threshold >= roc.lower_cut->value());
      const bool below_b = std::isfinite(v.threshold) ? roc.upper_cut->at_least(v.threshold)
                                                      : true;
      if (above_a && below_b) roc.segment.push_back(v);
    }
  }
  return roc;
}

MarginalSpec marginal_from_json(const json& j) {
  const std::string where = "marginal";
  if (!j.is_object()) throw UsageError("marginal must be an object");
  try {
    return MarginalSpec(MarginalSpec::parse_kind(required<std::string>(j, "kind", where)),
                        required<double>(j, "mu", where), j.value("sigma", 1.0));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("marginal: ") + e.what());
  }
}

json marginal_to_json(const MarginalSpec& m) {
  return json{{"kind", m.kind_name()}, {"mu", m.mu()}, {"sigma", m.sigma()}};
}

ContrastMatrix contrast_from_json(const json& j, std::size_t kappa) {
  const std::string where = "contrast";
  if (j.is_string()) return contrast_from_json(json{{"type", j.get<std::string>()}}, kappa);
  if (!j.is_object()) throw UsageError("contrast must be an object or a preset name");
  const std::string type = required<std::string>(j, "type", where);
  try {
    ContrastMatrix c = [&]() -> ContrastMatrix {
      if (type == "tukey") return tukey(kappa);
      if (type == "dunnett") {
        const auto ref = j.value("reference", 1);
        if (ref < 1) throw UsageError("contrast: reference is 1-based");
        return dunnett(kappa, static_cast<std::size_t>(ref - 1));
      }
      if (type == "interaction") {
        return interaction(required<std::size_t>(j, "a_levels", where),
                           required<std::size_t>(j, "b_levels", where));
      }
      if (type == "custom") {
        if (!j.contains("rows")) throw UsageError("contrast: custom contrasts need 'rows'");
        return custom(matrix_from_json(j.at("rows"), "contrast rows"),
                      j.value("labels", std::vector<std::string>{}));
      }
      throw UsageError("contrast: unknown type '" + type + "'");
    }();
    if (c.markers() != kappa) {
      throw UsageError("contrast has " + std::to_string(c.markers()) + " columns but there are " +
                       std::to_string(kappa) + " markers");
    }
    return c;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("contrast: ") + e.what());
  }
}

json contrast_to_json(const ContrastMatrix& c) {
  return json{{"type", "custom"}, {"rows", matrix_to_json(c.rows())}, {"labels", c.labels()}};
}

TrimSpec trim_from_json(const json& j) {
  try {
    if (j.is_array() && j.size() == 2) return TrimSpec(j[0].get<double>(), j[1].get<double>());
    if (j.is_object()) return TrimSpec(j.at("p").get<double>(), j.at("q").get<double>());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("trim: ") + e.what());
  } catch (const json::exception&) {
  }
  throw UsageError("trim must be [p, q] or {\"p\": .., \"q\": ..}");
}

std::vector<TrimSpec> parse_trim_grid(const std::string& text) {
  std::vector<TrimSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (trim_ws(item).empty()) continue;
    const auto parts = split_csv_line(item);
    if (parts.size() != 2) throw UsageError("grid entry '" + item + "' must be p,q");
    const auto p = parse_double(parts[0]);
    const auto q = parse_double(parts[1]);
    if (!p || !q) throw UsageError("grid entry '" + item + "' is not numeric");
    try {
      out.emplace_back(*p, *q);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("grid: ") + e.what());
    }
  }
  if (out.empty()) throw UsageError("empty (p,q) grid");
  return out;
}

ScenarioSpec scenario_from_json(const json& j) {
  const std::string where = "scenario";
  if (!j.is_object()) throw UsageError("scenario must be an object");
  ScenarioSpec s;
  s.name = j.value("name", std::string("custom"));
  if (!j.contains("nondiseased") || !j.contains("diseased")) {
    throw UsageError("scenario: needs 'nondiseased' and 'diseased' marginal lists");
  }
  for (const auto& m : j.at("nondiseased")) s.nondiseased.push_back(marginal_from_json(m));
  for (const auto& m : j.at("diseased")) s.diseased.push_back(marginal_from_json(m));
  if (!j.contains("spearman")) throw UsageError("scenario: missing field 'spearman'");
  s.spearman = matrix_from_json(j.at("spearman"), "scenario spearman");
  s.group_size = j.value("group_size", s.group_size);
  if (j.contains("trim")) s.trim = trim_from_json(j.at("trim"));
  s.contrast = contrast_from_json(j.value("contrast", json{{"type", "tukey"}}), s.nondiseased.size());
  s.delta = j.value("delta", s.delta);
  s.bootstrap_reps = j.value("bootstrap_reps", s.bootstrap_reps);
  s.sim_runs = j.value("sim_runs", s.sim_runs);
  if (j.contains("tuning")) {
    const json& t = j.at("tuning");
    EffectTuning tuning;
    const auto marker = required<long>(t, "marker", "scenario tuning");
    if (marker < 1) throw UsageError("scenario tuning: marker is 1-based");
    tuning.marker = static_cast<std::size_t>(marker - 1);
    const auto dir = required<std::vector<double>>(t, "direction", "scenario tuning");
    tuning.direction = Eigen::Map<const Eigen::VectorXd>(dir.data(), static_cast<Eigen::Index>(dir.size()));
    s.tuning = tuning;
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return s;
}

json scenario_to_json(const ScenarioSpec& s) {
  json j;
  j["name"] = s.name;
  j["nondiseased"] = json::array();
  for (const auto& m : s.nondiseased) j["nondiseased"].push_back(marginal_to_json(m));
  j["diseased"] = json::array();
  for (const auto& m : s.diseased) j["diseased"].push_back(marginal_to_json(m));
  j["spearman"] = matrix_to_json(s.spearman);
  j["group_size"] = s.group_size;
  j["trim"] = {s.trim.p(), s.trim.q()};
  j["contrast"] = contrast_to_json(s.contrast);
  j["delta"] = s.delta;
  j["bootstrap_reps"] = s.bootstrap_reps;
  j["sim_runs"] = s.sim_runs;
  if (s.tuning) {
    j["tuning"] = {{"marker", s.tuning->marker + 1},
                   {"direction", std::vector<double>(s.tuning->direction.begin(),
                                                     s.tuning->direction.end())}};
  }
  return j;
}

json mct_result_to_json(const MctResult& r, const ContrastMatrix& c, const TrimSpec& trim) {
  json hyps = json::array();
  for (std::size_t i = 0; i < c.hypotheses(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    hyps.push_back({{"label", c.labels()[i]},
                    {"estimate", r.estimates[k]},
                    {"variance", r.variances[k]},
                    {"statistic", r.statistics[k]},
                    {"adjusted_p", r.adjusted_p[k]},
                    {"reject", static_cast<bool>(r.decisions[i])},
                    {"ci_lower", r.intervals[i].first},
                    {"ci_upper", r.intervals[i].second},
                    {"degenerate_variance", static_cast<bool>(r.degenerate_flags[i])}});
  }
  return json{{"trim", {{"p", trim.p()}, {"q", trim.q()}}},
              {"delta", r.delta},
              {"critical_value", r.critical_value},
              {"global_p", r.global_p},
              {"global_reject", r.global_rejection()},
              {"bootstrap_reps", r.bootstrap_reps_used},
              {"degenerate_replicates", r.degenerate_replicates},
              {"hypotheses", hyps},
              {"warnings", r.warnings}};
}

json experiment_report_to_json(const ExperimentReport& r) {
  json j{{"scenario", r.scenario},
         {"trim", {{"p", r.trim.p()}, {"q", r.trim.q()}}},
         {"n", r.group_size},
         {"delta", r.delta},
         {"bootstrap_reps", r.bootstrap_reps},
         {"rejection_rate", r.rejection_rate},
         {"per_hypothesis_rates", r.per_hypothesis_rates},
         {"runs", r.runs},
         {"mc_standard_error", r.mc_standard_error},
         {"wall_time_seconds", r.wall_time_seconds},
         {"seed", r.seed},
         {"degenerate_runs", r.degenerate_runs}};
  j["lambda"] = r.lambda ? json(*r.lambda) : json(nullptr);
  j["tuned_mu"] = r.tuned_mu ? json(*r.tuned_mu) : json(nullptr);
  return j;
}

json roc_to_json(const std::string& marker, const RocCurve& roc) {
  auto points = [](const std::vector<RocPoint>& pts) {
    json arr = json::array();
    for (const auto& p : pts) {
      arr.push_back({{"threshold", std::isfinite(p.threshold) ? json(p.threshold) : json("-inf")},
                     {"fpr", p.fpr},
                     {"tpr", p.tpr}});
    }
    return arr;
  };
  json j{{"marker", marker}, {"vertices", points(roc.vertices)}};
  if (roc.lower_cut) {
    j["lower_cut"] = extended_to_json(*roc.lower_cut);
    j["upper_cut"] = extended_to_json(*roc.upper_cut);
    j["segment"] = points(roc.segment);
  }
  return j;
}

std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < row.size() ? row[c] : "";
      if (c > 0) os << "  ";
      if (c == 0) {
        os << cell << std::string(width[c] - cell.size(), ' ');
      } else {
        os << std::string(width[c] - cell.size(), ' ') << cell;
      }
    }
    os << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) emit(row);
  return os.str();
}

std::string format_number(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

}  // namespace pauc
