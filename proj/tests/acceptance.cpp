// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// PAUC_ACCEPTANCE_WORKERS overrides the worker count (default: all cores).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "pauc/cli.hpp"
#include "pauc/covariance.hpp"
#include "pauc/inference.hpp"
#include "pauc/simulation.hpp"

using pauc::TrimSpec;

namespace {

unsigned workers() {
  if (const char* env = std::getenv("PAUC_ACCEPTANCE_WORKERS")) return std::max(1, std::atoi(env));
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Runs selected rows of a preset at one group size.
std::vector<pauc::PlanResult> run_rows(const std::string& preset, std::size_t n, std::size_t runs,
                                       const std::vector<pauc::PlanRow>& rows) {
  auto plan = pauc::preset_plan(preset);
  plan.n_grid = {n};
  plan.rows = rows;
  plan.scenario.sim_runs = runs;
  plan.scenario.bootstrap_reps = 1000;
  return pauc::run_plan(plan, workers());
}

Outcome table1_level() {
  const auto r = run_rows("table1", 100, 2000, {{TrimSpec(0.8, 0.6), std::nullopt}});
  const double rate = r[0].report.rejection_rate;
  return {std::abs(rate - 0.0498) <= 0.020, fmt("rate %.4f, target 0.0498 +- 0.020", rate)};
}

Outcome table1_small_sample() {
  const auto r = run_rows("table1", 30, 2000, {{TrimSpec(0.2, 0.0), std::nullopt}});
  const double rate = r[0].report.rejection_rate;
  return {rate < 0.03, fmt("rate %.4f, bound 0.03", rate)};
}

Outcome table2_power_gap() {
  const auto r = run_rows("table2", 60, 1000, {{TrimSpec(0.8, 0.6), 0.107}, {TrimSpec::total(), 0.107}});
  const double a = r[0].report.rejection_rate;
  const double b = r[1].report.rejection_rate;
  return {a - b > 0.10, fmt("power (0.8,0.6) %.3f, (1,0) %.3f, gap %.3f > 0.10", a, b, a - b)};
}

Outcome table3_ordering() {
  const auto r = run_rows("table3", 100, 1000,
                          {{TrimSpec(0.8, 0.6), 0.035}, {TrimSpec(0.6, 0.4), 0.035}, {TrimSpec::total(), 0.035}});
  const double a = r[0].report.rejection_rate;
  const double b = r[1].report.rejection_rate;
  const double c = r[2].report.rejection_rate;
  return {a - b > 0.05 && b - c > 0.05, fmt("power %.3f > %.3f > %.3f, gaps > 0.05", a, b, c)};
}

struct ExactSweep {
  double worst_equivalence = 0.0;
  double worst_reduction = 0.0;
};

// Shared by the equivalence and reduction criteria: 10^4 tie-free instances.
const ExactSweep& exact_sweep() {
  static const ExactSweep sweep = [] {
    ExactSweep s;
    oracle::Generator gen(20240601);
    for (int rep = 0; rep < 10000; ++rep) {
      const auto in = gen.tie_free(50, 4);
      const auto d = oracle::to_sample(in.xi, in.eta);
      const TrimSpec trim(in.p, in.q);
      const auto plug = pauc::estimate_pauc(d, trim).theta;
      const auto mw = pauc::estimate_pauc_trimmed_mw(d, trim).theta;
      s.worst_equivalence = std::max(s.worst_equivalence, (plug - mw).cwiseAbs().maxCoeff());
      const auto total = pauc::estimate_pauc(d, TrimSpec::total()).theta;
      for (std::size_t i = 0; i < in.xi.front().size(); ++i) {
        const double direct = oracle::mann_whitney(oracle::column(in.xi, i), oracle::column(in.eta, i));
        s.worst_reduction = std::max(s.worst_reduction, std::abs(total(i) - direct));
      }
    }
    return s;
  }();
  return sweep;
}

Outcome equivalence() {
  const double w = exact_sweep().worst_equivalence;
  return {w <= 1e-12, fmt("10000 instances, max |diff| %.3g", w)};
}

Outcome reduction() {
  const double w = exact_sweep().worst_reduction;
  return {w <= 1e-12, fmt("10000 instances, max |diff| %.3g", w)};
}

Outcome covariance_consistency() {
  pauc::ScenarioSpec spec;
  spec.nondiseased = {pauc::MarginalSpec::normal(0.0, 1.0)};
  spec.diseased = {pauc::MarginalSpec::normal(0.5, 1.0)};
  spec.spearman = Eigen::MatrixXd::Identity(2, 2);
  spec.group_size = 2000;
  const TrimSpec trim(0.8, 0.6);
  const double theta = pauc::true_pauc(spec.nondiseased[0], spec.diseased[0], trim);
  const pauc::CopulaSampler sampler(spec);
  const int reps = 2000;
  double mean_sigma = 0.0;
  double mean_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    pauc::Rng rng(pauc::RngStream{777, static_cast<std::uint64_t>(r)});
    const auto d = sampler.sample(rng);
    const auto est = pauc::estimate_pauc(d, trim);
    mean_sigma += pauc::estimate_covariance(d, trim, est).sigma(0, 0);
    const double z = std::sqrt(static_cast<double>(d.alpha() + d.beta())) * (est.theta(0) - theta);
    mean_sq += z * z;
  }
  mean_sigma /= reps;
  mean_sq /= reps;
  const double rel = std::abs(mean_sigma - mean_sq) / mean_sq;
  return {rel <= 0.10, fmt("mean sigma %.5f, empirical %.5f, rel err %.3f", mean_sigma, mean_sq, rel)};
}

Outcome fwer() {
  // Markers 1 and 2 share a distribution; marker 3 is shifted.
  pauc::ScenarioSpec spec = pauc::preset_plan("table1").scenario;
  spec.name = "fwer";
  spec.nondiseased.assign(3, pauc::MarginalSpec::normal(0.0, 1.0));
  spec.diseased = {pauc::MarginalSpec::normal(0.5, 1.0), pauc::MarginalSpec::normal(0.5, 1.0),
                   pauc::MarginalSpec::normal(1.5, 1.0)};
  spec.tuning.reset();
  spec.group_size = 100;
  spec.trim = TrimSpec(0.8, 0.6);
  spec.contrast = pauc::tukey(3);
  spec.bootstrap_reps = 1000;
  spec.sim_runs = 2000;
  const auto rep = pauc::run_experiment(spec, 20240602, workers());
  const double rate = rep.per_hypothesis_rates[0];
  return {rate <= 0.07, fmt("P(reject 1-2) %.4f <= 0.07, global %.3f", rate, rep.rejection_rate)};
}

Outcome invariance() {
  oracle::Generator gen(20240603);
  int checked = 0;
  std::string broken;
  pauc::MctOptions opts;
  opts.bootstrap_reps = 200;
  while (checked < 60 && broken.empty()) {
    auto in = checked % 2 ? gen.tied(30, 4) : gen.tie_free(30, 4);
    const std::size_t kappa = in.xi.front().size();
    if (kappa < 2) continue;
    opts.seed = static_cast<std::uint64_t>(checked) + 1;
    const TrimSpec trim(in.p, in.q);
    const auto contrast = pauc::tukey(kappa);
    const auto d = oracle::to_sample(in.xi, in.eta);
    const auto est = pauc::estimate_pauc(d, trim);
    const auto sigma = pauc::estimate_covariance(d, trim, est).sigma;
    const auto base = pauc::run_mct(d, contrast, trim, opts);
    if (!pauc::compatibility_violation(base).empty()) broken = "compatibility";

    auto moved = in;
    for (auto* rows : {&moved.xi, &moved.eta}) {
      for (auto& r : *rows) {
        for (auto& v : r) v = std::exp(v / 4.0) + v;
      }
    }
    const auto dm = oracle::to_sample(moved.xi, moved.eta);
    const auto est_m = pauc::estimate_pauc(dm, trim);
    const auto mres = pauc::run_mct(dm, contrast, trim, opts);
    if (est_m.theta != est.theta || pauc::estimate_covariance(dm, trim, est_m).sigma != sigma ||
        mres.statistics != base.statistics || mres.decisions != base.decisions) {
      broken = "monotone transform";
    }

    Eigen::VectorXd factors(contrast.hypotheses());
    for (Eigen::Index k = 0; k < factors.size(); ++k) factors(k) = gen.uniform(0.2, 5.0) * (k % 2 ? -1 : 1);
    if (pauc::run_mct(d, contrast.rescaled(factors), trim, opts).decisions != base.decisions) {
      broken = "contrast rescaling";
    }

    auto par = opts;
    par.workers = 3;
    const auto pres = pauc::run_mct(d, contrast, trim, par);
    if (pres.critical_value != base.critical_value || pres.adjusted_p != base.adjusted_p) {
      broken = "worker determinism";
    }
    ++checked;
  }
  return {broken.empty(), broken.empty() ? std::to_string(checked) + " instances" : "broken: " + broken};
}

Outcome holm() {
  const std::vector<double> raw{0.382, 0.259, 0.069, 0.015, 0.051};
  const std::vector<double> expected{0.518, 0.518, 0.207, 0.075, 0.204};
  const auto adj = pauc::holm_adjust(raw);
  double worst = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) worst = std::max(worst, std::abs(adj[i] - expected[i]));
  return {worst <= 1e-12, fmt("max |diff| %.3g", worst)};
}

}  // namespace

int main() {
  std::printf("acceptance: %u worker(s)\n", workers());
  report(1, "type-I level at (0.8,0.6), n=100", table1_level);
  report(2, "small-sample conservatism at (0.2,0.0), n=30", table1_small_sample);
  report(3, "power gap, two-marker-effect design", table2_power_gap);
  report(4, "power ordering, crossed design", table3_ordering);
  report(5, "plug-in equals trimmed Mann-Whitney", equivalence);
  report(6, "total trim equals Mann-Whitney AUC", reduction);
  report(7, "covariance consistency", covariance_consistency);
  report(8, "strong FWER control", fwer);
  report(9, "invariance suite", invariance);
  report(10, "Holm adjustment of the grid p-values", holm);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
