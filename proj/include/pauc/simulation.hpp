#pragma once

// Gaussian-copula scenario engine for type-I error and power experiments.
//
// A scenario couples kappa non-diseased marginals F_i and kappa diseased
// marginals G_i through a Gaussian copula given by a 2kappa x 2kappa Spearman
// matrix. One draw of the 2kappa-dimensional copula yields one non-diseased
// row (first kappa coordinates) and one diseased row (last kappa).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pauc/contrasts.hpp"
#include "pauc/estimator.hpp"
#include "pauc/inference.hpp"
#include "pauc/rng.hpp"

namespace pauc {

// Which diseased marginal carries the effect in power scenarios, and the
// direction the contrast vector C theta is expected to point in.
struct EffectTuning {
  std::size_t marker = 0;  // 0-based
  Eigen::VectorXd direction;
};

struct ScenarioSpec {
  std::string name;
  std::vector<MarginalSpec> nondiseased;
  std::vector<MarginalSpec> diseased;
  Eigen::MatrixXd spearman;
  std::size_t group_size = 100;
  TrimSpec trim = TrimSpec::total();
  ContrastMatrix contrast = tukey(2);
  double delta = 0.05;
  std::size_t bootstrap_reps = 2000;
  std::size_t sim_runs = 1000;
  std::optional<EffectTuning> tuning;

  std::size_t markers() const { return nondiseased.size(); }
  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct PearsonConversion {
  Eigen::MatrixXd pearson;
  bool repaired = false;
  double min_eigenvalue = 0.0;  // before repair
};

// rho = 2 sin(pi rho_s / 6) elementwise. If the result has an eigenvalue
// below -1e-10 it is projected onto the PSD cone (eigenvalue clipping) and
// rescaled to unit diagonal.
PearsonConversion spearman_to_pearson(const Eigen::MatrixXd& spearman);

// Precomputes the copula factor once per scenario.
class CopulaSampler {
 public:
  explicit CopulaSampler(const ScenarioSpec& spec);

  DiagnosticSample sample(Rng& rng) const;
  const PearsonConversion& conversion() const { return conversion_; }

 private:
  std::vector<MarginalSpec> nondiseased_;
  std::vector<MarginalSpec> diseased_;
  std::size_t group_size_;
  PearsonConversion conversion_;
  Eigen::MatrixXd factor_;  // factor * factor' = pearson
};

DiagnosticSample sample_scenario(const ScenarioSpec& spec, Rng& rng);

// True parameter vector theta for the scenario's marginals and trim.
Eigen::VectorXd true_theta(const ScenarioSpec& spec, int resolution = 200000);

struct Calibration {
  double mu = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd contrast_values;  // C theta(mu)
  Eigen::VectorXd direction;        // realized unit direction (zero when lambda = 0)
  double angle = 0.0;               // radians between realized and requested direction
  int evaluations = 0;
};

// Finds the location mu of diseased marginal `tunable` such that
// ||C theta(mu) - lambda v||_inf < 1e-3 with v = direction_check / |direction_check|.
// Solved by bisection on <C theta(mu), v>, which is monotone in mu; the
// realized direction must lie within 1e-2 rad of v.
Calibration calibrate_effect(const ScenarioSpec& spec, double lambda, std::size_t tunable,
                             const Eigen::VectorXd& direction_check);

// Copy of spec with the tuned marginal moved to the calibrated location.
ScenarioSpec with_effect(const ScenarioSpec& spec, double lambda, Calibration* calibration = nullptr);

struct ExperimentReport {
  std::string scenario;
  TrimSpec trim = TrimSpec::total();
  std::size_t group_size = 0;
  double delta = 0.05;
  std::size_t bootstrap_reps = 0;
  double rejection_rate = 0.0;
  std::vector<double> per_hypothesis_rates;
  std::size_t runs = 0;
  double mc_standard_error = 0.0;
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  std::size_t degenerate_runs = 0;
  std::optional<double> lambda;
  std::optional<double> tuned_mu;
};

// Run r draws its data from RngStream{seed, r} and its bootstrap from
// derive_seed(seed, r), so two experiments with the same seed share random
// numbers, and results do not depend on the worker count.
ExperimentReport run_experiment(const ScenarioSpec& spec, std::uint64_t seed,
                                unsigned workers = 1);

// Requires the scenario to satisfy the global null C theta = 0.
ExperimentReport run_type1_experiment(const ScenarioSpec& spec, std::uint64_t seed,
                                      unsigned workers = 1);

// Scenario already moved to a fixed alternative (see with_effect).
ExperimentReport run_power_experiment(const ScenarioSpec& spec, std::uint64_t seed,
                                      unsigned workers = 1);

}  // namespace pauc
