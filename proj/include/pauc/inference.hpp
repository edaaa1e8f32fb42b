#pragma once

// Bootstrap-calibrated multiple contrast test for partial AUCs.
//
// For a contrast matrix with rows c_i the studentized statistics are
//
//   T_i = sqrt(alpha + beta) <c_i, theta_hat> / sqrt(c_i' Sigma_hat c_i),
//
// and H_0^i is rejected when |T_i| exceeds the equicoordinate quantile of
// the studentized bootstrap maximum
//
//   max_i sqrt(alpha + beta) |<c_i, theta*> - <c_i, theta_hat>| / sqrt(c_i' Sigma* c_i).
//
// The global test rejects when any H_0^i is rejected.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pauc/contrasts.hpp"
#include "pauc/covariance.hpp"
#include "pauc/estimator.hpp"
#include "pauc/rng.hpp"

namespace pauc {

// Contrast variances at or below this value are floored to it and the
// corresponding hypothesis is flagged as having degenerate variance.
inline constexpr double kVarianceFloor = 1e-12;

struct StudentizedContrasts {
  Eigen::VectorXd statistics;  // T_i
  Eigen::VectorXd estimates;   // <c_i, theta_hat>
  Eigen::VectorXd variances;   // c_i' Sigma_hat c_i after flooring
  std::vector<bool> degenerate;
};

StudentizedContrasts studentize(const DiagnosticSample& data, const ContrastMatrix& contrast,
                                const TrimSpec& trim, bool assume_independent_groups = true);

// T_n alone.
Eigen::VectorXd test_statistic(const DiagnosticSample& data, const ContrastMatrix& contrast,
                               const TrimSpec& trim);

// Efron resample: alpha whole rows drawn with replacement from the
// non-diseased group, then beta rows from the diseased group.
DiagnosticSample bootstrap_resample(const DiagnosticSample& data, Rng& rng);
DiagnosticSample bootstrap_resample(const DiagnosticSample& data, RngStream stream);

struct BootstrapDistribution {
  std::vector<double> max_statistics;  // replicate b in slot b
  std::size_t degenerate_replicates = 0;
};

// Replicate b draws from RngStream{seed, b} only, so the output does not
// depend on the number of workers (0 = hardware concurrency).
BootstrapDistribution bootstrap_max_statistics(const DiagnosticSample& data,
                                               const ContrastMatrix& contrast,
                                               const TrimSpec& trim, std::size_t replicates,
                                               std::uint64_t seed, unsigned workers = 1,
                                               bool assume_independent_groups = true);

// inf{t >= 0 : #{values <= t} / B >= level}: the ceil(B * level)-th order
// statistic, and 0 for level = 0.
double equicoordinate_quantile(std::span<const double> values, double level);

struct MctOptions {
  double delta = 0.05;
  std::size_t bootstrap_reps = 2000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool assume_independent_groups = true;
};

struct MctResult {
  Eigen::VectorXd statistics;
  Eigen::VectorXd estimates;
  Eigen::VectorXd variances;
  double critical_value = 0.0;
  std::vector<bool> decisions;
  Eigen::VectorXd adjusted_p;
  double global_p = 1.0;
  std::vector<std::pair<double, double>> intervals;
  std::size_t bootstrap_reps_used = 0;
  std::size_t degenerate_replicates = 0;
  std::vector<bool> degenerate_flags;
  std::vector<std::string> warnings;
  double delta = 0.05;

  bool global_rejection() const;
};

MctResult run_mct(const DiagnosticSample& data, const ContrastMatrix& contrast,
                  const TrimSpec& trim, const MctOptions& options);

// Checks decision <=> adjusted p <= delta <=> 0 outside the interval, and
// that the global decision matches the global p-value. Returns an empty
// string when consistent, otherwise a description of the first violation.
std::string compatibility_violation(const MctResult& result);

// Bonferroni-Holm step-down adjustment, monotone and capped at 1.
std::vector<double> holm_adjust(std::span<const double> p_values);

}  // namespace pauc
