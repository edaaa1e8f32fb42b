#include "pauc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pauc/parallel.hpp"

namespace pauc {

namespace {

void check_dimensions(const DiagnosticSample& data, const ContrastMatrix& contrast) {
  if (contrast.markers() != data.markers()) {
    throw std::invalid_argument("contrast matrix has " + std::to_string(contrast.markers()) +
                                " columns but the data have " + std::to_string(data.markers()) +
                                " markers");
  }
}

PairedSample resample_group(const PairedSample& group, Rng& rng) {
  const std::size_t n = group.rows();
  std::vector<std::size_t> picks(n);
  for (auto& k : picks) k = rng.uniform_index(n);
  std::vector<Sample> columns;
  columns.reserve(group.markers());
  for (std::size_t i = 0; i < group.markers(); ++i) {
    const auto source = group.column(i).values();
    std::vector<double> values(n);
    for (std::size_t r = 0; r < n; ++r) values[r] = source[picks[r]];
    columns.emplace_back(std::move(values));
  }
  return PairedSample(std::move(columns));
}

}  // namespace

StudentizedContrasts studentize(const DiagnosticSample& data, const ContrastMatrix& contrast,
                                const TrimSpec& trim, bool assume_independent_groups) {
  check_dimensions(data, contrast);
  const PaucEstimate est = estimate_pauc(data, trim);
  const CovarianceEstimate cov =
      estimate_covariance(data, trim, est, assume_independent_groups);
  const Eigen::MatrixXd& c = contrast.rows();
  const double root_n = std::sqrt(static_cast<double>(data.alpha() + data.beta()));

  StudentizedContrasts out;
  out.estimates = c * est.theta;
  out.variances = (c * cov.sigma * c.transpose()).diagonal();
  out.statistics.resize(out.estimates.size());
  out.degenerate.assign(static_cast<std::size_t>(out.estimates.size()), false);
  for (Eigen::Index i = 0; i < out.estimates.size(); ++i) {
    if (!(out.variances[i] > kVarianceFloor)) {
      out.variances[i] = kVarianceFloor;
      out.degenerate[static_cast<std::size_t>(i)] = true;
    }
    out.statistics[i] = root_n * out.estimates[i] / std::sqrt(out.variances[i]);
  }
  return out;
}

Eigen::VectorXd test_statistic(const DiagnosticSample& data, const ContrastMatrix& contrast,
                               const TrimSpec& trim) {
  return studentize(data, contrast, trim).statistics;
}

DiagnosticSample bootstrap_resample(const DiagnosticSample& data, Rng& rng) {
  PairedSample xi = resample_group(data.nondiseased(), rng);
  PairedSample eta = resample_group(data.diseased(), rng);
  return DiagnosticSample(std::move(xi), std::move(eta));
}

DiagnosticSample bootstrap_resample(const DiagnosticSample& data, RngStream stream) {
  Rng rng(stream);
  return bootstrap_resample(data, rng);
}

BootstrapDistribution bootstrap_max_statistics(const DiagnosticSample& data,
                                               const ContrastMatrix& contrast,
                                               const TrimSpec& trim, std::size_t replicates,
                                               std::uint64_t seed, unsigned workers,
                                               bool assume_independent_groups) {
  if (replicates < 100) throw std::invalid_argument("B too small (need at least 100)");
  check_dimensions(data, contrast);
  const Eigen::VectorXd centre = contrast.rows() * estimate_pauc(data, trim).theta;
  const double root_n = std::sqrt(static_cast<double>(data.alpha() + data.beta()));
  const Eigen::MatrixXd& c = contrast.rows();

  BootstrapDistribution out;
  out.max_statistics.assign(replicates, 0.0);
  std::vector<char> degenerate(replicates, 0);
  parallel_for(replicates, workers, [&](std::size_t b, unsigned) {
    const DiagnosticSample star = bootstrap_resample(data, RngStream{seed, b});
    const PaucEstimate est = estimate_pauc(star, trim);
    const CovarianceEstimate cov =
        estimate_covariance(star, trim, est, assume_independent_groups);
    const Eigen::VectorXd diff = c * est.theta - centre;
    double max_abs = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      double v = c.row(i) * cov.sigma * c.row(i).transpose();
      if (!(v > kVarianceFloor)) {
        v = kVarianceFloor;
        degenerate[b] = 1;
      }
      max_abs = std::max(max_abs, root_n * std::abs(diff[i]) / std::sqrt(v));
    }
    out.max_statistics[b] = max_abs;
  });
  out.degenerate_replicates =
      static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  return out;
}

double equicoordinate_quantile(std::span<const double> values, double level) {
  if (values.empty()) throw std::invalid_argument("equicoordinate quantile of an empty sample");
  if (!(level >= 0.0 && level <= 1.0)) {
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  }
  const std::size_t k = ceil_count(values.size(), level);
  if (k == 0) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   sorted.end());
  return sorted[k - 1];
}

bool MctResult::global_rejection() const {
  return std::any_of(decisions.begin(), decisions.end(), [](bool d) { return d; });
}

MctResult run_mct(const DiagnosticSample& data, const ContrastMatrix& contrast,
                  const TrimSpec& trim, const MctOptions& options) {
  if (!(options.delta > 0.0 && options.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const StudentizedContrasts st =
      studentize(data, contrast, trim, options.assume_independent_groups);
  BootstrapDistribution boot =
      bootstrap_max_statistics(data, contrast, trim, options.bootstrap_reps, options.seed,
                               options.workers, options.assume_independent_groups);
  std::vector<double> sorted = std::move(boot.max_statistics);
  std::sort(sorted.begin(), sorted.end());
  const double reps = static_cast<double>(sorted.size());
  // #{b : maxstat_b >= t}
  auto exceedances = [&](double t) {
    return static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t));
  };

  MctResult res;
  res.delta = options.delta;
  res.statistics = st.statistics;
  res.estimates = st.estimates;
  res.variances = st.variances;
  res.degenerate_flags = st.degenerate;
  res.bootstrap_reps_used = sorted.size();
  res.degenerate_replicates = boot.degenerate_replicates;
  res.critical_value = equicoordinate_quantile(sorted, 1.0 - options.delta);

  const std::size_t r = contrast.hypotheses();
  const double root_n = std::sqrt(static_cast<double>(data.alpha() + data.beta()));
  res.adjusted_p.resize(static_cast<Eigen::Index>(r));
  double max_abs = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double t = std::abs(st.statistics[k]);
    max_abs = std::max(max_abs, t);
    res.decisions.push_back(t > res.critical_value);
    res.adjusted_p[k] = exceedances(t) / reps;
    const double half = res.critical_value * std::sqrt(st.variances[k]) / root_n;
    res.intervals.emplace_back(st.estimates[k] - half, st.estimates[k] + half);
  }
  res.global_p = exceedances(max_abs) / reps;

  if (std::any_of(st.degenerate.begin(), st.degenerate.end(), [](bool d) { return d; })) {
    res.warnings.push_back("degenerate variance for at least one contrast (empty trim window?)");
  }
  if (static_cast<double>(boot.degenerate_replicates) > 0.01 * reps) {
    std::ostringstream os;
    os << boot.degenerate_replicates << " of " << sorted.size()
       << " bootstrap replicates had a degenerate contrast variance";
    res.warnings.push_back(os.str());
  }
  return res;
}

std::string compatibility_violation(const MctResult& result) {
  for (std::size_t i = 0; i < result.decisions.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const bool decision = result.decisions[i];
    if ((std::abs(result.statistics[k]) > result.critical_value) != decision) {
      return "decision " + std::to_string(i + 1) + " disagrees with |T| > critical value";
    }
    if ((result.adjusted_p[k] <= result.delta) != decision) {
      return "adjusted p-value " + std::to_string(i + 1) + " disagrees with the decision";
    }
    const auto [lo, hi] = result.intervals[i];
    const bool excludes_zero = lo > 0.0 || hi < 0.0;
    if (excludes_zero != decision) {
      return "confidence interval " + std::to_string(i + 1) + " disagrees with the decision";
    }
  }
  if ((result.global_p <= result.delta) != result.global_rejection()) {
    return "global p-value disagrees with the global decision";
  }
  return {};
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double candidate = std::min(1.0, static_cast<double>(m - k) * p_values[order[k]]);
    running = std::max(running, candidate);
    adjusted[order[k]] = running;
  }
  return adjusted;
}

}  // namespace pauc
