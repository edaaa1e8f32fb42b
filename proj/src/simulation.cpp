#include "pauc/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "pauc/parallel.hpp"

namespace pauc {

namespace {

constexpr double kRepairThreshold = -1e-10;

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& pearson) {
  Eigen::LLT<Eigen::MatrixXd> llt(pearson);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Singular but PSD (e.g. comonotone blocks): symmetric square root.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(pearson);
  Eigen::VectorXd vals = eig.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, vals.maxCoeff());
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    vals[k] = vals[k] > cutoff ? std::sqrt(vals[k]) : 0.0;
  }
  return eig.eigenvectors() * vals.asDiagonal();
}

}  // namespace

void ScenarioSpec::validate() const {
  const std::size_t kappa = nondiseased.size();
  if (kappa == 0) throw std::invalid_argument("scenario: no marginals given");
  if (diseased.size() != kappa) {
    throw std::invalid_argument("scenario: nondiseased and diseased marginal counts differ");
  }
  const auto dim = static_cast<Eigen::Index>(2 * kappa);
  if (spearman.rows() != dim || spearman.cols() != dim) {
    throw std::invalid_argument("scenario: spearman must be " + std::to_string(dim) + "x" +
                                std::to_string(dim));
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (spearman(i, i) != 1.0) throw std::invalid_argument("scenario: spearman diagonal must be 1");
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double v = spearman(i, j);
      if (!(v >= -1.0 && v <= 1.0)) {
        throw std::invalid_argument("scenario: spearman entries must lie in [-1, 1]");
      }
      if (std::abs(v - spearman(j, i)) > 1e-12) {
        throw std::invalid_argument("scenario: spearman must be symmetric");
      }
    }
  }
  if (group_size < 2) throw std::invalid_argument("scenario: group_size must be at least 2");
  if (contrast.markers() != kappa) {
    throw std::invalid_argument("scenario: contrast has " + std::to_string(contrast.markers()) +
                                " columns for " + std::to_string(kappa) + " markers");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("scenario: delta must lie in (0, 1)");
  if (bootstrap_reps < 100) throw std::invalid_argument("scenario: bootstrap_reps must be >= 100");
  if (sim_runs == 0) throw std::invalid_argument("scenario: sim_runs must be positive");
  if (tuning) {
    if (tuning->marker >= kappa) throw std::invalid_argument("scenario: tuning marker out of range");
    if (static_cast<std::size_t>(tuning->direction.size()) != contrast.hypotheses()) {
      throw std::invalid_argument("scenario: tuning direction needs one entry per contrast row");
    }
  }
}

PearsonConversion spearman_to_pearson(const Eigen::MatrixXd& spearman) {
  if (spearman.rows() != spearman.cols()) {
    throw std::invalid_argument("Spearman matrix must be square");
  }
  if (!((spearman.array() >= -1.0).all() && (spearman.array() <= 1.0).all())) {
    throw std::invalid_argument("Spearman entries must lie in [-1, 1]");
  }
  PearsonConversion out;
  Eigen::MatrixXd rho = (spearman.array() * (std::numbers::pi / 6.0)).sin() * 2.0;
  rho = 0.5 * (rho + rho.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rho);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (out.min_eigenvalue < kRepairThreshold) {
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd fixed = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::VectorXd scale = fixed.diagonal().cwiseSqrt().cwiseInverse();
    fixed = scale.asDiagonal() * fixed * scale.asDiagonal();
    rho = 0.5 * (fixed + fixed.transpose());
    out.repaired = true;
  }
  out.pearson = rho;
  return out;
}

CopulaSampler::CopulaSampler(const ScenarioSpec& spec)
    : nondiseased_(spec.nondiseased),
      diseased_(spec.diseased),
      group_size_(spec.group_size),
      conversion_(spearman_to_pearson(spec.spearman)) {
  if (nondiseased_.size() != diseased_.size() ||
      static_cast<std::size_t>(conversion_.pearson.rows()) != 2 * nondiseased_.size()) {
    throw std::invalid_argument("copula dimension does not match the marginals");
  }
  if (group_size_ < 2) throw std::invalid_argument("group size must be at least 2");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(conversion_.pearson);
  if (eig.eigenvalues().minCoeff() < -1e-8) {
    throw std::invalid_argument("correlation matrix is not positive semidefinite after repair");
  }
  factor_ = psd_factor(conversion_.pearson);
}

DiagnosticSample CopulaSampler::sample(Rng& rng) const {
  const std::size_t kappa = nondiseased_.size();
  const std::size_t n = group_size_;
  const auto dim = static_cast<Eigen::Index>(2 * kappa);
  std::vector<std::vector<double>> xi(kappa, std::vector<double>(n));
  std::vector<std::vector<double>> eta(kappa, std::vector<double>(n));
  Eigen::VectorXd w(dim);
  Eigen::VectorXd z(dim);
  for (std::size_t r = 0; r < n; ++r) {
    for (Eigen::Index k = 0; k < dim; ++k) w[k] = rng.standard_normal();
    z.noalias() = factor_ * w;
    for (std::size_t i = 0; i < kappa; ++i) {
      xi[i][r] = nondiseased_[i].from_standard_normal(z[static_cast<Eigen::Index>(i)]);
      eta[i][r] = diseased_[i].from_standard_normal(z[static_cast<Eigen::Index>(kappa + i)]);
    }
  }
  std::vector<Sample> xs;
  std::vector<Sample> ys;
  for (std::size_t i = 0; i < kappa; ++i) {
    xs.emplace_back(std::move(xi[i]));
    ys.emplace_back(std::move(eta[i]));
  }
  return DiagnosticSample(PairedSample(std::move(xs)), PairedSample(std::move(ys)));
}

DiagnosticSample sample_scenario(const ScenarioSpec& spec, Rng& rng) {
  return CopulaSampler(spec).sample(rng);
}

Eigen::VectorXd true_theta(const ScenarioSpec& spec, int resolution) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(spec.markers()));
  for (std::size_t i = 0; i < spec.markers(); ++i) {
    theta[static_cast<Eigen::Index>(i)] =
        true_pauc(spec.nondiseased[i], spec.diseased[i], spec.trim, resolution);
  }
  return theta;
}

Calibration calibrate_effect(const ScenarioSpec& spec, double lambda, std::size_t tunable,
                             const Eigen::VectorXd& direction_check) {
  if (tunable >= spec.markers()) throw std::invalid_argument("tunable marker out of range");
  const Eigen::MatrixXd& c = spec.contrast.rows();
  if (direction_check.size() != c.rows() || direction_check.norm() == 0.0) {
    throw std::invalid_argument("direction_check needs one nonzero entry per contrast row");
  }
  const Eigen::VectorXd v = direction_check.normalized();
  Eigen::VectorXd theta = true_theta(spec);
  const MarginalSpec base = spec.diseased[tunable];
  const auto idx = static_cast<Eigen::Index>(tunable);

  Calibration cal;
  cal.lambda = lambda;
  auto drive = [&](double mu) {
    ++cal.evaluations;
    theta[idx] = true_pauc(spec.nondiseased[tunable], base.with_mu(mu), spec.trim);
    return (c * theta).dot(v);
  };

  // theta_tunable is nondecreasing in mu, so the drive is monotone; find its
  // direction, then expand a bracket around lambda.
  const double mu0 = base.mu();
  const double h0 = drive(mu0);
  const double slope_sign = drive(mu0 + 1.0) >= h0 ? 1.0 : -1.0;
  double step = 0.25;
  double lo = mu0;
  double hi = mu0;
  double h_lo = h0;
  double h_hi = h0;
  const bool go_up = (lambda - h0) * slope_sign >= 0.0;
  for (int k = 0; k < 40; ++k) {
    const double cand = go_up ? hi + step : lo - step;
    const double h = drive(cand);
    if (go_up) {
      lo = hi; h_lo = h_hi; hi = cand; h_hi = h;
    } else {
      hi = lo; h_hi = h_lo; lo = cand; h_lo = h;
    }
    if ((h_lo - lambda) * (h_hi - lambda) <= 0.0) break;
    step *= 2.0;
  }
  if ((h_lo - lambda) * (h_hi - lambda) > 0.0) {
    throw std::runtime_error("calibrate_effect: could not bracket the requested effect size");
  }
  for (int k = 0; k < 80 && hi - lo > 1e-12; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double h = drive(mid);
    if ((h - lambda) * (h_lo - lambda) <= 0.0) {
      hi = mid; h_hi = h;
    } else {
      lo = mid; h_lo = h;
    }
    if (std::abs(h - lambda) < 1e-9) {
      lo = hi = mid;
      break;
    }
  }
  cal.mu = 0.5 * (lo + hi);
  drive(cal.mu);
  cal.contrast_values = c * theta;
  if ((cal.contrast_values - lambda * v).cwiseAbs().maxCoeff() >= 1e-3) {
    throw std::runtime_error("calibrate_effect: C theta misses lambda v by more than 1e-3");
  }
  const double norm = cal.contrast_values.norm();
  if (lambda != 0.0 && norm > 0.0) {
    cal.direction = cal.contrast_values / norm;
    const double cosine = std::clamp(cal.direction.dot(v) * (lambda > 0 ? 1.0 : -1.0), -1.0, 1.0);
    cal.angle = std::acos(cosine);
    if (cal.angle > 1e-2) {
      throw std::runtime_error("calibrate_effect: realized direction deviates from direction_check");
    }
  } else {
    cal.direction = Eigen::VectorXd::Zero(c.rows());
  }
  return cal;
}

ScenarioSpec with_effect(const ScenarioSpec& spec, double lambda, Calibration* calibration) {
  if (!spec.tuning) throw std::invalid_argument("scenario has no tuning block");
  const Calibration cal = calibrate_effect(spec, lambda, spec.tuning->marker, spec.tuning->direction);
  ScenarioSpec out = spec;
  out.diseased[spec.tuning->marker] = spec.diseased[spec.tuning->marker].with_mu(cal.mu);
  if (calibration) *calibration = cal;
  return out;
}

ExperimentReport run_experiment(const ScenarioSpec& spec, std::uint64_t seed, unsigned workers) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const CopulaSampler sampler(spec);
  const std::size_t runs = spec.sim_runs;
  const std::size_t r = spec.contrast.hypotheses();
  std::vector<char> global(runs, 0);
  std::vector<std::vector<char>> per(runs, std::vector<char>(r, 0));
  std::vector<char> degenerate(runs, 0);

  parallel_for(runs, workers, [&](std::size_t run, unsigned) {
    Rng rng(RngStream{seed, run});
    const DiagnosticSample data = sampler.sample(rng);
    MctOptions opts;
    opts.delta = spec.delta;
    opts.bootstrap_reps = spec.bootstrap_reps;
    opts.seed = derive_seed(~seed, run);
    opts.workers = 1;
    const MctResult res = run_mct(data, spec.contrast, spec.trim, opts);
    global[run] = res.global_rejection() ? 1 : 0;
    for (std::size_t i = 0; i < r; ++i) per[run][i] = res.decisions[i] ? 1 : 0;
    degenerate[run] = res.warnings.empty() ? 0 : 1;
  });

  ExperimentReport rep;
  rep.scenario = spec.name;
  rep.trim = spec.trim;
  rep.group_size = spec.group_size;
  rep.delta = spec.delta;
  rep.bootstrap_reps = spec.bootstrap_reps;
  rep.runs = runs;
  rep.seed = seed;
  const double n = static_cast<double>(runs);
  rep.rejection_rate = static_cast<double>(std::count(global.begin(), global.end(), 1)) / n;
  rep.per_hypothesis_rates.assign(r, 0.0);
  for (std::size_t run = 0; run < runs; ++run) {
    for (std::size_t i = 0; i < r; ++i) rep.per_hypothesis_rates[i] += per[run][i];
  }
  for (double& v : rep.per_hypothesis_rates) v /= n;
  rep.mc_standard_error = std::sqrt(rep.rejection_rate * (1.0 - rep.rejection_rate) / n);
  rep.degenerate_runs = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  if (spec.tuning) rep.tuned_mu = spec.diseased[spec.tuning->marker].mu();
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport run_type1_experiment(const ScenarioSpec& spec, std::uint64_t seed,
                                      unsigned workers) {
  spec.validate();
  const Eigen::VectorXd effect = spec.contrast.rows() * true_theta(spec);
  if (effect.cwiseAbs().maxCoeff() > 1e-6) {
    throw std::invalid_argument("type-I experiment needs a scenario under the global null");
  }
  ExperimentReport rep = run_experiment(spec, seed, workers);
  rep.lambda = 0.0;
  return rep;
}

ExperimentReport run_power_experiment(const ScenarioSpec& spec, std::uint64_t seed,
                                      unsigned workers) {
  spec.validate();
  ExperimentReport rep = run_experiment(spec, seed, workers);
  rep.lambda = (spec.contrast.rows() * true_theta(spec)).norm();
  return rep;
}

}  // namespace pauc
