#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "pauc/cli.hpp"
#include "pauc/simulation.hpp"

using pauc::MarginalSpec;
using pauc::ScenarioSpec;
using pauc::TrimSpec;

namespace {

double phi(double z) { return boost::math::cdf(boost::math::normal(), z); }

std::vector<double> ranks(std::span<const std::size_t> order) {
  std::vector<double> r(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) r[order[k]] = static_cast<double>(k);
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0;
  double saa = 0;
  double sbb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("spearman to pearson conversion", "[simulation]") {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, 0.0, 0.0, 1.0;
  CHECK(pauc::spearman_to_pearson(s).pearson(0, 1) == 0.0);
  s << 1.0, 1.0, 1.0, 1.0;
  CHECK(pauc::spearman_to_pearson(s).pearson(0, 1) == Catch::Approx(1.0).margin(1e-15));
  s << 1.0, 0.79, 0.79, 1.0;
  const double rho = 2.0 * std::sin(0.79 * std::numbers::pi / 6.0);
  CHECK(pauc::spearman_to_pearson(s).pearson(0, 1) == Catch::Approx(rho).margin(1e-15));
  CHECK(rho == Catch::Approx(0.80390).margin(1e-5));

  // Both preset copulas are positive definite without repair.
  for (const auto& name : {"table1", "table3"}) {
    const auto conv = pauc::spearman_to_pearson(pauc::preset_plan(name).scenario.spearman);
    CHECK_FALSE(conv.repaired);
    CHECK(conv.min_eigenvalue > 0.0);
  }

  // Pairwise-admissible but jointly indefinite targets are repaired.
  Eigen::MatrixXd bad(3, 3);
  bad << 1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0;
  const auto fixed = pauc::spearman_to_pearson(bad);
  CHECK(fixed.repaired);
  CHECK(fixed.min_eigenvalue < -1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fixed.pearson);
  CHECK(eig.eigenvalues().minCoeff() > -1e-12);
  for (int i = 0; i < 3; ++i) CHECK(fixed.pearson(i, i) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("copula sampler reproduces the target Spearman correlation", "[simulation][statistical]") {
  ScenarioSpec s;
  s.name = "spearman";
  s.nondiseased = {MarginalSpec::lognormal(0, 1), MarginalSpec::logitnormal(0, 1)};
  s.diseased = s.nondiseased;
  s.spearman = Eigen::MatrixXd::Identity(4, 4);
  s.spearman(0, 1) = s.spearman(1, 0) = 0.79;
  s.group_size = 1000000;
  pauc::Rng rng({3, 0});
  const auto d = pauc::sample_scenario(s, rng);
  const auto r0 = ranks(d.nondiseased().column(0).order());
  const auto r1 = ranks(d.nondiseased().column(1).order());
  CHECK(std::abs(pearson(r0, r1) - 0.79) < 0.01);
}

TEST_CASE("identity copula gives independent standard normal columns", "[simulation][statistical]") {
  ScenarioSpec s;
  s.nondiseased = {MarginalSpec::normal(0, 1), MarginalSpec::normal(0, 1)};
  s.diseased = s.nondiseased;
  s.spearman = Eigen::MatrixXd::Identity(4, 4);
  s.group_size = 1000000;
  pauc::Rng rng({4, 0});
  const auto d = pauc::sample_scenario(s, rng);
  for (const auto* group : {&d.nondiseased(), &d.diseased()}) {
    for (std::size_t i = 0; i < 2; ++i) {
      const auto sorted = group->column(i).sorted();
      const double n = static_cast<double>(sorted.size());
      double ks = 0.0;
      for (std::size_t k = 0; k < sorted.size(); ++k) {
        const double f = phi(sorted[k]);
        ks = std::max({ks, std::abs((k + 1) / n - f), std::abs(k / n - f)});
      }
      CHECK(ks < 0.01);
    }
    const auto a = group->column(0).values();
    const auto b = group->column(1).values();
    CHECK(std::abs(pearson({a.begin(), a.end()}, {b.begin(), b.end()})) < 0.01);
  }
  const auto a = d.nondiseased().column(0).values();
  const auto b = d.diseased().column(0).values();
  CHECK(std::abs(pearson({a.begin(), a.end()}, {b.begin(), b.end()})) < 0.01);
}

TEST_CASE("comonotone block gives equal ranks", "[simulation]") {
  ScenarioSpec s;
  s.nondiseased = {MarginalSpec::normal(0, 1), MarginalSpec::lognormal(0, 1), MarginalSpec::logitnormal(1, 2)};
  s.diseased = s.nondiseased;
  s.spearman = Eigen::MatrixXd::Identity(6, 6);
  s.spearman.topLeftCorner(3, 3).setOnes();
  s.group_size = 200;
  pauc::Rng rng({5, 0});
  const auto d = pauc::sample_scenario(s, rng);
  const auto o0 = d.nondiseased().column(0).order();
  for (std::size_t i = 1; i < 3; ++i) {
    const auto oi = d.nondiseased().column(i).order();
    CHECK(std::equal(o0.begin(), o0.end(), oi.begin()));
  }
}

TEST_CASE("binormal AUC estimate is unbiased", "[simulation][statistical]") {
  ScenarioSpec s;
  s.nondiseased = {MarginalSpec::normal(0, 1)};
  s.diseased = {MarginalSpec::normal(0.5, 1)};
  s.spearman = Eigen::MatrixXd::Identity(2, 2);
  s.group_size = 500;
  const pauc::CopulaSampler sampler(s);
  double sum = 0.0;
  const int runs = 2000;
  for (int run = 0; run < runs; ++run) {
    pauc::Rng rng({6, static_cast<std::uint64_t>(run)});
    sum += pauc::estimate_pauc(sampler.sample(rng), TrimSpec::total()).theta[0];
  }
  CHECK(std::abs(sum / runs - phi(0.5 / std::sqrt(2.0))) < 0.01);
}

TEST_CASE("effect calibration", "[simulation]") {
  auto spec = pauc::preset_plan("table2").scenario;
  spec.trim = TrimSpec(0.8, 0.6);
  const Eigen::VectorXd dir = spec.tuning->direction;

  const auto null = pauc::calibrate_effect(spec, 0.0, 2, dir);
  CHECK(null.mu == Catch::Approx(0.5).margin(1e-6));

  double last_mu = null.mu;
  for (double lambda : {0.021, 0.061, 0.107}) {
    pauc::Calibration cal;
    const auto moved = pauc::with_effect(spec, lambda, &cal);
    CHECK(cal.mu > last_mu);
    last_mu = cal.mu;
    CHECK((cal.contrast_values - lambda * dir.normalized()).cwiseAbs().maxCoeff() < 1e-3);
    CHECK(cal.angle < 1e-2);
    CHECK(moved.diseased[2].mu() == cal.mu);
    CHECK(moved.diseased[0] == spec.diseased[0]);
  }

  // A direction the geometry cannot produce is rejected.
  CHECK_THROWS_AS(pauc::calibrate_effect(spec, 0.05, 2, Eigen::Vector3d(1.0, 0.0, 0.0)),
                  std::runtime_error);
}

TEST_CASE("calibrated effect is realized by the estimator", "[simulation][statistical]") {
  auto spec = pauc::preset_plan("table2").scenario;
  spec.trim = TrimSpec(0.8, 0.6);
  spec.group_size = 2000;
  const double lambda = 0.107;
  const auto moved = pauc::with_effect(spec, lambda);
  const pauc::CopulaSampler sampler(moved);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  const int runs = 2000;
  for (int run = 0; run < runs; ++run) {
    pauc::Rng rng({7, static_cast<std::uint64_t>(run)});
    mean += moved.contrast.rows() * pauc::estimate_pauc(sampler.sample(rng), moved.trim).theta;
  }
  mean /= runs;
  CHECK((mean - lambda * spec.tuning->direction.normalized()).cwiseAbs().maxCoeff() < 0.005);
}

TEST_CASE("scenario validation", "[simulation]") {
  auto spec = pauc::preset_plan("table1").scenario;
  CHECK_NOTHROW(spec.validate());
  auto bad = spec;
  bad.sim_runs = 0;
  CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("sim_runs"));
  bad = spec;
  bad.spearman(0, 1) = 0.5;
  CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("symmetric"));
  bad = spec;
  bad.contrast = pauc::tukey(2);
  CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("contrast"));
  bad = spec;
  bad.bootstrap_reps = 10;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("experiments are reproducible and worker independent", "[simulation]") {
  auto spec = pauc::preset_plan("table1").scenario;
  spec.group_size = 30;
  spec.sim_runs = 24;
  spec.bootstrap_reps = 100;
  const auto one = pauc::run_type1_experiment(spec, 11, 1);
  const auto many = pauc::run_type1_experiment(spec, 11, 4);
  CHECK(one.rejection_rate == many.rejection_rate);
  CHECK(one.per_hypothesis_rates == many.per_hypothesis_rates);
  CHECK(one.runs == 24);
  CHECK(one.lambda == 0.0);

  // Moving marker 3 breaks the null.
  auto alt = spec;
  alt.diseased[2] = alt.diseased[2].with_mu(1.5);
  CHECK_THROWS_AS(pauc::run_type1_experiment(alt, 11), std::invalid_argument);
}

TEST_CASE("rejection regions are nested in delta", "[simulation]") {
  auto spec = pauc::preset_plan("table2").scenario;
  spec.trim = TrimSpec(0.8, 0.6);
  spec.group_size = 40;
  spec.sim_runs = 100;
  spec.bootstrap_reps = 200;
  const auto moved = pauc::with_effect(spec, 0.061);
  auto tight = moved;
  tight.delta = 0.01;
  auto loose = moved;
  loose.delta = 0.10;
  const auto a = pauc::run_power_experiment(tight, 5);
  const auto b = pauc::run_power_experiment(loose, 5);
  CHECK(a.rejection_rate <= b.rejection_rate);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.per_hypothesis_rates[i] <= b.per_hypothesis_rates[i]);
  CHECK(*b.lambda == Catch::Approx(0.061).margin(1e-3));
}

TEST_CASE("power grows with the effect and the group size", "[simulation][statistical]") {
  pauc::SimulationPlan plan = pauc::preset_plan("table2");
  plan.scenario.sim_runs = 150;
  plan.scenario.bootstrap_reps = 200;
  plan.seed = 21;

  plan.rows = {{TrimSpec(0.8, 0.6), 0.107}};
  plan.n_grid = {30, 60, 100};
  const auto by_n = pauc::run_plan(plan);
  REQUIRE(by_n.size() == 3);
  CHECK(by_n[0].report.rejection_rate <= by_n[1].report.rejection_rate);
  CHECK(by_n[1].report.rejection_rate <= by_n[2].report.rejection_rate);

  plan.rows = {{TrimSpec(0.8, 0.6), 0.021}, {TrimSpec(0.8, 0.6), 0.061}, {TrimSpec(0.8, 0.6), 0.107}};
  plan.n_grid = {60};
  const auto by_lambda = pauc::run_plan(plan);
  CHECK(by_lambda[0].report.rejection_rate <= by_lambda[1].report.rejection_rate);
  CHECK(by_lambda[1].report.rejection_rate <= by_lambda[2].report.rejection_rate);
  CHECK(*by_lambda[2].report.tuned_mu > *by_lambda[0].report.tuned_mu);
}
