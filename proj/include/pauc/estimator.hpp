#pragma once

// Partial-AUC point estimation and the true parameter for parametric
// marginals.
//
// For a marker i with non-diseased CDF F and diseased CDF G, the parameter
// restricted to FPR <= p and TPR >= q is
//
//   theta = integral over (a, b] of (G(b) - G(u)) dF(u),
//   a = F^{-1}(1 - p),  b = G^{-1}(1 - q),
//
// equivalently Pr{a < X < Y <= b} for independent X ~ F, Y ~ G.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pauc/empdist.hpp"

namespace pauc {

// The clinically relevant ROC segment: FPR at most p, TPR at least q.
// Admissible values are p in (0, 1] and q in [0, 1); (1, 0) is the total AUC.
class TrimSpec {
 public:
  TrimSpec(double p, double q);
  static TrimSpec total() { return TrimSpec(1.0, 0.0); }

  double p() const { return p_; }
  double q() const { return q_; }
  bool is_total() const { return p_ == 1.0 && q_ == 0.0; }
  std::string to_string() const;

  friend bool operator==(const TrimSpec&, const TrimSpec&) = default;

 private:
  double p_;
  double q_;
};

// Non-diseased (xi) and diseased (eta) observations on the same kappa markers.
class DiagnosticSample {
 public:
  DiagnosticSample(PairedSample nondiseased, PairedSample diseased);

  const PairedSample& nondiseased() const { return nondiseased_; }
  const PairedSample& diseased() const { return diseased_; }
  std::size_t alpha() const { return nondiseased_.rows(); }
  std::size_t beta() const { return diseased_.rows(); }
  std::size_t markers() const { return nondiseased_.markers(); }

 private:
  PairedSample nondiseased_;
  PairedSample diseased_;
};

struct PaucEstimate {
  Eigen::VectorXd theta;
  std::vector<ExtendedReal> lower_cuts;  // a_i = quantile(xi_i, 1 - p)
  std::vector<ExtendedReal> upper_cuts;  // b_i = quantile(eta_i, 1 - q)
  std::size_t alpha = 0;
  std::size_t beta = 0;
};

// Plug-in estimator: the Lebesgue-Stieltjes integral against the empirical
// CDF of xi,
//   (1/alpha) sum_r 1{a < xi_r <= b} [G_n(b) - G_n(xi_r)].
PaucEstimate estimate_pauc(const DiagnosticSample& data, const TrimSpec& trim);

// Trimmed Mann-Whitney form: the double sum over order statistics
//   (1/(alpha beta)) sum_{r > ceil(alpha(1-p))} sum_{s <= ceil(beta(1-q))}
//       1{xi_(r) < eta_(s)}.
// Coincides with estimate_pauc on data without ties.
PaucEstimate estimate_pauc_trimmed_mw(const DiagnosticSample& data, const TrimSpec& trim);

// Upper bound of any estimate: (alpha - ceil(alpha(1-p))) ceil(beta(1-q)) / (alpha beta).
double pauc_estimate_bound(std::size_t alpha, std::size_t beta, const TrimSpec& trim);

// A continuous, strictly increasing marginal obtained by transforming a
// normal variable N(mu, sigma^2): identity, exp, or the logistic function.
class MarginalSpec {
 public:
  enum class Kind { kNormal, kLogNormal, kLogitNormal };

  MarginalSpec(Kind kind, double mu, double sigma);
  static MarginalSpec normal(double mu, double sigma) { return {Kind::kNormal, mu, sigma}; }
  static MarginalSpec lognormal(double mu, double sigma) { return {Kind::kLogNormal, mu, sigma}; }
  static MarginalSpec logitnormal(double mu, double sigma) {
    return {Kind::kLogitNormal, mu, sigma};
  }

  Kind kind() const { return kind_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  MarginalSpec with_mu(double mu) const { return {kind_, mu, sigma_}; }

  double cdf(double x) const;
  double quantile(double u) const;
  // Image of a standard normal draw z under this marginal's transform.
  double from_standard_normal(double z) const;
  // Inverse of from_standard_normal.
  double to_standard_normal(double x) const;

  std::string kind_name() const;
  static Kind parse_kind(const std::string& name);

  friend bool operator==(const MarginalSpec&, const MarginalSpec&) = default;

 private:
  Kind kind_;
  double mu_;
  double sigma_;
};

// True partial AUC for marginals f (non-diseased) and g (diseased), by
// composite midpoint quadrature after the substitution u = F(t):
//   theta = integral_{1-p}^{F(b)} (1 - q - G(F^{-1}(u))) du.
// The integrand is bounded by 1, monotone and continuous, so the absolute
// error is at most 1 / resolution.
double true_pauc(const MarginalSpec& f, const MarginalSpec& g, const TrimSpec& trim,
                 int resolution = 200000);

}  // namespace pauc
