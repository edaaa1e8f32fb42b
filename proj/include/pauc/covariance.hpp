#pragma once

#include <Eigen/Dense>

#include "pauc/estimator.hpp"

namespace pauc {

// Plug-in estimate of the asymptotic covariance of sqrt(alpha + beta) * theta_hat.
struct CovarianceEstimate {
  Eigen::MatrixXd sigma;
};

// Entry (i, j) is
//
//   (alpha+beta)/(beta^2 alpha) sum_{s1,s2} 1{eta_s1(i) in W_i} 1{eta_s2(j) in W_j}
//       [F_n(k_ij(eta_s1(i), eta_s2(j))) - F_in(eta_s1(i)) F_jn(eta_s2(j))]
//   + the mirror term over pairs of non-diseased subjects against G_n,
//
// with W_i = (a_i, b_i] the estimated cut window of marker i.
//
// Expanding the joint ECDF turns each double sum into an empirical covariance
// of per-subject placement counts
//
//   A_i(r) = #{s : eta_s(i) in W_i, eta_s(i) >= xi_r(i)},
//   B_i(s) = #{r : xi_r(i) in W_i, xi_r(i) >= eta_s(i)},
//
// which is evaluated in exact integer arithmetic in O(kappa n log n + kappa^2 n).
//
// With assume_independent_groups = false the subjects are taken to be paired
// (row r of both groups is the same subject, alpha == beta) and the plug-in
// estimate of the cross-group addend is subtracted.
CovarianceEstimate estimate_covariance(const DiagnosticSample& data, const TrimSpec& trim,
                                       const PaucEstimate& cuts,
                                       bool assume_independent_groups = true);

}  // namespace pauc
