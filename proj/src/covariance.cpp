#include "pauc/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pauc {

namespace {

using Wide = __int128;

// #{v in sorted : v in (lo, hi], v >= x}
std::int64_t window_count_at_least(std::span<const double> sorted, std::size_t first,
                                   std::size_t last, double x) {
  const auto begin = sorted.begin();
  const std::size_t from = static_cast<std::size_t>(
      std::lower_bound(begin + static_cast<std::ptrdiff_t>(first),
                       begin + static_cast<std::ptrdiff_t>(last), x) -
      begin);
  return static_cast<std::int64_t>(last - from);
}

// Index range [first, last) of sorted values lying in (a, b].
std::pair<std::size_t, std::size_t> window_range(std::span<const double> sorted,
                                                 const ExtendedReal& a, const ExtendedReal& b) {
  const auto begin = sorted.begin();
  std::size_t first = 0;
  if (a.is_pos_inf()) return {sorted.size(), sorted.size()};
  if (a.is_finite()) {
    first = static_cast<std::size_t>(std::upper_bound(begin, sorted.end(), a.value()) - begin);
  }
  std::size_t last = sorted.size();
  if (b.is_neg_inf()) return {0, 0};
  if (b.is_finite()) {
    last = static_cast<std::size_t>(std::upper_bound(begin, sorted.end(), b.value()) - begin);
  }
  return {first, std::max(first, last)};
}

// Placement counts for every marker: out[i][r] for subject r.
// counts[i][r] = #{v in window of `other` column i : v >= own column i at row r}.
std::vector<std::vector<std::int64_t>> placements(const PairedSample& own,
                                                  const PaucEstimate& cuts,
                                                  const PairedSample& other) {
  const std::size_t kappa = own.markers();
  std::vector<std::vector<std::int64_t>> out(kappa);
  for (std::size_t i = 0; i < kappa; ++i) {
    const auto sorted = other.column(i).sorted();
    const auto [first, last] = window_range(sorted, cuts.lower_cuts[i], cuts.upper_cuts[i]);
    const auto values = own.column(i).values();
    out[i].resize(values.size());
    for (std::size_t r = 0; r < values.size(); ++r) {
      out[i][r] = window_count_at_least(sorted, first, last, values[r]);
    }
  }
  return out;
}

// n * sum_r u_r v_r - (sum_r u_r)(sum_r v_r), i.e. n^2 times the empirical covariance.
Wide scaled_cross(const std::vector<std::int64_t>& u, const std::vector<std::int64_t>& v) {
  Wide uv = 0;
  Wide su = 0;
  Wide sv = 0;
  for (std::size_t r = 0; r < u.size(); ++r) {
    uv += static_cast<Wide>(u[r]) * v[r];
    su += u[r];
    sv += v[r];
  }
  return static_cast<Wide>(u.size()) * uv - su * sv;
}

}  // namespace

CovarianceEstimate estimate_covariance(const DiagnosticSample& data, const TrimSpec& trim,
                                       const PaucEstimate& cuts,
                                       bool assume_independent_groups) {
  (void)trim;
  const std::size_t kappa = data.markers();
  const std::size_t alpha = data.alpha();
  const std::size_t beta = data.beta();
  if (cuts.alpha != alpha || cuts.beta != beta) {
    throw std::invalid_argument("cut points were estimated from groups of different sizes");
  }
  if (cuts.lower_cuts.size() != kappa || cuts.upper_cuts.size() != kappa ||
      static_cast<std::size_t>(cuts.theta.size()) != kappa) {
    throw std::invalid_argument("cut points and data disagree on the number of markers");
  }
  if (!assume_independent_groups && alpha != beta) {
    throw std::invalid_argument("the dependent-groups term needs paired groups (alpha == beta)");
  }

  // A: non-diseased subjects placed among windowed diseased values; B: the mirror.
  const auto A = placements(data.nondiseased(), cuts, data.diseased());
  const auto B = placements(data.diseased(), cuts, data.nondiseased());

  const double a = static_cast<double>(alpha);
  const double b = static_cast<double>(beta);
  const double total = a + b;
  // Term 1: (a+b)/(b^2 a) * N/a^2 ; term 2: (a+b)/(a^2 b) * N/b^2.
  const double scale_1 = b * b * a * a * a;
  const double scale_2 = a * a * b * b * b;

  CovarianceEstimate out;
  out.sigma.resize(static_cast<Eigen::Index>(kappa), static_cast<Eigen::Index>(kappa));
  for (std::size_t i = 0; i < kappa; ++i) {
    for (std::size_t j = i; j < kappa; ++j) {
      const double n1 = static_cast<double>(scaled_cross(A[i], A[j]));
      const double n2 = static_cast<double>(scaled_cross(B[i], B[j]));
      double s = total * n1 / scale_1 + total * n2 / scale_2;
      if (!assume_independent_groups) {
        // -(a+b)/sqrt(ab) * 1/(ab) * [cov_n(A_i, B_j) + cov_n(B_i, A_j)], n = a = b.
        const double n3 = static_cast<double>(scaled_cross(A[i], B[j]) + scaled_cross(B[i], A[j]));
        s -= total / std::sqrt(a * b) * n3 / (a * b * a * a);
      }
      out.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
      out.sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
    }
  }
  return out;
}

}  // namespace pauc
