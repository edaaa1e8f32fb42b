#pragma once

// Empirical distribution machinery: univariate and bivariate empirical CDFs
// and the generalized quantile transform H^{-1}(p) = inf{t : H(t) >= p}.
//
// Ties follow the literal indicator formulas (<= for CDFs); there is no
// midrank correction anywhere in the library.

#include <cstddef>
#include <span>
#include <vector>

namespace pauc {

// A point of the extended real line. Quantiles can be -inf (prob = 0) and
// cut points of the estimator can be +/-inf, so interval logic branches on
// the kind instead of carrying IEEE infinities through arithmetic.
class ExtendedReal {
 public:
  enum class Kind { kNegInf, kFinite, kPosInf };

  static ExtendedReal neg_inf() { return ExtendedReal(Kind::kNegInf, 0.0); }
  static ExtendedReal pos_inf() { return ExtendedReal(Kind::kPosInf, 0.0); }
  static ExtendedReal finite(double v) { return ExtendedReal(Kind::kFinite, v); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_neg_inf() const { return kind_ == Kind::kNegInf; }
  bool is_pos_inf() const { return kind_ == Kind::kPosInf; }

  // Value of a finite point. Throws std::logic_error on infinite points.
  double value() const;

  // Conversion to double for reporting; infinities map to IEEE infinities.
  double to_double() const;

  // this < x, for a finite real x.
  bool less_than(double x) const;
  // this >= x, for a finite real x.
  bool at_least(double x) const;

  friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  ExtendedReal(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

// Smallest integer k with k >= n * prob. Products such as 5 * (1 - 0.6) are
// not exact in binary floating point, so values within 1e-9 of an integer
// are snapped to it before taking the ceiling.
std::size_t ceil_count(std::size_t n, double prob);

// Observations of one marker in one group. The sort permutation is computed
// once so that CDF and quantile lookups are O(log n).
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> sorted() const { return sorted_; }
  // order()[k] is the index of the k-th smallest value (stable for ties).
  std::span<const std::size_t> order() const { return order_; }

  // #{values <= u}
  std::size_t count_at_most(double u) const;
  // #{values < u}
  std::size_t count_below(double u) const;

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  std::vector<std::size_t> order_;
};

// kappa row-aligned samples of equal size: row r holds subject r's markers.
class PairedSample {
 public:
  explicit PairedSample(std::vector<Sample> columns);
  // Builds from row-major data, rows[r][i] = marker i of subject r.
  static PairedSample from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return columns_.front().size(); }
  std::size_t markers() const { return columns_.size(); }
  const Sample& column(std::size_t i) const;

 private:
  std::vector<Sample> columns_;
};

// (#values <= u) / n. Accepts u = +/-inf.
double ecdf_eval(const Sample& sample, double u);

// Generalized inverse inf{t : ecdf(t) >= prob} for prob in [0, 1].
// prob = 0 yields -inf; otherwise the ceil(n * prob)-th order statistic.
ExtendedReal quantile(const Sample& sample, double prob);

// Fraction of rows with column i <= x and column j <= y (0-based indices).
double joint_ecdf_eval(const PairedSample& paired, std::size_t i, std::size_t j,
                       double x, double y);

}  // namespace pauc
