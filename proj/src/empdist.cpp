#include "pauc/empdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pauc {

double ExtendedReal::value() const {
  if (kind_ != Kind::kFinite) {
    throw std::logic_error("value() called on an infinite extended real");
  }
  return value_;
}

double ExtendedReal::to_double() const {
  switch (kind_) {
    case Kind::kNegInf: return -std::numeric_limits<double>::infinity();
    case Kind::kPosInf: return std::numeric_limits<double>::infinity();
    default: return value_;
  }
}

bool ExtendedReal::less_than(double x) const {
  switch (kind_) {
    case Kind::kNegInf: return true;
    case Kind::kPosInf: return false;
    default: return value_ < x;
  }
}

bool ExtendedReal::at_least(double x) const { return !less_than(x); }

std::size_t ceil_count(std::size_t n, double prob) {
  const double target = static_cast<double>(n) * prob;
  const double nearest = std::round(target);
  if (std::abs(target - nearest) <= 1e-9) {
    return static_cast<std::size_t>(std::max(0.0, nearest));
  }
  return static_cast<std::size_t>(std::max(0.0, std::ceil(target)));
}

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("empty sample");
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("sample contains a non-finite value");
    }
  }
  order_.resize(values_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
    return values_[a] < values_[b];
  });
  sorted_.resize(values_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) sorted_[k] = values_[order_[k]];
}

std::size_t Sample::count_at_most(double u) const {
  return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), u) -
                                  sorted_.begin());
}

std::size_t Sample::count_below(double u) const {
  return static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), u) -
                                  sorted_.begin());
}

PairedSample::PairedSample(std::vector<Sample> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("paired sample needs at least one marker");
  const std::size_t n = columns_.front().size();
  for (std::size_t i = 1; i < columns_.size(); ++i) {
    if (columns_[i].size() != n) {
      throw std::invalid_argument("marker column " + std::to_string(i + 1) +
                                  " has a different number of rows");
    }
  }
}

PairedSample PairedSample::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty sample");
  const std::size_t kappa = rows.front().size();
  std::vector<std::vector<double>> cols(kappa, std::vector<double>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != kappa) {
      throw std::invalid_argument("row " + std::to_string(r + 1) + " has " +
                                  std::to_string(rows[r].size()) + " markers, expected " +
                                  std::to_string(kappa));
    }
    for (std::size_t i = 0; i < kappa; ++i) cols[i][r] = rows[r][i];
  }
  std::vector<Sample> samples;
  samples.reserve(kappa);
  for (auto& c : cols) samples.emplace_back(std::move(c));
  return PairedSample(std::move(samples));
}

const Sample& PairedSample::column(std::size_t i) const {
  if (i >= columns_.size()) throw std::out_of_range("marker index out of range");
  return columns_[i];
}

double ecdf_eval(const Sample& sample, double u) {
  if (std::isnan(u)) throw std::invalid_argument("ecdf argument is NaN");
  return static_cast<double>(sample.count_at_most(u)) / static_cast<double>(sample.size());
}

ExtendedReal quantile(const Sample& sample, double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("quantile probability must lie in [0, 1]");
  }
  const std::size_t k = ceil_count(sample.size(), prob);
  if (k == 0) return ExtendedReal::neg_inf();
  return ExtendedReal::finite(sample.sorted()[std::min(k, sample.size()) - 1]);
}

double joint_ecdf_eval(const PairedSample& paired, std::size_t i, std::size_t j, double x,
                       double y) {
  const auto ci = paired.column(i).values();
  const auto cj = paired.column(j).values();
  std::size_t count = 0;
  for (std::size_t r = 0; r < ci.size(); ++r) {
    if (ci[r] <= x && cj[r] <= y) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(ci.size());
}

}  // namespace pauc
