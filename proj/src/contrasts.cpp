#include "pauc/contrasts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pauc {

namespace {

Eigen::MatrixXd centering(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return Eigen::MatrixXd::Identity(k, k) -
         Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(n));
}

std::vector<std::string> default_labels(std::size_t r) {
  std::vector<std::string> labels;
  labels.reserve(r);
  for (std::size_t i = 0; i < r; ++i) labels.push_back("H" + std::to_string(i + 1));
  return labels;
}

}  // namespace

ContrastMatrix::ContrastMatrix(Eigen::MatrixXd rows, std::vector<std::string> labels)
    : rows_(std::move(rows)), labels_(std::move(labels)) {
  if (rows_.rows() == 0 || rows_.cols() == 0) {
    throw std::invalid_argument("contrast matrix must have at least one row and column");
  }
  if (labels_.empty()) labels_ = default_labels(static_cast<std::size_t>(rows_.rows()));
  if (labels_.size() != static_cast<std::size_t>(rows_.rows())) {
    throw std::invalid_argument("contrast matrix has " + std::to_string(rows_.rows()) +
                                " rows but " + std::to_string(labels_.size()) + " labels");
  }
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    const auto row = rows_.row(i);
    const std::string name = "row " + std::to_string(i + 1);
    if (!row.allFinite()) throw std::invalid_argument(name + " has a non-finite entry");
    if (row.cwiseAbs().maxCoeff() == 0.0) {
      throw std::invalid_argument(name + " is identically zero");
    }
    if (std::abs(row.sum()) > 1e-9 * std::max(1.0, row.cwiseAbs().sum())) {
      throw std::invalid_argument(name + " does not sum to zero");
    }
  }
}

ContrastMatrix ContrastMatrix::rescaled(const Eigen::VectorXd& factors) const {
  if (factors.size() != rows_.rows()) {
    throw std::invalid_argument("one scale factor per contrast row is required");
  }
  return ContrastMatrix(factors.asDiagonal() * rows_, labels_);
}

ContrastMatrix tukey(std::size_t kappa) {
  if (kappa < 2) throw std::invalid_argument("Tukey contrasts need at least 2 markers");
  const std::size_t r = kappa * (kappa - 1) / 2;
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r),
                                               static_cast<Eigen::Index>(kappa));
  std::vector<std::string> labels;
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < kappa; ++i) {
    for (std::size_t j = i + 1; j < kappa; ++j, ++k) {
      rows(k, static_cast<Eigen::Index>(i)) = 1.0;
      rows(k, static_cast<Eigen::Index>(j)) = -1.0;
      labels.push_back(std::to_string(i + 1) + "-" + std::to_string(j + 1));
    }
  }
  return ContrastMatrix(std::move(rows), std::move(labels));
}

ContrastMatrix dunnett(std::size_t kappa, std::size_t reference) {
  if (kappa < 2) throw std::invalid_argument("Dunnett contrasts need at least 2 markers");
  if (reference >= kappa) throw std::invalid_argument("Dunnett reference out of range");
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kappa - 1),
                                               static_cast<Eigen::Index>(kappa));
  std::vector<std::string> labels;
  Eigen::Index k = 0;
  for (std::size_t j = 0; j < kappa; ++j) {
    if (j == reference) continue;
    rows(k, static_cast<Eigen::Index>(j)) = 1.0;
    rows(k, static_cast<Eigen::Index>(reference)) = -1.0;
    labels.push_back(std::to_string(j + 1) + "-" + std::to_string(reference + 1));
    ++k;
  }
  return ContrastMatrix(std::move(rows), std::move(labels));
}

ContrastMatrix interaction(std::size_t a_levels, std::size_t b_levels) {
  if (a_levels < 2 || b_levels < 2) {
    throw std::invalid_argument("interaction contrasts need at least 2 levels per factor");
  }
  const Eigen::MatrixXd ca = centering(a_levels);
  const Eigen::MatrixXd cb = centering(b_levels);
  const auto na = static_cast<Eigen::Index>(a_levels);
  const auto nb = static_cast<Eigen::Index>(b_levels);
  Eigen::MatrixXd rows(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      rows.block(i * nb, j * nb, nb, nb) = ca(i, j) * cb;
    }
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < a_levels; ++i) {
    for (std::size_t j = 0; j < b_levels; ++j) {
      labels.push_back("A" + std::to_string(i + 1) + "xB" + std::to_string(j + 1));
    }
  }
  return ContrastMatrix(std::move(rows), std::move(labels));
}

ContrastMatrix custom(const Eigen::MatrixXd& rows, std::vector<std::string> labels) {
  return ContrastMatrix(rows, std::move(labels));
}

}  // namespace pauc
