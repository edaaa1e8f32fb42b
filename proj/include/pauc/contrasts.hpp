#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pauc {

// r x kappa matrix whose rows c_i encode the hypotheses <c_i, theta> = 0.
// Every row sums to zero and no row is identically zero.
class ContrastMatrix {
 public:
  // Validates the contrast invariants; throws std::invalid_argument naming
  // the offending (1-based) row.
  ContrastMatrix(Eigen::MatrixXd rows, std::vector<std::string> labels);

  const Eigen::MatrixXd& rows() const { return rows_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t hypotheses() const { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t markers() const { return static_cast<std::size_t>(rows_.cols()); }

  // Same hypotheses with row i multiplied by factors[i].
  ContrastMatrix rescaled(const Eigen::VectorXd& factors) const;

 private:
  Eigen::MatrixXd rows_;
  std::vector<std::string> labels_;
};

// All pairwise comparisons, rows ordered lexicographically by (i, j) with +1
// on the smaller index i and -1 on j.
ContrastMatrix tukey(std::size_t kappa);

// Many-to-one comparisons against a 0-based reference marker: for each
// j != reference a row with +1 at j and -1 at the reference.
ContrastMatrix dunnett(std::size_t kappa, std::size_t reference);

// No-interaction hypothesis of an a x b crossed design with markers ordered
// factor-A-major: (I_a - J_a/a) kron (I_b - J_b/b). Rows are linearly
// dependent and are all used as-is.
ContrastMatrix interaction(std::size_t a_levels, std::size_t b_levels);

// User-supplied rows. Labels default to "H1", "H2", ... when empty.
ContrastMatrix custom(const Eigen::MatrixXd& rows, std::vector<std::string> labels = {});

}  // namespace pauc
