#pragma once

// Design objects of the polynomial delay model: delay embedding, monomial
// basis, scaled feature matrix, one-step difference targets and column
// weighting.

#include "ngrc/dynamics.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ngrc {

struct EmbeddingConfig {
  int k = 1;    // delay dimension
  int tau = 1;  // lag in samples
  int d = 3;    // observed state dimension

  [[nodiscard]] std::size_t warmup() const noexcept {
    return static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(tau);
  }
  [[nodiscard]] int dimension() const noexcept { return k * d; }
  /// Throws ArgumentError unless k, tau, d >= 1.
  void validate() const;
};

/// Number of monomials of total degree <= p in n variables, C(n + p, p).
/// Throws ArgumentError if the count does not fit in std::size_t.
[[nodiscard]] std::size_t monomial_count(int n_vars, int degree);

/// All monomials of total degree <= p in n variables, graded lexicographic
/// order with the constant first. Within one degree, a larger exponent on an
/// earlier variable comes first: 1, x1, x2, x1^2, x1 x2, x2^2, ...
///
/// Variables are numbered block-wise along the embedding: variable j*d + i
/// is coordinate i of the j-th delayed state.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int n_vars, int degree);

  [[nodiscard]] int n_vars() const noexcept { return n_vars_; }
  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] std::size_t size() const noexcept { return exponents_.size(); }
  [[nodiscard]] const std::vector<std::vector<int>>& exponents() const noexcept { return exponents_; }
  [[nodiscard]] const std::vector<int>& exponent(std::size_t j) const { return exponents_.at(j); }

  /// Index of an exact exponent vector, or size() if absent.
  [[nodiscard]] std::size_t index_of(std::span<const int> alpha) const;

  /// Writes psi(X) into out (length size()).
  void evaluate(std::span<const double> X, std::span<double> out) const;
  [[nodiscard]] Eigen::VectorXd evaluate(const Eigen::VectorXd& X) const;

  /// Human-readable label such as "x1^2*x3" (variables 1-based).
  [[nodiscard]] std::string label(std::size_t j) const;

 private:
  struct Factor {
    int var;
    int power;
  };
  int n_vars_ = 0;
  int degree_ = 0;
  std::vector<std::vector<int>> exponents_;
  std::vector<std::vector<Factor>> factors_;  // sparse view of exponents_
};

[[nodiscard]] MonomialBasis monomial_exponents(int k, int d, int p);

/// vec(x_n, x_{n+tau}, ..., x_{n+(k-1)tau}).
[[nodiscard]] Eigen::VectorXd embed(const Trajectory& traj, const EmbeddingConfig& cfg, std::size_t n);
[[nodiscard]] Eigen::VectorXd embed(const Eigen::MatrixXd& states, const EmbeddingConfig& cfg, std::size_t n);

[[nodiscard]] Eigen::VectorXd feature_vector(const Eigen::VectorXd& X, const MonomialBasis& basis);

struct ColumnWeighting {
  Eigen::MatrixXd weighted;            // every nonzero column has unit norm
  Eigen::VectorXd norms;               // original column norms
  std::vector<bool> zero_columns;      // columns left at zero
  [[nodiscard]] bool degenerate() const noexcept;
};

[[nodiscard]] ColumnWeighting column_weight(const Eigen::MatrixXd& psi);

struct DesignSet {
  Eigen::MatrixXd psi;      // n_train x m, rows psi(X_r) / sqrt(n_train)
  Eigen::MatrixXd psi_hat;  // column-weighted psi
  Eigen::MatrixXd targets;  // n_train x d, column i is y_i
  EmbeddingConfig embedding;
  MonomialBasis basis;
  Eigen::VectorXd column_norms;
  std::vector<bool> zero_columns;

  [[nodiscard]] std::size_t n_train() const noexcept { return static_cast<std::size_t>(psi.rows()); }
  [[nodiscard]] std::size_t n_features() const noexcept { return static_cast<std::size_t>(psi.cols()); }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(targets.cols()); }
  [[nodiscard]] Eigen::VectorXd target(int coordinate) const;
};

/// Rows needed by build_design: n_train + (k-1) tau + 1.
[[nodiscard]] std::size_t required_length(const EmbeddingConfig& cfg, std::size_t n_train) noexcept;

[[nodiscard]] DesignSet build_design(const Trajectory& traj, const EmbeddingConfig& cfg,
                                     const MonomialBasis& basis, std::size_t n_train);

/// Unscaled feature rows psi(X_r) for r in [0, n_rows).
[[nodiscard]] Eigen::MatrixXd feature_rows(const Eigen::MatrixXd& states, const EmbeddingConfig& cfg,
                                           const MonomialBasis& basis, std::size_t n_rows);

/// Column-weighted 3-column matrix for {1, x_n, x_{n+tau}} built from one
/// coordinate after removing its mean over the samples used.
[[nodiscard]] ColumnWeighting x_submatrix(const Trajectory& traj, int tau, std::size_t n_train,
                                          int coordinate = 0);

}  // namespace ngrc
