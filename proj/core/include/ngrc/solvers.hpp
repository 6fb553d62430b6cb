#pragma once

// Regularized least squares  min_u ||y - Psi u||^2 + beta ||u||^2  by three
// algorithms, plus the conditioning and fit diagnostics used to compare them.
//
// Binary64 throughout. The algorithms are deliberately the textbook ones:
//   Cholesky  factor (Psi^T Psi + beta I) and back-substitute;
//   Svd       filter factors sigma / (sigma^2 + beta) on the thin SVD of Psi;
//   Lu        form (Psi^T Psi + beta I)^{-1} explicitly, then multiply.
// Failures (non-positive pivot, exactly singular pivot) are reported, never
// papered over.

#include "ngrc/features.hpp"

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ngrc {

enum class SolverId { Cholesky, Svd, Lu };

inline constexpr SolverId kAllSolvers[] = {SolverId::Cholesky, SolverId::Svd, SolverId::Lu};

[[nodiscard]] std::string_view to_string(SolverId id) noexcept;
/// "cholesky" | "svd" | "lu" (case-insensitive).
[[nodiscard]] SolverId parse_solver(std::string_view text);
/// Comma-separated list; "all" expands to the three solvers, "none" to an empty set.
[[nodiscard]] std::vector<SolverId> parse_solver_list(std::string_view text);

inline constexpr double kMachineEpsilon = 2.220446049250313e-16;
/// Reported condition number when the smallest singular value is exactly zero.
inline constexpr double kSingularConditionNumber = 1.0 / kMachineEpsilon;

// --- matrix-level algorithms -------------------------------------------------

[[nodiscard]] std::optional<Eigen::VectorXd> solve_cholesky(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                                                            double beta);
[[nodiscard]] std::optional<Eigen::VectorXd> solve_svd(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                                                       double beta);
[[nodiscard]] std::optional<Eigen::VectorXd> solve_lu(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                                                      double beta);

// --- design-level entry points -----------------------------------------------

[[nodiscard]] std::optional<Eigen::VectorXd> solve_cholesky(const DesignSet& design, int coordinate, double beta);
[[nodiscard]] std::optional<Eigen::VectorXd> solve_svd(const DesignSet& design, int coordinate, double beta);
[[nodiscard]] std::optional<Eigen::VectorXd> solve_lu(const DesignSet& design, int coordinate, double beta);

/// Factorizations of one feature matrix, computed lazily and reused across
/// right-hand sides and regularizers.
class RegularizedLeastSquares {
 public:
  explicit RegularizedLeastSquares(Eigen::MatrixXd psi);

  [[nodiscard]] std::optional<Eigen::VectorXd> solve(SolverId solver, const Eigen::VectorXd& y, double beta);
  /// Descending singular values of psi.
  [[nodiscard]] const Eigen::VectorXd& singular_values();
  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return psi_; }

 private:
  [[nodiscard]] const Eigen::MatrixXd& gram();
  void ensure_svd();

  Eigen::MatrixXd psi_;
  std::optional<Eigen::MatrixXd> gram_;
  bool have_svd_ = false;
  Eigen::MatrixXd u_;
  Eigen::VectorXd sigma_;
  Eigen::MatrixXd v_;
};

// --- diagnostics ---------------------------------------------------------------

/// Descending singular values.
[[nodiscard]] Eigen::VectorXd singular_values(const Eigen::MatrixXd& psi);

/// sigma_max / sigma_min; kSingularConditionNumber when sigma_min == 0.
[[nodiscard]] double condition_number(const Eigen::MatrixXd& psi);
[[nodiscard]] double condition_number_from_singular_values(const Eigen::VectorXd& sigma);

/// sigma_1 / sqrt(beta). Throws ArgumentError for beta <= 0.
[[nodiscard]] double regularized_condition_number(const Eigen::MatrixXd& psi, double beta);
[[nodiscard]] double regularized_condition_number_from_sigma1(double sigma1, double beta);

/// arcsin(||y - Psi w|| / ||y||). Empty when the ratio exceeds 1 or is not
/// finite. Throws DegenerateDataError when ||y|| == 0.
[[nodiscard]] std::optional<double> closeness_of_fit(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                                                     const Eigen::VectorXd& w);
[[nodiscard]] std::optional<double> closeness_of_fit(const DesignSet& design, int coordinate,
                                                     const Eigen::VectorXd& w);

/// First-order relative-error bound eps (2 kappa / cos(theta) + tan(theta) kappa^2).
[[nodiscard]] double relative_error_bound(double kappa, double theta, double eps = kMachineEpsilon);

struct ReadoutMatrix {
  Eigen::MatrixXd W;                 // d x m; failed rows are zero
  double beta = 0.0;
  SolverId solver = SolverId::Svd;
  std::vector<bool> per_coordinate_failed;

  [[nodiscard]] bool any_failed() const noexcept;
};

/// Largest Euclidean distance between rows of two different readouts, over
/// coordinates where both solves succeeded. Empty when no coordinate has two
/// successful solves.
[[nodiscard]] std::optional<double> pairwise_diff(std::span<const ReadoutMatrix> readouts);

}  // namespace ngrc
