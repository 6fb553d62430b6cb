#pragma once

// Data preparation and the training report: one design matrix, every
// requested solver on every coordinate, and the conditioning diagnostics.

#include "ngrc/config.hpp"
#include "ngrc/dynamics.hpp"
#include "ngrc/features.hpp"
#include "ngrc/solvers.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ngrc {

/// A normalized observed series laid out as
///   [ warm-up | n_train training rows | one target row | n_test test rows ]
/// so rows [0, warmup + n_train + 1) train the model and the final n_test
/// rows are the ground truth for the forecast.
struct Dataset {
  Trajectory series;
  std::size_t warmup = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;

  [[nodiscard]] std::size_t training_rows() const noexcept { return warmup + n_train + 1; }
  [[nodiscard]] Trajectory training() const;
  [[nodiscard]] Trajectory truth() const;
};

/// Simulates (or reuses raw, which must be unnormalized full state with at
/// least config.required_steps() + 1 rows), selects the observed
/// coordinates and normalizes.
[[nodiscard]] Dataset make_dataset(const NgrcConfig& config, const Trajectory* raw = nullptr);

struct SolverOutcome {
  ReadoutMatrix readout;
  std::vector<std::optional<double>> theta;  // per coordinate; empty on failure or invalid fit
  std::optional<double> theta_max;           // empty unless every coordinate has a theta
  // Present only when an exact coefficient matrix is known for the data.
  std::vector<std::optional<double>> relative_error;
  std::vector<std::optional<double>> error_bound;
};

struct TrainReport {
  EmbeddingConfig embedding;
  int p = 0;
  double beta = 0.0;
  std::size_t n_train = 0;
  std::size_t n_features = 0;
  double kappa = 0.0;
  double kappa_hat = 0.0;
  std::optional<double> kappa_beta;
  std::optional<double> delta;
  Eigen::VectorXd sigma;  // singular values of psi, descending
  std::vector<bool> zero_columns;
  std::vector<SolverOutcome> outcomes;  // in request order

  [[nodiscard]] const SolverOutcome* find(SolverId id) const noexcept;
  [[nodiscard]] std::vector<ReadoutMatrix> readouts() const;
};

/// Builds the design from the first rows of traj and solves for every solver.
/// Solver failures become flags; only malformed input throws.
[[nodiscard]] TrainReport train(const Trajectory& traj, const NgrcConfig& config, std::span<const SolverId> solvers);
[[nodiscard]] TrainReport train(const Trajectory& traj, const NgrcConfig& config);

/// Diagnostics only (kappa, kappa_hat, sigma); no solves.
[[nodiscard]] TrainReport conditioning_report(const Trajectory& traj, const NgrcConfig& config);

/// Exact d x m readout reproducing one explicit Euler step of Lorenz-63 in
/// normalized coordinates: W = sqrt(n_train) * h * C. Empty unless the data is
/// full-state Lorenz, integrated by Euler directly at h, normalized, and p >= 2.
[[nodiscard]] std::optional<Eigen::MatrixXd> lorenz_euler_readout(const Trajectory& traj, const EmbeddingConfig& cfg,
                                                                  const MonomialBasis& basis, std::size_t n_train);

}  // namespace ngrc
