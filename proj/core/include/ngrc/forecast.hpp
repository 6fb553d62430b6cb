#pragma once

// Autonomous NGRC rollout:
//   r_{n+1} = r_n + W psi(R_n) / sqrt(n_train)
// started from the tail of the training data.

#include "ngrc/config.hpp"
#include "ngrc/features.hpp"
#include "ngrc/solvers.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace ngrc {

struct BoundsCheck {
  bool bounded = true;
  std::optional<std::size_t> escape_index;  // first row with a component outside [-w, w]
};

/// Non-finite components count as escapes.
[[nodiscard]] BoundsCheck is_bounded(const Eigen::MatrixXd& states, double box_half_width = 1.0);

struct ForecastResult {
  Eigen::MatrixXd warmup;  // (k-1) tau + 1 rows copied from the end of the training data
  Eigen::MatrixXd states;  // predictions r_1 .. r_n; fewer than n_test rows if the run halted
  std::size_t n_test = 0;
  bool bounded = true;
  std::optional<std::size_t> escape_index;  // index into states
  bool halted = false;                      // stopped early at the escape threshold

  /// warm-up followed by predictions.
  [[nodiscard]] Eigen::MatrixXd full() const;
};

struct RolloutOptions {
  double box_half_width = 1.0;
  double escape_threshold = 10.0;
};

/// Warm-up rows x_{N}, ..., x_{N + (k-1) tau} from a training trajectory with
/// at least n_train + (k-1) tau + 1 rows.
[[nodiscard]] Eigen::MatrixXd training_warmup(const Eigen::MatrixXd& training, const EmbeddingConfig& cfg,
                                              std::size_t n_train);

[[nodiscard]] ForecastResult rollout(const Eigen::MatrixXd& W, const MonomialBasis& basis, const EmbeddingConfig& cfg,
                                     std::size_t n_train, const Eigen::MatrixXd& warmup, std::size_t n_test,
                                     const RolloutOptions& options = {});

[[nodiscard]] ForecastResult rollout(const ReadoutMatrix& W, const Trajectory& training, const NgrcConfig& config,
                                     std::size_t n_test);

}  // namespace ngrc
