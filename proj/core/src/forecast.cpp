#include "ngrc/forecast.hpp"

#include "ngrc/errors.hpp"

#include <cmath>
#include <vector>

namespace ngrc {

BoundsCheck is_bounded(const Eigen::MatrixXd& states, double box_half_width) {
  BoundsCheck out;
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    for (Eigen::Index c = 0; c < states.cols(); ++c) {
      const double v = states(r, c);
      if (!(std::abs(v) <= box_half_width)) {
        out.bounded = false;
        out.escape_index = static_cast<std::size_t>(r);
        return out;
      }
    }
  }
  return out;
}

Eigen::MatrixXd ForecastResult::full() const {
  Eigen::MatrixXd out(warmup.rows() + states.rows(), warmup.cols());
  out << warmup, states;
  return out;
}

Eigen::MatrixXd training_warmup(const Eigen::MatrixXd& training, const EmbeddingConfig& cfg, std::size_t n_train) {
  const std::size_t rows = cfg.warmup() + 1;
  if (n_train + rows > static_cast<std::size_t>(training.rows())) {
    throw ArgumentError("training data has " + std::to_string(training.rows()) + " rows, warm-up needs " +
                        std::to_string(n_train + rows));
  }
  return training.middleRows(static_cast<Eigen::Index>(n_train), static_cast<Eigen::Index>(rows));
}

ForecastResult rollout(const Eigen::MatrixXd& W, const MonomialBasis& basis, const EmbeddingConfig& cfg,
                       std::size_t n_train, const Eigen::MatrixXd& warmup, std::size_t n_test,
                       const RolloutOptions& options) {
  cfg.validate();
  if (basis.n_vars() != cfg.dimension()) throw ArgumentError("basis does not match the embedding");
  if (W.rows() != cfg.d || W.cols() != static_cast<Eigen::Index>(basis.size())) {
    throw ArgumentError("readout is " + std::to_string(W.rows()) + "x" + std::to_string(W.cols()) + ", expected " +
                        std::to_string(cfg.d) + "x" + std::to_string(basis.size()));
  }
  if (warmup.rows() != static_cast<Eigen::Index>(cfg.warmup() + 1) || warmup.cols() != cfg.d) {
    throw ArgumentError("warm-up must have (k-1) tau + 1 rows of dimension d");
  }
  if (n_train == 0) throw ArgumentError("n_train must be >= 1");

  ForecastResult out;
  out.warmup = warmup;
  out.n_test = n_test;

  const std::size_t w = cfg.warmup();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n_train));
  const Eigen::MatrixXd Ws = W * inv_sqrt_n;

  // history holds warm-up then predictions; row j of the embedding at step n
  // reads history[n + j tau].
  Eigen::MatrixXd history(static_cast<Eigen::Index>(w + 1 + n_test), cfg.d);
  history.topRows(warmup.rows()) = warmup;
  Eigen::VectorXd X(cfg.dimension());
  Eigen::VectorXd psi(static_cast<Eigen::Index>(basis.size()));
  std::size_t produced = 0;

  for (std::size_t n = 0; n < n_test; ++n) {
    for (int j = 0; j < cfg.k; ++j) {
      X.segment(j * cfg.d, cfg.d) =
          history.row(static_cast<Eigen::Index>(n + static_cast<std::size_t>(j) * static_cast<std::size_t>(cfg.tau)))
              .transpose();
    }
    basis.evaluate(std::span<const double>(X.data(), static_cast<std::size_t>(X.size())),
                   std::span<double>(psi.data(), basis.size()));
    const auto cur = static_cast<Eigen::Index>(n + w);
    history.row(cur + 1) = history.row(cur) + (Ws * psi).transpose();
    ++produced;

    bool escaped = false;
    for (Eigen::Index c = 0; c < cfg.d; ++c) {
      const double v = history(cur + 1, c);
      if (!(std::abs(v) <= options.box_half_width) && !out.escape_index) {
        out.bounded = false;
        out.escape_index = n;
      }
      if (!(std::abs(v) <= options.escape_threshold)) escaped = true;
    }
    if (escaped) {
      out.halted = true;
      break;
    }
  }
  out.states = history.middleRows(static_cast<Eigen::Index>(w + 1), static_cast<Eigen::Index>(produced));
  return out;
}

ForecastResult rollout(const ReadoutMatrix& W, const Trajectory& training, const NgrcConfig& config,
                       std::size_t n_test) {
  const EmbeddingConfig emb{config.k, config.tau, training.dim()};
  const MonomialBasis basis = monomial_exponents(config.k, training.dim(), config.p);
  return rollout(W.W, basis, emb, config.n_train, training_warmup(training.states, emb, config.n_train), n_test,
                 {config.box_half_width, config.escape_threshold});
}

}  // namespace ngrc
