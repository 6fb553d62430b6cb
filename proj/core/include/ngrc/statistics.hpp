#pragma once

// Summary statistics and curve fits used on sweep results.

#include <optional>
#include <span>
#include <vector>

namespace ngrc {

/// Linear interpolation between order statistics (position q (n - 1)).
/// Throws ArgumentError on empty input or q outside [0, 1].
[[nodiscard]] double quantile(std::span<const double> values, double q);
[[nodiscard]] double median(std::span<const double> values);

/// Average ranks (1-based) with ties sharing their mean rank.
[[nodiscard]] std::vector<double> ranks(std::span<const double> values);
/// Pearson correlation of the ranks. Empty when either input is constant.
[[nodiscard]] std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (x, ln y).
[[nodiscard]] LinearFit fit_exponential_rate(std::span<const double> xs, std::span<const double> ys);

/// sqrt((1 + K e^{-gamma tau}) / (1 - K e^{-gamma tau})); NaN where undefined.
[[nodiscard]] double correlation_decay_curve(double K, double gamma, double tau);

struct CorrelationDecayFit {
  bool ok = false;
  double K = 0.0;
  double gamma = 0.0;
  double relative_rms = 0.0;  // sqrt(mean(((model - kappa) / kappa)^2))
};

/// Fits correlation_decay_curve to (tau, kappa) by a log-spaced grid search
/// followed by successive grid refinement around the best point.
[[nodiscard]] CorrelationDecayFit fit_correlation_decay(std::span<const double> taus, std::span<const double> kappas);

}  // namespace ngrc
