#pragma once

// Forecast-quality metrics: valid prediction time, successive-maxima map
// distance, Welch power spectra with a KL divergence, and mutual-information
// lag selection.

#include "ngrc/forecast.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ngrc {

inline constexpr double kMetricSentinel = -1.0;

/// Valid prediction time in Lyapunov times. Rows of truth and pred are time.
/// pred may be shorter than truth (a halted rollout); missing rows count as
/// a threshold crossing.
[[nodiscard]] double valid_prediction_time(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& pred, double h,
                                           double lyapunov_exponent, double eta = 0.9);

/// Values s_n with s_{n-1} < s_n > s_{n+1}, in order.
[[nodiscard]] std::vector<double> successive_maxima(std::span<const double> series);

/// Natural cubic spline through (x_i, y_i) with strictly increasing x.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline(std::vector<double> x, std::vector<double> y);
  [[nodiscard]] double operator()(double u) const;
  [[nodiscard]] double lower() const noexcept { return x_.front(); }
  [[nodiscard]] double upper() const noexcept { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at the knots
};

/// Return-map spline of consecutive maxima: abscissas sorted, duplicates averaged.
/// Throws DegenerateDataError with fewer than 4 distinct abscissas.
[[nodiscard]] NaturalCubicSpline return_map_spline(std::span<const double> maxima);

/// Mean |S(u) - S_hat(u)| over 1000 evenly spaced points of the overlap of
/// the two spline domains. Empty when either map has too few points or the
/// overlap is empty.
[[nodiscard]] std::optional<double> maxima_map_distance(std::span<const double> truth_maxima,
                                                        std::span<const double> pred_maxima);

struct PsdEstimate {
  Eigen::VectorXd frequencies;
  Eigen::MatrixXd power;  // bins x coordinates
  std::size_t segment_length = 0;
};

/// floor(5 / h), guarded against round-off (5 / 0.01 is 500, not 499).
[[nodiscard]] std::size_t welch_segment_length(double h);

/// Welch estimate: periodic Hann window, 50% overlap, constant detrend,
/// density scaling, one-sided, mean of periodograms.
[[nodiscard]] PsdEstimate welch_psd(const Eigen::MatrixXd& series, double h);
[[nodiscard]] PsdEstimate welch_psd(std::span<const double> series, double h);

/// Sum over coordinates of KL(P || P_hat), base 10, after normalizing each
/// spectrum to unit sum and flooring both at 1e-300.
[[nodiscard]] double psd_divergence(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& pred, double h);
[[nodiscard]] double spectral_divergence(const PsdEstimate& truth, const PsdEstimate& pred);

/// Histogram mutual information between x_t and x_{t+lag}.
[[nodiscard]] double mutual_information(std::span<const double> series, std::size_t lag, std::size_t bins = 64);
/// I(lag) for lag = 0..max_lag.
[[nodiscard]] std::vector<double> mutual_information_curve(std::span<const double> series, std::size_t max_lag,
                                                           std::size_t bins = 64);
/// First lag in [1, max_lag) that is a strict local minimum of I.
[[nodiscard]] std::optional<std::size_t> mutual_information_first_min(std::span<const double> series,
                                                                      std::size_t max_lag, std::size_t bins = 64);

struct MetricsReport {
  double vpt = kMetricSentinel;
  std::optional<double> d_maxima;
  std::optional<double> e_psd;
  bool bounded = false;
  bool sentinel_applied = false;
};

struct MetricsOptions {
  double h = 0.01;
  double lyapunov_exponent = 0.9056;
  double eta = 0.9;
  int maxima_coordinate = 2;
};

/// All metrics for one forecast; unbounded forecasts get (-1, -1, -1).
[[nodiscard]] MetricsReport score_forecast(const Eigen::MatrixXd& truth, const ForecastResult& forecast,
                                           const MetricsOptions& options);

}  // namespace ngrc
