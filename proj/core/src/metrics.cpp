#include "ngrc/metrics.hpp"

#include "ngrc/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

namespace ngrc {

double valid_prediction_time(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& pred, double h,
                             double lyapunov_exponent, double eta) {
  if (truth.rows() == 0) throw ArgumentError("valid prediction time needs a non-empty truth segment");
  if (truth.cols() != pred.cols()) throw ArgumentError("truth and prediction differ in dimension");
  if (pred.rows() > truth.rows()) throw ArgumentError("prediction is longer than the truth segment");
  if (!(lyapunov_exponent > 0.0) || !(h > 0.0)) throw ArgumentError("h and the Lyapunov exponent must be positive");

  const double rms = std::sqrt(truth.rowwise().squaredNorm().mean());
  if (!(rms > 0.0)) throw DegenerateDataError("truth segment has zero RMS norm");

  Eigen::Index n = 0;
  for (; n < pred.rows(); ++n) {
    const double err = (truth.row(n) - pred.row(n)).norm() / rms;
    if (!(err <= eta)) break;
  }
  return static_cast<double>(n) * h * lyapunov_exponent;
}

std::vector<double> successive_maxima(std::span<const double> series) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    if (series[i - 1] < series[i] && series[i] > series[i + 1]) out.push_back(series[i]);
  }
  return out;
}

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n != y_.size()) throw ArgumentError("spline abscissas and ordinates differ in length");
  if (n < 2) throw DegenerateDataError("spline needs at least two knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw ArgumentError("spline abscissas must be strictly increasing");
  }
  m_.assign(n, 0.0);
  if (n == 2) return;

  // Tridiagonal system for interior second derivatives (Thomas algorithm).
  const std::size_t k = n - 2;
  std::vector<double> diag(k), upper(k), rhs(k);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    diag[i - 1] = 2.0 * (h0 + h1);
    upper[i - 1] = h1;
    rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  for (std::size_t i = 1; i < k; ++i) {
    const double lower = x_[i + 1] - x_[i];  // sub-diagonal entry of row i equals h_i
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m_[k] = rhs[k - 1] / diag[k - 1];
  for (std::size_t i = k - 1; i >= 1; --i) {
    m_[i] = (rhs[i - 1] - upper[i - 1] * m_[i + 1]) / diag[i - 1];
  }
}

double NaturalCubicSpline::operator()(double u) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), u);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - u) / h;
  const double b = (u - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

NaturalCubicSpline return_map_spline(std::span<const double> maxima) {
  std::map<double, std::pair<double, int>> pts;
  for (std::size_t n = 0; n + 1 < maxima.size(); ++n) {
    auto& [sum, count] = pts[maxima[n]];
    sum += maxima[n + 1];
    ++count;
  }
  if (pts.size() < 4) throw DegenerateDataError("return map needs at least 4 distinct points for a cubic fit");
  std::vector<double> x, y;
  x.reserve(pts.size());
  y.reserve(pts.size());
  for (const auto& [key, acc] : pts) {
    x.push_back(key);
    y.push_back(acc.first / acc.second);
  }
  return NaturalCubicSpline(std::move(x), std::move(y));
}

std::optional<double> maxima_map_distance(std::span<const double> truth_maxima, std::span<const double> pred_maxima) {
  try {
    const NaturalCubicSpline s = return_map_spline(truth_maxima);
    const NaturalCubicSpline t = return_map_spline(pred_maxima);
    const double lo = std::max(s.lower(), t.lower());
    const double hi = std::min(s.upper(), t.upper());
    if (!(hi > lo)) return std::nullopt;
    constexpr int kPoints = 1000;
    double sum = 0.0;
    for (int j = 0; j < kPoints; ++j) {
      const double u = lo + (hi - lo) * static_cast<double>(j) / (kPoints - 1);
      sum += std::abs(s(u) - t(u));
    }
    return sum / kPoints;
  } catch (const DegenerateDataError&) {
    return std::nullopt;
  }
}

std::size_t welch_segment_length(double h) {
  if (!(h > 0.0)) throw ArgumentError("h must be positive");
  return static_cast<std::size_t>(std::floor(5.0 / h + 1e-9));
}

PsdEstimate welch_psd(const Eigen::MatrixXd& series, double h) {
  const std::size_t L = welch_segment_length(h);
  const auto n = static_cast<std::size_t>(series.rows());
  if (L < 2) throw ArgumentError("segment length floor(5/h) must be at least 2");
  if (n < L) {
    throw ArgumentError("Welch estimate needs at least " + std::to_string(L) + " samples, got " + std::to_string(n));
  }
  const std::size_t step = L - L / 2;
  const std::size_t segments = (n - L) / step + 1;
  const std::size_t bins = L / 2 + 1;
  const double fs = 1.0 / h;

  std::vector<double> window(L);
  double wsum = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(L));
    wsum += window[i] * window[i];
  }
  const double scale = 1.0 / (fs * wsum);

  PsdEstimate out;
  out.segment_length = L;
  out.frequencies.resize(static_cast<Eigen::Index>(bins));
  for (std::size_t b = 0; b < bins; ++b) out.frequencies[static_cast<Eigen::Index>(b)] = static_cast<double>(b) * fs / L;
  out.power = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bins), series.cols());

  Eigen::FFT<double> fft;
  std::vector<double> seg(L);
  std::vector<std::complex<double>> spec;
  for (Eigen::Index c = 0; c < series.cols(); ++c) {
    for (std::size_t s = 0; s < segments; ++s) {
      const std::size_t start = s * step;
      double mean = 0.0;
      for (std::size_t i = 0; i < L; ++i) mean += series(static_cast<Eigen::Index>(start + i), c);
      mean /= static_cast<double>(L);
      for (std::size_t i = 0; i < L; ++i) seg[i] = (series(static_cast<Eigen::Index>(start + i), c) - mean) * window[i];
      fft.fwd(spec, seg);
      for (std::size_t b = 0; b < bins; ++b) {
        double p = std::norm(spec[b]) * scale;
        const bool edge = b == 0 || (L % 2 == 0 && b == L / 2);
        if (!edge) p *= 2.0;
        out.power(static_cast<Eigen::Index>(b), c) += p;
      }
    }
  }
  out.power /= static_cast<double>(segments);
  return out;
}

PsdEstimate welch_psd(std::span<const double> series, double h) {
  const Eigen::Map<const Eigen::VectorXd> col(series.data(), static_cast<Eigen::Index>(series.size()));
  return welch_psd(Eigen::MatrixXd(col), h);
}

double spectral_divergence(const PsdEstimate& truth, const PsdEstimate& pred) {
  if (truth.power.rows() != pred.power.rows() || truth.power.cols() != pred.power.cols()) {
    throw ArgumentError("spectra are defined on different grids");
  }
  constexpr double kFloor = 1e-300;
  double e = 0.0;
  for (Eigen::Index c = 0; c < truth.power.cols(); ++c) {
    const double st = truth.power.col(c).sum();
    const double sp = pred.power.col(c).sum();
    for (Eigen::Index b = 0; b < truth.power.rows(); ++b) {
      const double P = st > 0.0 ? truth.power(b, c) / st : 0.0;
      const double Q = sp > 0.0 ? pred.power(b, c) / sp : 0.0;
      if (P == 0.0) continue;
      e += P * std::log10(std::max(P, kFloor) / std::max(Q, kFloor));
    }
  }
  return e;
}

double psd_divergence(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& pred, double h) {
  if (truth.rows() != pred.rows() || truth.cols() != pred.cols()) {
    throw ArgumentError("truth and prediction differ in shape");
  }
  return spectral_divergence(welch_psd(truth, h), welch_psd(pred, h));
}

double mutual_information(std::span<const double> series, std::size_t lag, std::size_t bins) {
  if (bins < 2) throw ArgumentError("mutual information needs at least 2 bins");
  if (lag >= series.size()) throw ArgumentError("lag exceeds series length");
  const auto [mn, mx] = std::minmax_element(series.begin(), series.end());
  const double lo = *mn;
  const double width = (*mx - *mn) / static_cast<double>(bins);
  if (!(width > 0.0)) return 0.0;
  const auto bin = [&](double v) {
    const auto b = static_cast<std::size_t>((v - lo) / width);
    return std::min(b, bins - 1);
  };

  const std::size_t n = series.size() - lag;
  std::vector<double> joint(bins * bins, 0.0), px(bins, 0.0), py(bins, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t a = bin(series[t]);
    const std::size_t b = bin(series[t + lag]);
    joint[a * bins + b] += 1.0;
    px[a] += 1.0;
    py[b] += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t a = 0; a < bins; ++a) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double pab = joint[a * bins + b] * inv;
      if (pab > 0.0) mi += pab * std::log(pab / (px[a] * inv * py[b] * inv));
    }
  }
  return mi;
}

std::vector<double> mutual_information_curve(std::span<const double> series, std::size_t max_lag, std::size_t bins) {
  std::vector<double> out;
  out.reserve(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) out.push_back(mutual_information(series, lag, bins));
  return out;
}

std::optional<std::size_t> mutual_information_first_min(std::span<const double> series, std::size_t max_lag,
                                                        std::size_t bins) {
  if (bins < 8) throw ArgumentError("mutual information lag selection needs at least 8 bins");
  if (series.size() <= 2 * max_lag) throw ArgumentError("series too short for the requested maximum lag");
  const std::vector<double> mi = mutual_information_curve(series, max_lag, bins);
  for (std::size_t lag = 1; lag < max_lag; ++lag) {
    if (mi[lag - 1] > mi[lag] && mi[lag] < mi[lag + 1]) return lag;
  }
  return std::nullopt;
}

MetricsReport score_forecast(const Eigen::MatrixXd& truth, const ForecastResult& forecast,
                             const MetricsOptions& options) {
  MetricsReport report;
  report.bounded = forecast.bounded && !forecast.halted &&
                   forecast.states.rows() == static_cast<Eigen::Index>(forecast.n_test);
  if (!report.bounded) {
    report.sentinel_applied = true;
    report.vpt = kMetricSentinel;
    report.d_maxima = kMetricSentinel;
    report.e_psd = kMetricSentinel;
    return report;
  }
  if (truth.rows() != forecast.states.rows() || truth.cols() != forecast.states.cols()) {
    throw ArgumentError("truth segment does not match the forecast shape");
  }
  report.vpt = valid_prediction_time(truth, forecast.states, options.h, options.lyapunov_exponent, options.eta);

  const int c = options.maxima_coordinate;
  if (c < 0 || c >= truth.cols()) throw ArgumentError("maxima coordinate out of range");
  const Eigen::VectorXd tz = truth.col(c);
  const Eigen::VectorXd pz = forecast.states.col(c);
  report.d_maxima = maxima_map_distance(successive_maxima({tz.data(), static_cast<std::size_t>(tz.size())}),
                                        successive_maxima({pz.data(), static_cast<std::size_t>(pz.size())}));

  if (static_cast<std::size_t>(truth.rows()) >= welch_segment_length(options.h)) {
    report.e_psd = psd_divergence(truth, forecast.states, options.h);
  }
  return report;
}

}  // namespace ngrc
