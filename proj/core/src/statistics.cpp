#include "ngrc/statistics.hpp"

#include "ngrc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ngrc {

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw ArgumentError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

std::vector<double> ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) out[order[t]] = r;
    i = j + 1;
  }
  return out;
}

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ArgumentError("spearman: samples differ in length");
  if (xs.size() < 2) return std::nullopt;
  const std::vector<double> rx = ranks(xs);
  const std::vector<double> ry = ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

LinearFit fit_exponential_rate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ArgumentError("fit: samples differ in length");
  if (xs.size() < 3) throw ArgumentError("fit needs at least 3 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0.0)) throw ArgumentError("exponential fit needs positive y values");
    mx += xs[i];
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (std::log(ys[i]) - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("exponential fit needs at least two distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double correlation_decay_curve(double K, double gamma, double tau) {
  const double c = K * std::exp(-gamma * tau);
  if (!(c < 1.0) || !(c > -1.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt((1.0 + c) / (1.0 - c));
}

namespace {

// Sum of squared log residuals; infinity when the model is undefined at any tau.
double decay_objective(double K, double gamma, std::span<const double> taus, std::span<const double> kappas) {
  double sum = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double model = correlation_decay_curve(K, gamma, taus[i]);
    if (!std::isfinite(model)) return std::numeric_limits<double>::infinity();
    const double r = std::log(model) - std::log(kappas[i]);
    sum += r * r;
  }
  return sum;
}

}  // namespace

CorrelationDecayFit fit_correlation_decay(std::span<const double> taus, std::span<const double> kappas) {
  if (taus.size() != kappas.size()) throw ArgumentError("fit: samples differ in length");
  if (taus.size() < 2) throw ArgumentError("correlation-decay fit needs at least 2 points");
  for (double k : kappas) {
    if (!(k >= 1.0) || !std::isfinite(k)) throw ArgumentError("condition numbers must be finite and >= 1");
  }

  // K on a linear grid, gamma on a log grid; then zoom in around the best cell.
  double best_K = 0.0, best_g = 1.0;
  double best = decay_objective(0.0, 1.0, taus, kappas);
  double k_lo = 0.0, k_hi = 3.0;
  double lg_lo = std::log(1e-5), lg_hi = std::log(10.0);
  constexpr int kGrid = 80;
  for (int round = 0; round < 12; ++round) {
    const double dk = (k_hi - k_lo) / kGrid;
    const double dg = (lg_hi - lg_lo) / kGrid;
    for (int a = 0; a <= kGrid; ++a) {
      const double K = k_lo + dk * a;
      for (int b = 0; b <= kGrid; ++b) {
        const double g = std::exp(lg_lo + dg * b);
        const double obj = decay_objective(K, g, taus, kappas);
        if (obj < best) {
          best = obj;
          best_K = K;
          best_g = g;
        }
      }
    }
    k_lo = std::max(0.0, best_K - 4.0 * dk);
    k_hi = best_K + 4.0 * dk;
    lg_lo = std::log(best_g) - 4.0 * dg;
    lg_hi = std::log(best_g) + 4.0 * dg;
  }

  CorrelationDecayFit fit;
  if (!std::isfinite(best)) return fit;
  fit.ok = true;
  fit.K = best_K;
  fit.gamma = best_g;
  double sq = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double rel = (correlation_decay_curve(best_K, best_g, taus[i]) - kappas[i]) / kappas[i];
    sq += rel * rel;
  }
  fit.relative_rms = std::sqrt(sq / static_cast<double>(taus.size()));
  return fit;
}

}  // namespace ngrc
