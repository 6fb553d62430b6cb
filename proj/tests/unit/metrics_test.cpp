#include "ngrc/dynamics.hpp"
#include "ngrc/errors.hpp"
#include "ngrc/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace ngrc;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

Eigen::MatrixXd as_column(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Maxima sequence of x -> r x (1 - x) + shift, which is its own return map.
std::vector<double> logistic(double r, double shift, double x0, std::size_t n) {
  std::vector<double> out;
  double x = x0;
  for (std::size_t i = 0; i < 100; ++i) x = r * x * (1.0 - x) + shift;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(x);
    x = r * x * (1.0 - x) + shift;
  }
  return out;
}

}  // namespace

TEST(Vpt, IdenticalRunsUseFullLength) {
  Eigen::MatrixXd t(400, 3);
  for (Eigen::Index n = 0; n < t.rows(); ++n) t.row(n) << std::sin(0.1 * n), std::cos(0.1 * n), 0.5;
  EXPECT_NEAR(valid_prediction_time(t, t, 0.01, 0.9056), 400 * 0.01 * 0.9056, 1e-12);
  EXPECT_EQ(valid_prediction_time(t, (t.array() + 100.0).matrix(), 0.01, 0.9056), 0.0);
  EXPECT_THROW((void)valid_prediction_time(Eigen::MatrixXd(0, 3), Eigen::MatrixXd(0, 3), 0.01, 0.9), ArgumentError);
}

TEST(Vpt, MonotoneInThreshold) {
  Eigen::MatrixXd t(500, 2), p(500, 2);
  for (Eigen::Index n = 0; n < t.rows(); ++n) {
    t.row(n) << std::sin(0.05 * n), std::cos(0.05 * n);
    p.row(n) << std::sin(0.05 * n * 1.02), std::cos(0.05 * n * 1.02);
  }
  double previous = 0.0;
  for (double eta : {0.05, 0.1, 0.3, 0.9, 1.5}) {
    const double v = valid_prediction_time(t, p, 0.01, 1.0, eta);
    EXPECT_GE(v, previous);
    previous = v;
  }
}

TEST(Vpt, HaltedPredictionCountsAsCrossing) {
  const Eigen::MatrixXd t = Eigen::MatrixXd::Ones(100, 1);
  EXPECT_NEAR(valid_prediction_time(t, t.topRows(30), 0.1, 1.0), 3.0, 1e-12);
}

TEST(SuccessiveMaxima, SineAndMonotone) {
  std::vector<double> s;
  for (int i = 0; i <= 5000; ++i) s.push_back(std::sin(2.0 * kPi * i * 0.001));
  const std::vector<double> m = successive_maxima(s);
  ASSERT_EQ(m.size(), 5u);
  for (double v : m) EXPECT_NEAR(v, 1.0, 1e-12);

  std::vector<double> up(50);
  for (std::size_t i = 0; i < up.size(); ++i) up[i] = static_cast<double>(i);
  EXPECT_TRUE(successive_maxima(up).empty());
  EXPECT_TRUE(successive_maxima(std::vector<double>{1.0, 1.0, 1.0}).empty());
}

TEST(NaturalCubicSpline, InterpolatesAndIsLinearExact) {
  const NaturalCubicSpline s({0.0, 1.0, 2.0, 4.0}, {1.0, 3.0, 5.0, 9.0});
  EXPECT_DOUBLE_EQ(s(1.0), 3.0);
  EXPECT_NEAR(s(3.0), 7.0, 1e-14);
  EXPECT_NEAR(s(0.25), 1.5, 1e-14);
}

TEST(MaximaMapDistance, IdenticalSymmetricAndShift) {
  const std::vector<double> a = logistic(3.6, 0.0, 0.3, 6000);
  const std::vector<double> b = logistic(3.6, 0.1, 0.3, 6000);
  const auto same = maxima_map_distance(a, a);
  ASSERT_TRUE(same);
  EXPECT_EQ(*same, 0.0);
  const auto ab = maxima_map_distance(a, b);
  const auto ba = maxima_map_distance(b, a);
  ASSERT_TRUE(ab && ba);
  EXPECT_DOUBLE_EQ(*ab, *ba);
  EXPECT_NEAR(*ab, 0.1, 1e-6);
}

TEST(MaximaMapDistance, TooFewPointsIsUndefined) {
  EXPECT_FALSE(maxima_map_distance(std::vector<double>{0.1, 0.5, 0.2}, logistic(3.6, 0.0, 0.3, 100)));
  EXPECT_THROW((void)return_map_spline(std::vector<double>{0.1, 0.5, 0.1, 0.5}), DegenerateDataError);
}

TEST(Welch, SegmentLengthAndBins) {
  EXPECT_EQ(welch_segment_length(0.01), 500u);
  EXPECT_EQ(welch_segment_length(0.25), 20u);
  EXPECT_EQ(welch_segment_length(0.1), 50u);
  const PsdEstimate p = welch_psd(white_noise(2000, 1), 0.01);
  EXPECT_EQ(p.segment_length, 500u);
  EXPECT_EQ(p.frequencies.size(), 251);
  EXPECT_EQ(p.power.rows(), 251);
  EXPECT_NEAR(p.frequencies[1], 1.0 / (500 * 0.01), 1e-12);
  EXPECT_GE(p.power.minCoeff(), 0.0);
  EXPECT_THROW((void)welch_psd(white_noise(499, 1), 0.01), ArgumentError);
}

TEST(Welch, SinusoidPeaksAtItsBin) {
  const double h = 0.01;
  const double f = 20.0 / (500 * h);
  std::vector<double> s(5000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(2.0 * kPi * f * static_cast<double>(i) * h);
  const PsdEstimate p = welch_psd(s, h);
  Eigen::Index peak = 0;
  p.power.col(0).maxCoeff(&peak);
  EXPECT_EQ(peak, 20);
  for (Eigen::Index b = 0; b < p.power.rows(); ++b)
    if (std::abs(b - 20) > 1) EXPECT_LT(p.power(b, 0), 1e-6 * p.power(20, 0));
}

TEST(Welch, WhiteNoiseIsFlatAndParsevalHolds) {
  const double h = 0.01;
  const std::vector<double> v = white_noise(400000, 2);
  const PsdEstimate p = welch_psd(v, h);
  const Eigen::VectorXd inner = p.power.col(0).segment(1, p.power.rows() - 2);
  const double mean = inner.mean();
  EXPECT_LE(10.0 * std::log10(inner.maxCoeff() / mean), 3.0);
  EXPECT_GE(10.0 * std::log10(inner.minCoeff() / mean), -3.0);

  const double df = p.frequencies[1] - p.frequencies[0];
  const double total = p.power.col(0).sum() * df;
  double var = 0.0;
  for (double x : v) var += x * x;
  var /= static_cast<double>(v.size());
  EXPECT_NEAR(total, var, 0.1 * var);
}

TEST(Welch, ParsevalOnColouredSeries) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> v(200000);
  double x = 0.0;
  for (double& s : v) s = x = 0.95 * x + g(rng);
  const PsdEstimate p = welch_psd(v, 0.01);
  const double total = p.power.col(0).sum() * (p.frequencies[1] - p.frequencies[0]);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double s : v) var += (s - mean) * (s - mean);
  var /= static_cast<double>(v.size());
  EXPECT_NEAR(total, var, 0.1 * var);
}

TEST(PsdDivergence, Examples) {
  const Eigen::MatrixXd a = as_column(white_noise(20000, 4));
  EXPECT_EQ(psd_divergence(a, a, 0.01), 0.0);
  const Eigen::MatrixXd b = as_column(white_noise(20000, 5));
  const double noise = psd_divergence(a, b, 0.01);
  EXPECT_GE(noise, 0.0);
  EXPECT_LT(noise, 0.01);
  EXPECT_THROW((void)psd_divergence(a, a.topRows(10000), 0.01), ArgumentError);

  Eigen::MatrixXd tone(20000, 1), near(20000, 1);
  for (Eigen::Index i = 0; i < tone.rows(); ++i) {
    tone(i, 0) = std::sin(2.0 * kPi * 3.0 * 0.01 * static_cast<double>(i));
    near(i, 0) = tone(i, 0) + 0.01 * b(i, 0);
  }
  EXPECT_LT(psd_divergence(tone, near, 0.01), psd_divergence(tone, b, 0.01) / 100.0);
}

TEST(MutualInformation, NoiseIsSmallAndFlat) {
  const std::vector<double> v = white_noise(100000, 6);
  const std::vector<double> curve = mutual_information_curve(v, 20);
  ASSERT_EQ(curve.size(), 21u);
  EXPECT_GT(curve[0], 1.0);
  for (std::size_t lag = 1; lag < curve.size(); ++lag) EXPECT_LT(curve[lag], 0.05);
  EXPECT_NEAR(mutual_information(v, 3), curve[3], 1e-15);
}

TEST(MutualInformation, LorenzFirstMinimum) {
  SimulationRequest req;
  req.n_steps = 20000;
  req.seed = 1;
  const Trajectory t = normalize(simulate(req));
  const Eigen::VectorXd x = t.states.col(0);
  const auto lag = mutual_information_first_min({x.data(), static_cast<std::size_t>(x.size())}, 60);
  ASSERT_TRUE(lag);
  EXPECT_GE(*lag, 13u);
  EXPECT_LE(*lag, 17u);
}

TEST(ScoreForecast, SentinelOnUnbounded) {
  ForecastResult fc;
  fc.states = Eigen::MatrixXd::Constant(10, 3, 2.0);
  fc.n_test = 100;
  fc.bounded = false;
  fc.halted = true;
  fc.escape_index = 0;
  const MetricsReport m = score_forecast(Eigen::MatrixXd::Zero(100, 3), fc, {});
  EXPECT_FALSE(m.bounded);
  EXPECT_TRUE(m.sentinel_applied);
  EXPECT_EQ(m.vpt, -1.0);
  EXPECT_EQ(*m.d_maxima, -1.0);
  EXPECT_EQ(*m.e_psd, -1.0);
}

TEST(ScoreForecast, PerfectForecast) {
  SimulationRequest req;
  req.n_steps = 3000;
  req.seed = 2;
  const Trajectory t = normalize(simulate(req));
  ForecastResult fc;
  fc.states = t.states;
  fc.n_test = t.size();
  const MetricsReport m = score_forecast(t.states, fc, {});
  EXPECT_TRUE(m.bounded);
  EXPECT_NEAR(m.vpt, static_cast<double>(t.size()) * 0.01 * 0.9056, 1e-9);
  ASSERT_TRUE(m.d_maxima && m.e_psd);
  EXPECT_EQ(*m.d_maxima, 0.0);
  EXPECT_EQ(*m.e_psd, 0.0);
}
