#include "flosurf/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace flosurf;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Metrics, ZeroAngles) {
  std::vector<ShotOutcome> shots(10, ShotOutcome{0.0, 4, 0});
  const MetricEstimate m = estimate_metrics(shots);
  EXPECT_EQ(m.pli, 0.0);
  EXPECT_EQ(m.pld, 0.0);
  EXPECT_TRUE(std::isnan(m.coh_ratio));
  EXPECT_EQ(m.shots, 10);
  EXPECT_EQ(m.resamples, 4);
}

TEST(Metrics, CertainFlip) {
  // theta* = 0 with every resample in the logical-Z class is theta_L = pi/2.
  std::vector<ShotOutcome> shots(5, ShotOutcome{0.0, 3, 3});
  const MetricEstimate m = estimate_metrics(shots);
  EXPECT_NEAR(m.pli, 1.0, 1e-15);
  EXPECT_NEAR(m.pld, 2.0, 1e-15);
  EXPECT_NEAR(m.coh_ratio, 1.0, 1e-15);
  std::vector<ShotOutcome> direct(5, ShotOutcome{kPi / 2, 1, 0});
  EXPECT_NEAR(estimate_metrics(direct).pli, 1.0, 1e-15);
}

TEST(Metrics, MixedZeroAndQuarter) {
  std::vector<ShotOutcome> shots{{0.0, 1, 0}, {kPi / 4, 1, 0}};
  const MetricEstimate m = estimate_metrics(shots);
  EXPECT_NEAR(m.pli, 0.25, 1e-15);
  EXPECT_NEAR(m.pld, std::sqrt(2.0) / 2, 1e-15);
  EXPECT_NEAR(m.coh_ratio, std::sqrt(2.0), 1e-14);
}

TEST(Metrics, ResamplesAverageWithinShot) {
  // One of four resamples flips: mean of sin^2 over {t, t, t, t + pi/2}.
  const double t = 0.3;
  const MetricEstimate m = estimate_metrics(std::vector<ShotOutcome>{{t, 4, 1}});
  EXPECT_NEAR(m.pli, 0.75 * std::pow(std::sin(t), 2) + 0.25 * std::pow(std::cos(t), 2), 1e-15);
  EXPECT_NEAR(m.pld, 2 * (0.75 * std::sin(t) + 0.25 * std::cos(t)), 1e-15);
}

TEST(Metrics, InvariantsOnRandomInputs) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ShotOutcome> shots;
    for (int i = 0; i < 50; ++i) {
      const int r = 1 + static_cast<int>(rng.bits() % 5);
      shots.push_back({(rng.uniform() - 0.5) * kPi, r, static_cast<int>(rng.bits() % (r + 1))});
    }
    const MetricEstimate m = estimate_metrics(shots);
    EXPECT_GE(m.pli, 0.0);
    EXPECT_LE(m.pli, 1.0);
    EXPECT_GE(m.pld, 0.0);
    EXPECT_LE(m.pld, 2.0);
    EXPECT_GE(m.pld, 2 * m.pli - 1e-15);
    EXPECT_GE(m.coh_ratio, 1.0 - 1e-15);
  }
}

TEST(Metrics, StandardErrorOfPerShotMeans) {
  std::vector<ShotOutcome> shots;
  std::vector<double> x;
  for (int i = 0; i < 20; ++i) {
    const double t = 0.05 * i;
    shots.push_back({t, 1, 0});
    x.push_back(std::pow(std::sin(t), 2));
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size() - 1;
  const MetricEstimate m = estimate_metrics(shots);
  EXPECT_NEAR(m.pli_err, std::sqrt(var / x.size()), 1e-14);
}

TEST(Metrics, RejectsBadInput) {
  EXPECT_THROW(estimate_metrics(std::vector<ShotOutcome>{}), std::invalid_argument);
  EXPECT_THROW(estimate_metrics(std::vector<ShotOutcome>{{0.1, 0, 0}}), std::invalid_argument);
  EXPECT_THROW(estimate_metrics(std::vector<ShotOutcome>{{0.1, 2, 3}}), std::invalid_argument);
}

TEST(Metrics, TwirlRatios) {
  MetricEstimate m = estimate_metrics(std::vector<ShotOutcome>{{0.2, 1, 0}, {0.4, 1, 0}});
  attach_twirl(m, FailureEstimate{1000, 50});
  EXPECT_NEAR(m.twirl_i, m.pli / 0.05, 1e-12);
  EXPECT_NEAR(m.twirl_d, m.pld / 0.1, 1e-12);
  EXPECT_GT(m.twirl_i_err, 0.0);
  attach_twirl(m, FailureEstimate{1000, 0});
  EXPECT_TRUE(std::isnan(m.twirl_i));
}
