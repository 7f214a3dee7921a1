#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "rabical/experiment.hpp"
#include "rabical/fitting.hpp"

using namespace rabical;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

ChannelModel channel(const char* profile, double t1 = kInf, double rate = 0.42,
                     double attenuation = 1.0) {
  return ChannelModel{SimulatedQubit{"test", 4.0, t1, rate}, preset_profile(profile),
                      attenuation};
}

}  // namespace

TEST(ArithmeticAxis, InclusiveAndNonAccumulating) {
  const auto a = arithmetic_axis(0.0, 500.0, 2.0);
  ASSERT_EQ(a.size(), 251u);
  EXPECT_EQ(a.back(), 500.0);
  const auto d = arithmetic_axis(0.0, 2.0, 0.01);
  ASSERT_EQ(d.size(), 201u);
  EXPECT_EQ(d[37], 37 * 0.01);
  const auto q2 = arithmetic_axis(25.0, 498.0, 1.8);
  EXPECT_EQ(q2.size(), 263u);
  EXPECT_NEAR(q2.back(), 496.6, 1e-9);
  EXPECT_THROW(arithmetic_axis(0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(arithmetic_axis(1.0, 0.0, 0.1), std::invalid_argument);
}

TEST(RunRabiMap, ZeroDurationIsGround) {
  const SweepGrid g{{100.0}, {0.0}, 1000000, 1};
  EXPECT_EQ(run_rabi_map(channel("identity"), g).at(0, 0), 0.0);
}

TEST(RunRabiMap, PiPulse) {
  // rate * attenuation * 100 mV = pi rad/us.
  const auto ch = channel("identity", kInf, kPi / 100.0);
  const SweepGrid g{{100.0}, {1.0}, 1000000, 1};
  const double p = run_rabi_map(ch, g).at(0, 0);
  EXPECT_GE(p, 0.999);
  EXPECT_LE(p, 1.0);
}

TEST(RunRabiMap, PaperLikePhaseReduction) {
  const SweepGrid g{{130.0}, {1.0}, 1000, 1};
  const auto pl = channel("paper_like");
  const auto id = channel("identity");
  const double p_pl = noiseless_rabi_map(pl, g).at(0, 0);
  const double p_id = noiseless_rabi_map(id, g).at(0, 0);
  EXPECT_GT(std::abs(p_pl - p_id), 0.01);
  EXPECT_NEAR(pl.rabi_frequency(130.0) / id.rabi_frequency(130.0), 0.87, 1e-3);
  EXPECT_NEAR(p_pl, ideal_excited_probability(0.42 * apply_distortion(pl.profile, 130.0), 1.0),
              1e-15);
}

TEST(RunRabiMap, IdentityNoiselessMatchesClosedForm) {
  const SweepGrid g{arithmetic_axis(0.0, 100.0, 5.0), arithmetic_axis(0.0, 2.0, 0.05), 1000, 0};
  const auto m = noiseless_rabi_map(channel("identity"), g);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      ASSERT_NEAR(m.at(i, j),
                  ideal_excited_probability(0.42 * g.amplitudes_mv[i], g.durations_us[j]), 1e-12);
    }
  }
}

TEST(RunRabiMap, Deterministic) {
  const SweepGrid g{arithmetic_axis(0.0, 200.0, 4.0), arithmetic_axis(0.0, 1.0, 0.02), 1000, 77};
  const auto ch = channel("paper_like", 59.5);
  EXPECT_EQ(run_rabi_map(ch, g).p_estimates, run_rabi_map(ch, g).p_estimates);
  SweepGrid other = g;
  other.seed = 78;
  EXPECT_NE(run_rabi_map(ch, g).p_estimates, run_rabi_map(ch, other).p_estimates);
}

TEST(RunRabiMap, SubGridConsistency) {
  const auto ch = channel("paper_like", 59.5);
  const SweepGrid full{arithmetic_axis(0.0, 200.0, 2.0), arithmetic_axis(0.0, 1.0, 0.01), 500, 5};
  const auto big = run_rabi_map(ch, full);
  SweepGrid sub = full;
  sub.amplitudes_mv = {6.0, 64.0, 130.0, 198.0};
  sub.durations_us = {0.1, 0.37, 0.9};
  const auto small = run_rabi_map(ch, sub);
  for (std::size_t i = 0; i < sub.amplitudes_mv.size(); ++i) {
    const auto bi = static_cast<std::size_t>(sub.amplitudes_mv[i] / 2.0);
    for (std::size_t j = 0; j < sub.durations_us.size(); ++j) {
      const auto bj = static_cast<std::size_t>(std::lround(sub.durations_us[j] / 0.01));
      ASSERT_EQ(full.durations_us[bj], sub.durations_us[j]);
      EXPECT_EQ(small.at(i, j), big.at(bi, bj));
    }
  }
}

TEST(RunRabiMap, MonotonePhaseWithIdentity) {
  const SweepGrid g{arithmetic_axis(10.0, 300.0, 10.0), arithmetic_axis(0.0, 2.0, 0.01), 1000, 0};
  const auto curve = extract_curve(noiseless_rabi_map(channel("identity", 59.5), g)).curve;
  ASSERT_EQ(curve.size(), g.amplitudes_mv.size());
  for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_GE(curve.omegas[i], curve.omegas[i - 1]);
}

TEST(RunRabiMap, CorrectionAppliedPerAmplitude) {
  CorrectionTable t;
  t.amplitudes_mv = {50.0, 100.0};
  t.vc_factors = {1.0, 1.1};
  t.applied_mv = {50.0, 1.1 * 100.0};
  t.band_low_mv = {49.0, 109.0};
  t.band_high_mv = {51.0, 111.0};
  t.validate();
  const auto ch = channel("identity");
  const SweepGrid g{{50.0, 75.0, 100.0}, {0.3}, 1000, 0};
  const auto m = noiseless_rabi_map(ch, g, t);
  EXPECT_TRUE(m.corrected);
  EXPECT_EQ(m.at(0, 0), ideal_excited_probability(0.42 * 50.0, 0.3).value());
  EXPECT_NEAR(m.at(1, 0), ideal_excited_probability(0.42 * 75.0 * 1.05, 0.3), 1e-12);
  EXPECT_NEAR(m.at(2, 0), ideal_excited_probability(0.42 * 110.0, 0.3), 1e-12);
  const SweepGrid outside{{40.0}, {0.3}, 1000, 0};
  EXPECT_THROW(run_rabi_map(ch, outside, t), std::invalid_argument);
}

TEST(RunRabiMap, Validation) {
  const auto ch = channel("identity");
  EXPECT_THROW(run_rabi_map(ch, SweepGrid{{}, {0.0}, 10, 0}), std::invalid_argument);
  EXPECT_THROW(run_rabi_map(ch, SweepGrid{{1.0, 1.0}, {0.0}, 10, 0}), std::invalid_argument);
  EXPECT_THROW(run_rabi_map(ch, SweepGrid{{1.0}, {-0.1}, 10, 0}), std::invalid_argument);
  EXPECT_THROW(run_rabi_map(ch, SweepGrid{{1.0}, {0.0}, 0, 0}), std::invalid_argument);
  EXPECT_THROW(run_rabi_map(channel("identity", kInf, 0.42, 0.0), SweepGrid{{1.0}, {0.0}, 1, 0}),
               std::invalid_argument);
}

TEST(AmplitudeSweep, Examples) {
  EXPECT_EQ(run_amplitude_sweep(channel("identity"), {0.0}, 0.4, 1000000, 3).at(0, 0), 0.0);
  // Omega * tau = pi at 0.4 us.
  const auto ch = channel("identity", kInf, kPi / 0.4 / 100.0);
  EXPECT_GE(run_amplitude_sweep(ch, {100.0}, 0.4, 1000, 3).at(0, 0), 0.99);
  EXPECT_NEAR(noiseless_rabi_map(ch, SweepGrid{{100.0}, {0.4}, 1000, 0}).at(0, 0), 1.0, 1e-15);
  EXPECT_THROW(run_amplitude_sweep(ch, {1.0}, 0.0, 10, 0), std::invalid_argument);
}

TEST(AmplitudeSweep, PaperLikeDeviationPeaksNear130) {
  const auto amps = arithmetic_axis(0.0, 200.0, 0.1);
  const SweepGrid g{amps, {0.4}, 1000, 0};
  const auto pl = noiseless_rabi_map(channel("paper_like", 59.5), g);
  const auto id = noiseless_rabi_map(channel("identity", 59.5), g);
  double best = -1.0, at = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double d = std::abs(pl.at(i, 0) - id.at(i, 0));
    if (d > best) {
      best = d;
      at = amps[i];
    }
  }
  EXPECT_LE(std::abs(at - 130.0), 5.0) << "peak at " << at;
}
