#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rabical/simcore.hpp"

using namespace rabical;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

SimulatedQubit qubit_with_t1(double t1) { return {"test", 4.0, t1, 0.42}; }

}  // namespace

TEST(IdealProbability, Examples) {
  EXPECT_DOUBLE_EQ(ideal_excited_probability(0.0, 5.0), 0.0);
  EXPECT_NEAR(ideal_excited_probability(kPi, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(ideal_excited_probability(kPi / 2, 1.0), 0.5, 1e-15);
}

TEST(IdealProbability, BoundedOverRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> omega(0.0, 500.0), tau(0.0, 100.0);
  for (int i = 0; i < 100000; ++i) {
    const double p = ideal_excited_probability(omega(rng), tau(rng));
    ASSERT_GE(p, 0.0);
    ASSERT_LE(p, 1.0);
  }
}

TEST(IdealProbability, PeriodicInDuration) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> omega(0.1, 50.0), tau(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double w = omega(rng), t = tau(rng);
    EXPECT_NEAR(ideal_excited_probability(w, t),
                ideal_excited_probability(w, t + 2 * kPi / w), 1e-9);
  }
}

TEST(DecayedProbability, Examples) {
  EXPECT_DOUBLE_EQ(decayed_excited_probability(kPi, 0.0, qubit_with_t1(59.5)), 0.0);
  EXPECT_DOUBLE_EQ(decayed_excited_probability(kPi, 0.0, qubit_with_t1(17.4)), 0.0);
  EXPECT_NEAR(decayed_excited_probability(kPi, 1.0, qubit_with_t1(kInf)), 1.0, 1e-15);
  // tau = tau_d = 119 us: envelope e^-1, cos(2 pi * 119) = 1.
  const double expected = 0.5 * (1.0 - std::exp(-1.0));
  EXPECT_NEAR(decayed_excited_probability(2 * kPi, 119.0, qubit_with_t1(59.5)), expected,
              1e-12);
  EXPECT_NEAR(expected, 0.316060279, 1e-9);
}

TEST(DecayedProbability, ApproachesIdealForLongT1) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> omega(0.0, 200.0), tau(0.0, 2.0);
  const auto q = qubit_with_t1(1e9);
  for (int i = 0; i < 10000; ++i) {
    const double w = omega(rng), t = tau(rng);
    ASSERT_NEAR(decayed_excited_probability(w, t, q), ideal_excited_probability(w, t), 1e-6);
  }
}

TEST(DecayedProbability, DecayTimeIsTwiceT1) {
  EXPECT_DOUBLE_EQ(decay_time_us(qubit_with_t1(59.5)), 119.0);
  EXPECT_TRUE(std::isinf(decay_time_us(qubit_with_t1(kInf))));
}

TEST(Probability, RejectsOutOfRange) {
  EXPECT_THROW(Probability(-1e-9), std::out_of_range);
  EXPECT_THROW(Probability(1.0 + 1e-9), std::out_of_range);
  EXPECT_THROW(Probability(std::nan("")), std::out_of_range);
  EXPECT_NO_THROW(Probability(0.0));
  EXPECT_NO_THROW(Probability(1.0));
}

TEST(SampleShots, DegenerateProbabilities) {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xffffffffffffffffULL}) {
    EXPECT_EQ(sample_shots(Probability(0.0), 1000, seed).value(), 0.0);
    EXPECT_EQ(sample_shots(Probability(1.0), 1000, seed).value(), 1.0);
  }
}

TEST(SampleShots, GoldenValue) {
  const double p = sample_shots(Probability(0.5), 1000, 42);
  EXPECT_GE(p, 0.45);
  EXPECT_LE(p, 0.55);
  // Pinned for boost binomial over mt19937_64 seeded through splitmix64.
  EXPECT_EQ(p, 0.487);
}

TEST(SampleShots, PureInSeed) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    EXPECT_EQ(sample_shots(Probability(0.37), 500, s), sample_shots(Probability(0.37), 500, s));
  }
}

TEST(SampleShots, ResultIsMultipleOfOneOverN) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const double k = sample_shots(Probability(0.61), 77, s) * 77.0;
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
}

TEST(SampleShots, UnbiasedOverSeeds) {
  constexpr int kSeeds = 10000;
  double sum = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    sum += sample_shots(Probability(0.3), 100, derive_seed(99, {static_cast<std::uint64_t>(s)}));
  }
  const double mean = sum / kSeeds;
  EXPECT_LT(std::abs(mean - 0.3), 3.0 * std::sqrt(0.3 * 0.7 / (100.0 * kSeeds)));
}

TEST(SampleShots, ZeroShotsRejected) {
  EXPECT_THROW(sample_shots(Probability(0.5), 0, 1), std::invalid_argument);
}

TEST(DeriveSeed, DistinguishesKeysAndOrder) {
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
  EXPECT_EQ(derive_seed(5, {6, 7}), derive_seed(5, {6, 7}));
  EXPECT_EQ(seed_key(0.0), seed_key(-0.0));
}

TEST(Presets, ReferenceDeviceTable) {
  const auto q1 = qubit_preset("qubit1");
  EXPECT_DOUBLE_EQ(q1.transition_freq_ghz, 4.09947);
  EXPECT_DOUBLE_EQ(q1.t1_us, 59.5);
  const auto q2 = qubit_preset("qubit2");
  EXPECT_DOUBLE_EQ(q2.transition_freq_ghz, 4.80655);
  EXPECT_DOUBLE_EQ(q2.t1_us, 17.4);
  EXPECT_DOUBLE_EQ(kReadoutModeGhz, 7.07340);
  try {
    qubit_preset("qubit3");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("qubit1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("qubit2"), std::string::npos);
  }
}

TEST(Qubit, Validation) {
  EXPECT_THROW(qubit_with_t1(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(qubit_with_t1(-1.0).validate(), std::invalid_argument);
  EXPECT_NO_THROW(qubit_with_t1(kInf).validate());
  SimulatedQubit q = qubit_with_t1(10.0);
  q.rabi_rate_per_mv = 0.0;
  EXPECT_THROW(q.validate(), std::invalid_argument);
}
