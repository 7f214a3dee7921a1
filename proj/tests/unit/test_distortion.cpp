#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rabical/distortion.hpp"

using namespace rabical;

TEST(ApplyDistortion, Examples) {
  EXPECT_EQ(apply_distortion(preset_profile("identity"), 130.0), 130.0);
  EXPECT_EQ(apply_distortion(preset_profile("paper_like"), 0.0), 0.0);
  EXPECT_EQ(apply_distortion(preset_profile("identity"), 0.0), 0.0);
  // Neighbouring features contribute below 1e-3 mV at the 130 mV center.
  const auto p = preset_profile("paper_like");
  EXPECT_NEAR(apply_distortion(p, 130.0), 113.1, 1e-3);
  double tails = 0.0;
  for (const auto& f : p.features()) {
    if (f.center_mv != 130.0) {
      tails += f.depth * std::exp(-std::pow(130.0 - f.center_mv, 2) / (2 * f.width_mv * f.width_mv));
    }
  }
  EXPECT_NEAR(apply_distortion(p, 130.0), 130.0 * (1.0 - 0.13 + tails), 1e-12);
}

TEST(ApplyDistortion, OutOfDomain) {
  const auto p = preset_profile("paper_like");
  EXPECT_THROW(apply_distortion(p, -0.1), std::out_of_range);
  EXPECT_THROW(apply_distortion(p, 500.1), std::out_of_range);
  EXPECT_NO_THROW(apply_distortion(p, 500.0));
}

TEST(ApplyDistortion, IdentityIsExact) {
  const auto id = DistortionProfile::identity(1000.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(0.0, 1000.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = a(rng);
    ASSERT_EQ(apply_distortion(id, x), x);
  }
}

TEST(ApplyDistortion, LipschitzContinuity) {
  for (const char* name : {"identity", "paper_like"}) {
    const auto p = preset_profile(name);
    const double L = p.lipschitz_bound();
    const double delta = 1e-3;
    for (double a = 0.0; a + delta <= p.max_amplitude_mv(); a += 0.05) {
      ASSERT_LE(std::abs(apply_distortion(p, a + delta) - apply_distortion(p, a)),
                L * delta * (1 + 1e-9))
          << name << " at " << a;
    }
  }
}

TEST(ApplyDistortion, LipschitzBoundFromParameters) {
  // b * (1 + sum |d| (1 + Amax e^{-1/2} / w))
  const DistortionProfile p(1.1, {{100.0, 10.0, -0.2}}, 300.0);
  EXPECT_NEAR(p.lipschitz_bound(), 1.1 * (1 + 0.2 * (1 + 300.0 * std::exp(-0.5) / 10.0)),
              1e-12);
}

TEST(PaperLike, PeakDeviationAt130) {
  const auto p = preset_profile("paper_like");
  double best = -1.0, at = 0.0;
  for (int i = 0; i <= 500000; ++i) {
    const double a = i * 1e-3;
    const double d = std::abs(p.gain(a) - 1.0);
    if (d > best) {
      best = d;
      at = a;
    }
  }
  EXPECT_LE(std::abs(at - 130.0), 1.0);
}

TEST(PaperLike, ShallowFeatureBelowScopeFloor) {
  const auto p = preset_profile("paper_like");
  EXPECT_LT(std::abs(apply_distortion(p, 65.0) - 65.0), 2.0);
}

TEST(Presets, Names) {
  const auto p = preset_profile("paper_like");
  ASSERT_EQ(p.features().size(), 3u);
  EXPECT_EQ(p.features()[0].center_mv, 65.0);
  EXPECT_EQ(p.features()[1].center_mv, 130.0);
  EXPECT_EQ(p.features()[2].center_mv, 250.0);
  const auto id = preset_profile("identity");
  for (double a = 0.0; a <= id.max_amplitude_mv(); a += 0.5) EXPECT_EQ(id.gain(a), 1.0);
  try {
    preset_profile("bogus");
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("identity"), std::string::npos);
    EXPECT_NE(msg.find("paper_like"), std::string::npos);
  }
}

TEST(Profile, RejectsNonPositiveGain) {
  EXPECT_THROW(DistortionProfile(1.0, {{100.0, 5.0, -1.2}}, 500.0), std::invalid_argument);
  EXPECT_THROW(DistortionProfile(0.0, {}, 500.0), std::invalid_argument);
  EXPECT_THROW(DistortionProfile(1.0, {{100.0, 0.0, -0.1}}, 500.0), std::invalid_argument);
  EXPECT_THROW(DistortionProfile(1.0, {{NAN, 1.0, -0.1}}, 500.0), std::invalid_argument);
  // The two dips overlap, but their sum stays above -1 on the domain.
  EXPECT_NO_THROW(DistortionProfile(1.0, {{100.0, 5.0, -0.6}, {140.0, 5.0, -0.6}}, 500.0));
  EXPECT_THROW(DistortionProfile(1.0, {{100.0, 5.0, -0.6}, {101.0, 5.0, -0.6}}, 500.0),
               std::invalid_argument);
}

TEST(Profile, JsonRoundTrip) {
  const auto p = preset_profile("paper_like");
  const nlohmann::json j = p;
  EXPECT_EQ(j.get<DistortionProfile>(), p);
  EXPECT_EQ(nlohmann::json::parse(j.dump()).get<DistortionProfile>(), p);
}

TEST(ScopeMeasure, Examples) {
  EXPECT_EQ(scope_measure(113.1, 0.0, 5), 113.1);
  EXPECT_EQ(scope_measure(0.0, 0.0, 123), 0.0);
  const double m = scope_measure(65.0, 2.0, 7);
  EXPECT_LE(std::abs(m - 65.0), 8.0);
  // Pinned for boost normal_distribution over mt19937_64.
  EXPECT_DOUBLE_EQ(m, 61.821060293349731);
}

TEST(ScopeMeasure, NoiseStatistics) {
  constexpr int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = scope_measure(100.0, 2.0, static_cast<std::uint64_t>(i)) - 100.0;
    s += d;
    s2 += d * d;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  EXPECT_LT(std::abs(mean), 3.0 * 2.0 / std::sqrt(n));
  EXPECT_NEAR(sd, 2.0, 0.05);
}
