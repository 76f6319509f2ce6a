#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "qgpt/random.h"
#include "qgpt/reward.h"

namespace qgpt {
namespace {

const double kE1 = std::exp(-1.0);

TEST(VelocityXy, ClosedForms) {
  RewardConfig cfg;
  StepSample s;
  s.vx = 1.0;
  EXPECT_DOUBLE_EQ(VelocityXyReward(s, kBenchmarkCommand, cfg), 1.0);
  s.vx = 0.5;
  EXPECT_NEAR(VelocityXyReward(s, kBenchmarkCommand, cfg), kE1, 1e-12);
  s.vx = 1.0;
  s.vy = 0.5;
  EXPECT_NEAR(VelocityXyReward(s, kBenchmarkCommand, cfg), kE1, 1e-12);
}

TEST(VelocityYaw, ClosedForms) {
  RewardConfig cfg;
  StepSample s;
  EXPECT_DOUBLE_EQ(VelocityYawReward(s, kBenchmarkCommand, cfg), 1.0);
  s.wz = 0.5;
  EXPECT_NEAR(VelocityYawReward(s, kBenchmarkCommand, cfg), kE1, 1e-12);
  s.wz = -0.5;
  EXPECT_NEAR(VelocityYawReward(s, kBenchmarkCommand, cfg), kE1, 1e-12);
}

TEST(SwingForce, Examples) {
  RewardConfig cfg;
  StepSample s;
  s.phase = 0.75;
  EXPECT_DOUBLE_EQ(SwingForceReward(s, OffsetsOf(GaitPreset::kPronking), cfg), 4.0);
  s.phase = 0.25;
  s.foot_force = {80, 80, 80, 80};
  EXPECT_DOUBLE_EQ(SwingForceReward(s, OffsetsOf(GaitPreset::kPronking), cfg), 0.0);
  // Trotting at 0.25: FL and RR swing.
  s.foot_force = {500, 10, 0, 500};
  EXPECT_NEAR(SwingForceReward(s, OffsetsOf(GaitPreset::kTrotting), cfg), kE1 + 1.0, 1e-12);
}

TEST(StanceVelocity, Examples) {
  RewardConfig cfg;
  StepSample s;
  s.phase = 0.25;
  EXPECT_DOUBLE_EQ(StanceVelocityReward(s, OffsetsOf(GaitPreset::kPronking), cfg), 4.0);
  s.phase = 0.75;
  EXPECT_DOUBLE_EQ(StanceVelocityReward(s, OffsetsOf(GaitPreset::kPronking), cfg), 0.0);
  // Trotting at 0.25: FR and RL stance.
  s.phase = 0.25;
  s.foot_speed = {0.5, 3.0, 3.0, 0.0};
  EXPECT_NEAR(StanceVelocityReward(s, OffsetsOf(GaitPreset::kTrotting), cfg), kE1 + 1.0,
              1e-12);
}

TEST(StanceVelocity, LiteralTableMultiplierSelectsSwingFeet) {
  RewardConfig cfg;
  cfg.stance_uses_swing_mask = true;
  StepSample s;
  s.phase = 0.25;
  s.foot_speed = {3.0, 0.5, 0.0, 3.0};
  EXPECT_NEAR(StanceVelocityReward(s, OffsetsOf(GaitPreset::kTrotting), cfg), kE1 + 1.0,
              1e-12);
}

TEST(PhaseTerms, PartitionFeet) {
  // With zero forces and speeds every foot scores 1 in exactly one term.
  RewardConfig cfg;
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    GaitOffsets g{rng.Uniform(), rng.Uniform(), rng.Uniform()};
    StepSample s;
    s.phase = rng.Uniform();
    EXPECT_DOUBLE_EQ(SwingForceReward(s, g, cfg) + StanceVelocityReward(s, g, cfg), 4.0);
  }
}

TEST(PhaseTerms, Monotone) {
  RewardConfig cfg;
  const auto trot = OffsetsOf(GaitPreset::kTrotting);
  StepSample s;
  s.phase = 0.25;
  double prev_force = SwingForceReward(s, trot, cfg);
  double prev_speed = StanceVelocityReward(s, trot, cfg);
  for (int k = 1; k <= 20; ++k) {
    s.foot_force[1] = k * 2.0;
    s.foot_speed[0] = k * 0.1;
    const double f = SwingForceReward(s, trot, cfg);
    const double v = StanceVelocityReward(s, trot, cfg);
    EXPECT_LE(f, prev_force);
    EXPECT_LE(v, prev_speed);
    prev_force = f;
    prev_speed = v;
  }
}

TEST(VelocityXy, StrictlyDecreasingInError) {
  RewardConfig cfg;
  StepSample s;
  double prev = 2.0;
  for (int k = 0; k <= 20; ++k) {
    s.vx = 1.0 - 0.05 * k;
    const double r = VelocityXyReward(s, kBenchmarkCommand, cfg);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

std::vector<StepSample> PerfectEpisode(const GaitOffsets& gait, int steps, double f) {
  std::vector<StepSample> out;
  double phase = 0.0;
  for (int i = 0; i < steps; ++i) {
    StepSample s;
    s.vx = 1.0;
    s.phase = phase;
    const auto contact = DesiredContact(gait, phase);
    for (int k = 0; k < 4; ++k) s.foot_force[k] = contact[k] ? 36.75 : 0.0;
    out.push_back(s);
    phase = std::fmod(phase + f * 0.02, 1.0);
  }
  return out;
}

TEST(EpisodePercent, PerfectEpisodeIsExactlyHundred) {
  RewardConfig cfg;
  for (GaitPreset g : kAllGaits) {
    const auto ep = PerfectEpisode(OffsetsOf(g), 250, 3.0);
    const auto r = EpisodePercent(ep, kBenchmarkCommand, OffsetsOf(g), cfg);
    EXPECT_EQ(r.velocity_xy, 100.0);
    EXPECT_EQ(r.velocity_yaw, 100.0);
    EXPECT_EQ(r.swing_force, 100.0);
    EXPECT_EQ(r.stance_velocity, 100.0);
  }
}

TEST(EpisodePercent, ConstantHalfSpeed) {
  RewardConfig cfg;
  auto ep = PerfectEpisode(OffsetsOf(GaitPreset::kTrotting), 250, 3.0);
  for (auto& s : ep) s.vx = 0.5;
  const auto r = EpisodePercent(ep, kBenchmarkCommand, OffsetsOf(GaitPreset::kTrotting), cfg);
  EXPECT_NEAR(r.velocity_xy, 100.0 * kE1, 1e-9);
  EXPECT_NEAR(r.velocity_xy, 36.79, 0.005);
}

TEST(EpisodePercent, InvariantUnderDuplication) {
  RewardConfig cfg;
  Rng rng(9);
  const auto g = OffsetsOf(GaitPreset::kBounding);
  std::vector<StepSample> ep;
  for (int i = 0; i < 100; ++i) {
    StepSample s;
    s.vx = rng.Uniform(0, 1);
    s.wz = rng.Uniform(-0.5, 0.5);
    s.phase = rng.Uniform();
    for (int k = 0; k < 4; ++k) {
      s.foot_force[k] = rng.Uniform(0, 30);
      s.foot_speed[k] = rng.Uniform(0, 1);
    }
    ep.push_back(s);
  }
  auto twice = ep;
  twice.insert(twice.end(), ep.begin(), ep.end());
  const auto a = EpisodePercent(ep, kBenchmarkCommand, g, cfg);
  const auto b = EpisodePercent(twice, kBenchmarkCommand, g, cfg);
  EXPECT_NEAR(a.velocity_xy, b.velocity_xy, 1e-9);
  EXPECT_NEAR(a.velocity_yaw, b.velocity_yaw, 1e-9);
  EXPECT_NEAR(a.swing_force, b.swing_force, 1e-9);
  EXPECT_NEAR(a.stance_velocity, b.stance_velocity, 1e-9);
}

TEST(EpisodePercent, FlatNormalizationCountsFourFeet) {
  RewardConfig cfg;
  cfg.flat_normalization = true;
  // Trotting: two swing feet per step, so the flat maximum halves the score.
  const auto ep = PerfectEpisode(OffsetsOf(GaitPreset::kTrotting), 10, 3.0);
  const auto r = EpisodePercent(ep, kBenchmarkCommand, OffsetsOf(GaitPreset::kTrotting), cfg);
  EXPECT_NEAR(r.swing_force, 50.0, 1e-9);
}

TEST(EpisodePercent, Rejections) {
  RewardConfig cfg;
  EXPECT_THROW(EpisodePercent({}, kBenchmarkCommand, OffsetsOf(GaitPreset::kTrotting), cfg),
               std::invalid_argument);
  StepSample bad;
  bad.foot_force[0] = -1.0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  cfg.sigma_cf = 0.0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
}

TEST(RewardConfig, FromJson) {
  const auto cfg = RewardConfig::FromJson(
      {{"sigma_vxy", 0.5}, {"stance_uses_swing_mask", true}, {"weights", {{"swing_force", 0.1}}}});
  EXPECT_DOUBLE_EQ(cfg.sigma_vxy, 0.5);
  EXPECT_DOUBLE_EQ(cfg.sigma_cf, 100.0);
  EXPECT_TRUE(cfg.stance_uses_swing_mask);
  EXPECT_DOUBLE_EQ(cfg.weights.swing_force, 0.1);
  EXPECT_DOUBLE_EQ(cfg.weights.velocity_xy, 1.0);
}

TEST(CombinedReward, WeightedSum) {
  RewardConfig cfg;
  StepSample s;
  s.vx = 1.0;
  s.phase = 0.25;
  const auto trot = OffsetsOf(GaitPreset::kTrotting);
  // 1 + 1 + 0.08 * 2 swing feet + 0.08 * 2 stance feet.
  EXPECT_NEAR(CombinedReward(s, kBenchmarkCommand, trot, cfg), 2.32, 1e-12);
}

}  // namespace
}  // namespace qgpt
