#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "qgpt/random.h"
#include "qgpt/reward.h"
#include "qgpt/surrogate.h"

namespace qgpt {
namespace {

using L = Level;

SimConfig Quiet() {
  SimConfig cfg;
  cfg.noise_scale = 0.0;
  return cfg;
}

double VelocityPercent(TerrainKind k, const BehaviorParams& p, const SimConfig& cfg) {
  const auto traj = Simulate(TerrainSpec::Default(k), p, kBenchmarkCommand, cfg);
  return EpisodePercent(traj.samples, kBenchmarkCommand, p.gait, RewardConfig{}).velocity_xy;
}

TEST(IdealProfile, Table) {
  const IdealProfile up = IdealProfileFor(TerrainKind::kUphillSlope);
  EXPECT_EQ(up.levels, (std::array<L, 5>{L::kLow, L::kHigh, L::kHigh, L::kHigh, L::kMedium}));
  EXPECT_EQ(up.gait, GaitPreset::kTrotting);
  const IdealProfile down = IdealProfileFor(TerrainKind::kDownhillSlope);
  EXPECT_EQ(down.levels, (std::array<L, 5>{L::kLow, L::kLow, L::kMedium, L::kLow, L::kHigh}));
  const IdealProfile uneven = IdealProfileFor(TerrainKind::kUnevenGround);
  EXPECT_EQ(uneven.levels,
            (std::array<L, 5>{L::kLow, L::kMedium, L::kHigh, L::kMedium, L::kHigh}));
}

TEST(Efficiency, Examples) {
  const IdealProfile up = IdealProfileFor(TerrainKind::kUphillSlope);
  BehaviorParams mid = up.Midpoint();
  EXPECT_DOUBLE_EQ(Efficiency(mid, up), 1.0);

  // Body height "low" is [0.15, 0.2]; 0.25 is one width above.
  BehaviorParams off = mid;
  off.body_height = 0.25;
  EXPECT_NEAR(Efficiency(off, up), std::exp(-4.0), 1e-12);

  BehaviorParams pace = mid;
  pace.gait = OffsetsOf(GaitPreset::kPacing);
  EXPECT_DOUBLE_EQ(Efficiency(pace, up), 0.8);
}

TEST(Efficiency, FlatInsideIdealInterval) {
  const IdealProfile up = IdealProfileFor(TerrainKind::kUphillSlope);
  const LevelTable& t = DefaultLevelTable();
  BehaviorParams p = up.Midpoint();
  for (Param q : kAllParams) {
    const Interval iv = t.Range(q, up.level(q));
    for (double v : {iv.lo, iv.hi, iv.Mid()}) {
      BehaviorParams x = p;
      x.Set(q, v);
      EXPECT_DOUBLE_EQ(Efficiency(x, up), 1.0);
    }
  }
}

TEST(Simulate, IdealQuietIsPerfect) {
  for (TerrainKind k : kAllTerrains) {
    const BehaviorParams p = IdealProfileFor(k).Midpoint();
    const auto traj = Simulate(TerrainSpec::Default(k), p, kBenchmarkCommand, Quiet());
    ASSERT_EQ(traj.samples.size(), 250u);
    for (const auto& s : traj.samples) {
      EXPECT_EQ(s.vx, 1.0);
      EXPECT_EQ(s.vy, 0.0);
    }
    const auto r = EpisodePercent(traj.samples, kBenchmarkCommand, p.gait, RewardConfig{});
    EXPECT_EQ(r.velocity_xy, 100.0);
    EXPECT_GE(r.swing_force, 99.0);
    EXPECT_GE(r.stance_velocity, 99.0);
  }
}

TEST(Simulate, Deterministic) {
  SimConfig cfg;
  cfg.seed = 77;
  BehaviorParams p;
  const auto a = Simulate(TerrainSpec::Default(TerrainKind::kUpsideStair), p,
                          kBenchmarkCommand, cfg);
  const auto b = Simulate(TerrainSpec::Default(TerrainKind::kUpsideStair), p,
                          kBenchmarkCommand, cfg);
  EXPECT_EQ(a.ToCsv(), b.ToCsv());
  cfg.seed = 78;
  const auto c = Simulate(TerrainSpec::Default(TerrainKind::kUpsideStair), p,
                          kBenchmarkCommand, cfg);
  EXPECT_NE(a.ToCsv(), c.ToCsv());
}

TEST(Simulate, SpeedCapAndPhaseAdvance) {
  SimConfig cfg;
  cfg.noise_scale = 0.3;
  BehaviorParams p = IdealProfileFor(TerrainKind::kUphillSlope).Midpoint();
  const auto traj = Simulate(TerrainSpec::Default(TerrainKind::kUphillSlope), p,
                             CommandVector{0.6, 0.8, 0.0}, cfg);
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    EXPECT_LE(std::hypot(s.vx, s.vy), 1.0 + 1e-12);
    const double t = k * p.step_frequency * cfg.dt;
    EXPECT_NEAR(s.phase, t - std::floor(t), 1e-9);
  }
}

TEST(Simulate, OrdinalMonotonicity) {
  // Moving one parameter a level farther from the ideal never helps.
  const LevelTable& t = DefaultLevelTable();
  for (TerrainKind k : kAllTerrains) {
    const IdealProfile ideal = IdealProfileFor(k);
    for (Param q : kAllParams) {
      const int il = static_cast<int>(ideal.level(q));
      for (int dir : {-1, 1}) {
        double prev = VelocityPercent(k, ideal.Midpoint(), Quiet());
        for (int l = il + dir; l >= 0 && l < kNumLevels; l += dir) {
          BehaviorParams p = ideal.Midpoint();
          p.Set(q, t.Range(q, static_cast<Level>(l)).Mid());
          const double v = VelocityPercent(k, p, Quiet());
          EXPECT_LE(v, prev) << TerrainName(k) << " " << ParamName(q) << " level " << l;
          EXPECT_LT(v, 100.0);
          prev = v;
        }
      }
    }
  }
}

TEST(Simulate, RejectsOutOfRangeParams) {
  BehaviorParams p;
  p.body_height = 0.6;
  EXPECT_THROW(Simulate(TerrainSpec::Default(TerrainKind::kUphillSlope), p, kBenchmarkCommand,
                        Quiet()),
               std::invalid_argument);
  SimConfig bad;
  bad.steps = 0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = SimConfig{};
  bad.noise_scale = -1;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(Trajectory, CsvLayout) {
  SimConfig cfg = Quiet();
  cfg.steps = 3;
  const auto traj = Simulate(TerrainSpec::Default(TerrainKind::kUphillSlope), BehaviorParams{},
                             kBenchmarkCommand, cfg);
  const std::string csv = traj.ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "step,v_x,v_y,w_z,f_FR,f_FL,f_RR,f_RL,s_FR,s_FL,s_RR,s_RL,phase");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(SimConfig, FromJson) {
  const auto cfg = SimConfig::FromJson({{"steps", 100}, {"noise_scale", 0.0}, {"model", {{"rho", 1.0}}}});
  EXPECT_EQ(cfg.steps, 100);
  EXPECT_DOUBLE_EQ(cfg.noise_scale, 0.0);
  EXPECT_DOUBLE_EQ(cfg.model.rho, 1.0);
  EXPECT_DOUBLE_EQ(cfg.dt, 0.02);
}

}  // namespace
}  // namespace qgpt
