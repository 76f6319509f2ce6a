#pragma once

// Velocity-tracking and gait-phase-tracking reward terms and their
// episode-level aggregation into percent-of-maximum scores.

#include <span>
#include <string>

#include <json.hpp>

#include "qgpt/locomotion.h"

namespace qgpt {

struct StepSample {
  double vx = 0.0;  // achieved planar body velocity, m/s
  double vy = 0.0;
  double wz = 0.0;  // achieved yaw rate, rad/s
  PerFoot<double> foot_force{};  // |f| per foot, N
  PerFoot<double> foot_speed{};  // planar foot speed, m/s
  double phase = 0.0;            // gait cycle fraction

  void Validate() const;
};

struct RewardWeights {
  double velocity_xy = 1.0;
  double velocity_yaw = 1.0;
  double swing_force = 0.08;
  double stance_velocity = 0.08;
};

struct RewardConfig {
  double sigma_vxy = 0.25;  // (m/s)^2
  double sigma_wz = 0.25;   // (rad/s)^2
  double sigma_cf = 100.0;  // N^2
  double sigma_cv = 0.25;   // (m/s)^2
  RewardWeights weights;
  double duty_factor = kDefaultDutyFactor;
  // Apply the swing mask [1 - C] to the stance-velocity term as well.
  bool stance_uses_swing_mask = false;
  // Normalize phase terms by 4 feet per step instead of the realized count
  // of selected feet.
  bool flat_normalization = false;

  void Validate() const;
  static RewardConfig FromJson(const nlohmann::json& j);
};

double VelocityXyReward(const StepSample& s, const CommandVector& cmd,
                        const RewardConfig& cfg);
double VelocityYawReward(const StepSample& s, const CommandVector& cmd,
                         const RewardConfig& cfg);
// Sum over feet commanded to swing of exp(-|f|^2 / sigma_cf).
double SwingForceReward(const StepSample& s, const GaitOffsets& gait,
                        const RewardConfig& cfg);
// Sum over feet commanded to stance of exp(-|v_foot|^2 / sigma_cv).
double StanceVelocityReward(const StepSample& s, const GaitOffsets& gait,
                            const RewardConfig& cfg);

// Weighted single-step scalar, for training-style use.
double CombinedReward(const StepSample& s, const CommandVector& cmd,
                      const GaitOffsets& gait, const RewardConfig& cfg);

struct EpisodeReport {
  double velocity_xy = 0.0;  // percent of maximum
  double velocity_yaw = 0.0;
  double swing_force = 0.0;
  double stance_velocity = 0.0;
};

// Percent of maximum episodic reward per term. Throws on an empty episode.
// A phase term whose selected-foot count is zero for the entire episode is
// reported as 100.
EpisodeReport EpisodePercent(std::span<const StepSample> samples,
                             const CommandVector& cmd, const GaitOffsets& gait,
                             const RewardConfig& cfg);

}  // namespace qgpt
