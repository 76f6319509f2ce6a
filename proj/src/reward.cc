#include "qgpt/reward.h"

#include <cmath>
#include <stdexcept>

namespace qgpt {

namespace {

// Multiplier selection per foot: swing term always selects commanded-swing
// feet; stance term selects commanded-stance feet unless stance_uses_swing_mask.
PerFoot<bool> SwingSelected(const StepSample& s, const GaitOffsets& gait,
                            const RewardConfig& cfg) {
  const PerFoot<bool> stance = DesiredContact(gait, s.phase, cfg.duty_factor);
  PerFoot<bool> out;
  for (int i = 0; i < kNumFeet; ++i) out[i] = !stance[i];
  return out;
}

PerFoot<bool> StanceSelected(const StepSample& s, const GaitOffsets& gait,
                             const RewardConfig& cfg) {
  if (cfg.stance_uses_swing_mask) return SwingSelected(s, gait, cfg);
  return DesiredContact(gait, s.phase, cfg.duty_factor);
}

int Count(const PerFoot<bool>& selected) {
  int n = 0;
  for (bool b : selected) n += b ? 1 : 0;
  return n;
}

double Percent(double sum, double max_sum) {
  return max_sum > 0.0 ? 100.0 * sum / max_sum : 100.0;
}

}  // namespace

void StepSample::Validate() const {
  for (int i = 0; i < kNumFeet; ++i) {
    if (!(foot_force[i] >= 0.0) || !(foot_speed[i] >= 0.0)) {
      throw std::invalid_argument("foot forces and speeds must be non-negative");
    }
  }
  if (!std::isfinite(vx) || !std::isfinite(vy) || !std::isfinite(wz)) {
    throw std::invalid_argument("non-finite body velocity in step sample");
  }
}

void RewardConfig::Validate() const {
  if (!(sigma_vxy > 0) || !(sigma_wz > 0) || !(sigma_cf > 0) || !(sigma_cv > 0)) {
    throw std::invalid_argument("reward sigmas must be strictly positive");
  }
  if (!(duty_factor > 0.0 && duty_factor < 1.0)) {
    throw std::invalid_argument("duty factor must lie in (0, 1)");
  }
}

RewardConfig RewardConfig::FromJson(const nlohmann::json& j) {
  RewardConfig cfg;
  cfg.sigma_vxy = j.value("sigma_vxy", cfg.sigma_vxy);
  cfg.sigma_wz = j.value("sigma_wz", cfg.sigma_wz);
  cfg.sigma_cf = j.value("sigma_cf", cfg.sigma_cf);
  cfg.sigma_cv = j.value("sigma_cv", cfg.sigma_cv);
  cfg.duty_factor = j.value("duty_factor", cfg.duty_factor);
  cfg.stance_uses_swing_mask = j.value("stance_uses_swing_mask", cfg.stance_uses_swing_mask);
  cfg.flat_normalization = j.value("flat_normalization", cfg.flat_normalization);
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    cfg.weights.velocity_xy = w.value("velocity_xy", cfg.weights.velocity_xy);
    cfg.weights.velocity_yaw = w.value("velocity_yaw", cfg.weights.velocity_yaw);
    cfg.weights.swing_force = w.value("swing_force", cfg.weights.swing_force);
    cfg.weights.stance_velocity =
        w.value("stance_velocity", cfg.weights.stance_velocity);
  }
  cfg.Validate();
  return cfg;
}

double VelocityXyReward(const StepSample& s, const CommandVector& cmd,
                        const RewardConfig& cfg) {
  const double dx = s.vx - cmd.vx;
  const double dy = s.vy - cmd.vy;
  return std::exp(-(dx * dx + dy * dy) / cfg.sigma_vxy);
}

double VelocityYawReward(const StepSample& s, const CommandVector& cmd,
                         const RewardConfig& cfg) {
  const double d = s.wz - cmd.wz;
  return std::exp(-(d * d) / cfg.sigma_wz);
}

double SwingForceReward(const StepSample& s, const GaitOffsets& gait,
                        const RewardConfig& cfg) {
  const PerFoot<bool> selected = SwingSelected(s, gait, cfg);
  double sum = 0.0;
  for (int i = 0; i < kNumFeet; ++i) {
    if (selected[i]) {
      sum += std::exp(-(s.foot_force[i] * s.foot_force[i]) / cfg.sigma_cf);
    }
  }
  return sum;
}

double StanceVelocityReward(const StepSample& s, const GaitOffsets& gait,
                            const RewardConfig& cfg) {
  const PerFoot<bool> selected = StanceSelected(s, gait, cfg);
  double sum = 0.0;
  for (int i = 0; i < kNumFeet; ++i) {
    if (selected[i]) {
      sum += std::exp(-(s.foot_speed[i] * s.foot_speed[i]) / cfg.sigma_cv);
    }
  }
  return sum;
}

double CombinedReward(const StepSample& s, const CommandVector& cmd,
                      const GaitOffsets& gait, const RewardConfig& cfg) {
  const RewardWeights& w = cfg.weights;
  return w.velocity_xy * VelocityXyReward(s, cmd, cfg) +
         w.velocity_yaw * VelocityYawReward(s, cmd, cfg) +
         w.swing_force * SwingForceReward(s, gait, cfg) +
         w.stance_velocity * StanceVelocityReward(s, gait, cfg);
}

EpisodeReport EpisodePercent(std::span<const StepSample> samples,
                             const CommandVector& cmd, const GaitOffsets& gait,
                             const RewardConfig& cfg) {
  if (samples.empty()) {
    throw std::invalid_argument("episode must contain at least one step");
  }
  double vxy = 0, wz = 0, cf = 0, cv = 0;
  double cf_max = 0, cv_max = 0;
  for (const StepSample& s : samples) {
    vxy += VelocityXyReward(s, cmd, cfg);
    wz += VelocityYawReward(s, cmd, cfg);
    cf += SwingForceReward(s, gait, cfg);
    cv += StanceVelocityReward(s, gait, cfg);
    if (cfg.flat_normalization) {
      cf_max += kNumFeet;
      cv_max += kNumFeet;
    } else {
      cf_max += Count(SwingSelected(s, gait, cfg));
      cv_max += Count(StanceSelected(s, gait, cfg));
    }
  }
  const double n = static_cast<double>(samples.size());
  return {Percent(vxy, n), Percent(wz, n), Percent(cf, cf_max),
          Percent(cv, cv_max)};
}

}  // namespace qgpt
