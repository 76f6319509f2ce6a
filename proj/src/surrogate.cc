#include "qgpt/surrogate.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qgpt/random.h"

namespace qgpt {

BehaviorParams IdealProfile::Midpoint(const LevelTable& table) const {
  BehaviorParams p;
  for (Param k : kAllParams) p.Set(k, table.Range(k, level(k)).Mid());
  p.gait = OffsetsOf(gait);
  return p;
}

IdealProfile IdealProfileFor(TerrainKind kind) {
  using L = Level;
  using G = GaitPreset;
  // Order: body height, step frequency, swing height, pitch, stance width.
  switch (kind) {
    case TerrainKind::kUphillSlope:
      return {{L::kLow, L::kHigh, L::kHigh, L::kHigh, L::kMedium}, G::kTrotting};
    case TerrainKind::kDownhillSlope:
      return {{L::kLow, L::kLow, L::kMedium, L::kLow, L::kHigh}, G::kTrotting};
    case TerrainKind::kUpsideStair:
      return {{L::kMedium, L::kLow, L::kVeryHigh, L::kHigh, L::kMedium}, G::kTrotting};
    case TerrainKind::kDownsideStair:
      return {{L::kLow, L::kLow, L::kHigh, L::kLow, L::kHigh}, G::kTrotting};
    case TerrainKind::kUnevenGround:
      return {{L::kLow, L::kMedium, L::kHigh, L::kMedium, L::kHigh}, G::kTrotting};
  }
  return {};
}

void SimConfig::Validate() const {
  if (steps < 1) throw std::invalid_argument("simulation needs at least one step");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("noise scale must be >= 0");
}

SimConfig SimConfig::FromJson(const nlohmann::json& j) {
  SimConfig cfg;
  cfg.steps = j.value("steps", cfg.steps);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.noise_scale = j.value("noise_scale", cfg.noise_scale);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("model")) {
    const auto& m = j.at("model");
    cfg.model.rho = m.value("rho", cfg.model.rho);
    cfg.model.gait_mismatch = m.value("gait_mismatch", cfg.model.gait_mismatch);
    cfg.model.body_weight = m.value("body_weight", cfg.model.body_weight);
    cfg.model.spurious_force = m.value("spurious_force", cfg.model.spurious_force);
    cfg.model.max_slip = m.value("max_slip", cfg.model.max_slip);
  }
  cfg.Validate();
  return cfg;
}

std::string Trajectory::ToCsv() const {
  std::ostringstream os;
  os.precision(10);
  os << "step,v_x,v_y,w_z,f_FR,f_FL,f_RR,f_RL,s_FR,s_FL,s_RR,s_RL,phase\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const StepSample& s = samples[k];
    os << k << ',' << s.vx << ',' << s.vy << ',' << s.wz;
    for (double f : s.foot_force) os << ',' << f;
    for (double v : s.foot_speed) os << ',' << v;
    os << ',' << s.phase << '\n';
  }
  return os.str();
}

double Efficiency(const BehaviorParams& params, const IdealProfile& ideal,
                  const LevelTable& table, const SurrogateModel& model) {
  double eff = 1.0;
  for (Param p : kAllParams) {
    const Interval& iv = table.Range(p, ideal.level(p));
    const double d = iv.Distance(params.Get(p)) / iv.Width() / model.rho;
    eff *= std::exp(-d * d);
  }
  const auto preset = PresetOf(params.gait);
  if (!preset || *preset != ideal.gait) eff *= model.gait_mismatch;
  return eff;
}

Trajectory Simulate(const TerrainSpec& terrain, const BehaviorParams& params,
                    const CommandVector& cmd, const SimConfig& cfg,
                    const LevelTable& table) {
  cfg.Validate();
  cmd.Validate();
  for (Param p : kAllParams) {
    const Interval g = table.GlobalRange(p);
    if (!(params.Get(p) >= g.lo - 1e-9 && params.Get(p) <= g.hi + 1e-9)) {
      throw std::invalid_argument("behavior parameter " + std::string(ParamName(p)) +
                                  " outside its global range");
    }
  }
  params.gait.Validate();

  Trajectory traj;
  traj.terrain = std::string(TerrainName(terrain.kind));
  traj.params = params;
  traj.command = cmd;
  traj.seed = cfg.seed;
  traj.efficiency = Efficiency(params, IdealProfileFor(terrain.kind), table, cfg.model);
  traj.samples.reserve(static_cast<std::size_t>(cfg.steps));

  const double eff = traj.efficiency;
  const SurrogateModel& m = cfg.model;
  Rng rng(DeriveSeed(cfg.seed, "surrogate/" + traj.terrain));
  const double phase_step = params.step_frequency * cfg.dt;

  for (int k = 0; k < cfg.steps; ++k) {
    StepSample s;
    const double noise_v = cfg.noise_scale * rng.Normal();
    const double noise_w = cfg.noise_scale * rng.Normal();
    // Achieved speed never exceeds the command.
    const double scale = std::clamp(eff + noise_v, 0.0, 1.0);
    s.vx = cmd.vx * scale;
    s.vy = cmd.vy * scale;
    s.wz = cmd.wz * eff + noise_w;

    const double t = static_cast<double>(k) * phase_step;
    s.phase = t - std::floor(t);
    const PerFoot<bool> stance = DesiredContact(params.gait, s.phase);
    int n_stance = 0;
    for (bool b : stance) n_stance += b ? 1 : 0;
    const double body_speed = std::hypot(s.vx, s.vy);
    for (int i = 0; i < kNumFeet; ++i) {
      if (stance[i]) {
        s.foot_force[i] = m.body_weight / n_stance;
        s.foot_speed[i] = m.max_slip * (1.0 - eff);
      } else {
        s.foot_force[i] = m.spurious_force * (1.0 - eff);
        s.foot_speed[i] = 2.0 * body_speed;
      }
    }
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace qgpt
