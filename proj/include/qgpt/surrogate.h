#pragma once

// Deterministic response model standing in for "trained policy + physics".
//
// Each terrain has an ideal ordinal level per continuous parameter and an
// ideal gait. A parameter set's efficiency in (0, 1] measures how close it
// sits to those ideal level intervals; the simulated trajectory degrades
// with efficiency (slower body, spurious swing forces, stance slip). Only
// the uphill row of the ideal table comes from published expert answers;
// the other rows are authored so the optimum is known.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgpt/locomotion.h"
#include "qgpt/reward.h"
#include "qgpt/terrain.h"

namespace qgpt {

struct IdealProfile {
  std::array<Level, kNumContinuousParams> levels{};  // indexed by Param
  GaitPreset gait = GaitPreset::kTrotting;

  Level level(Param p) const { return levels[static_cast<std::size_t>(p)]; }
  // Midpoint of each ideal interval with the ideal gait.
  BehaviorParams Midpoint(const LevelTable& table = DefaultLevelTable()) const;
};

IdealProfile IdealProfileFor(TerrainKind kind);

struct SurrogateModel {
  double rho = 0.5;                // decay width, in interval widths
  double gait_mismatch = 0.8;      // efficiency factor for a wrong gait
  double body_weight = 147.0;      // N, carried by stance feet
  double spurious_force = 60.0;    // N at zero efficiency, on swing feet
  double max_slip = 1.0;           // m/s at zero efficiency, on stance feet
};

struct SimConfig {
  int steps = 250;
  double dt = 0.02;           // s
  double noise_scale = 0.05;  // velocity-space noise, fraction of command
  std::uint64_t seed = 0;
  SurrogateModel model;

  void Validate() const;
  static SimConfig FromJson(const nlohmann::json& j);
};

struct Trajectory {
  std::string terrain;
  BehaviorParams params;
  CommandVector command;
  std::uint64_t seed = 0;
  double efficiency = 0.0;
  std::vector<StepSample> samples;

  // step,v_x,v_y,w_z,f_FR,f_FL,f_RR,f_RL,s_FR,s_FL,s_RR,s_RL,phase
  std::string ToCsv() const;
};

// Product over the five parameters of exp(-(d/rho)^2), where d is the
// distance from the value to the ideal interval in units of that interval's
// width, times the gait factor.
double Efficiency(const BehaviorParams& params, const IdealProfile& ideal,
                  const LevelTable& table = DefaultLevelTable(),
                  const SurrogateModel& model = {});

Trajectory Simulate(const TerrainSpec& terrain, const BehaviorParams& params,
                    const CommandVector& cmd, const SimConfig& cfg,
                    const LevelTable& table = DefaultLevelTable());

}  // namespace qgpt
