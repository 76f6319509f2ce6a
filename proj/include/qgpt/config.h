#pragma once

// Aggregate run configuration read from one JSON file. Every section is
// optional; missing keys keep their defaults.
//
//   {"seed": 7, "runs": 10,
//    "terrains": ["uphill_slope", ...], "variants": ["auto", "auto_lss", ...],
//    "sim": {...}, "reward": {...}, "lss": {...},
//    "terrain_specs": {"uphill_slope": {"slope": -0.15, ...}},
//    "manual_params": "manual_params.json" | {...},
//    "transcript": "transcripts/benchmark.jsonl",
//    "task": {"mapping": {...}, "costs": {...}, "cost_domain": "binary"}}

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgpt/lss.h"
#include "qgpt/reward.h"
#include "qgpt/surrogate.h"
#include "qgpt/task.h"
#include "qgpt/terrain.h"

namespace qgpt {

struct AppConfig {
  std::uint64_t seed = 0;
  int runs = 10;
  std::vector<TerrainKind> terrains;
  std::vector<MethodVariant> variants;
  SimConfig sim;
  RewardConfig reward;
  LssOptions lss;
  std::map<TerrainKind, TerrainSpec> terrain_specs;
  std::map<TerrainKind, BehaviorParams> manual_params;
  std::string transcript;  // empty: bundled benchmark transcript
  TaskOptions task;

  // Paths inside the file are resolved against `base_dir`.
  static AppConfig FromJson(const nlohmann::json& j, const std::string& base_dir = ".");
  static AppConfig Load(const std::string& path);
  // Defaults with the bundled manual parameters and transcript.
  static AppConfig Defaults();
};

// Every terrain, and the three automatic variants compared by default.
std::vector<TerrainKind> DefaultTerrains();
std::vector<MethodVariant> DefaultVariants();

// Comma-separated names; throws ConfigError listing the valid names.
std::vector<TerrainKind> ParseTerrainList(const std::string& csv);
std::vector<MethodVariant> ParseVariantList(const std::string& csv);

}  // namespace qgpt
