#pragma once

// Structured-output parsing of model replies: ordinal level answers,
// numeric parameter sets, and JSON cost assignments. All parsers throw
// ParseError with a message naming the offending item.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgpt/locomotion.h"

namespace qgpt {

// Answers A1..A6 of the level prompt: body height, step frequency, swing
// height, body pitch, stance width, gait.
struct LevelAnswers {
  std::array<Level, kNumContinuousParams> levels{};  // indexed by Param
  GaitPreset gait = GaitPreset::kTrotting;

  Level level(Param p) const { return levels[static_cast<std::size_t>(p)]; }
  bool operator==(const LevelAnswers&) const = default;
};

// Case-insensitive "A<k>: <answer>" extraction; when an index repeats, the
// last occurrence wins (replies sometimes echo the in-context example).
LevelAnswers ParseLevels(std::string_view text);

struct NumericParse {
  BehaviorParams params;
  std::vector<std::string> warnings;  // one per clamped value
};

// Labelled numbers ("body height: 0.25", ...) plus a gait name; values are
// clamped into the global ranges of `table`.
NumericParse ParseNumericParams(std::string_view text,
                                const LevelTable& table = DefaultLevelTable());

// Answers of the numeric-option prompt: "A<k>: <number>" for k = 1..5.
std::array<double, kNumContinuousParams> ParseNumericAnswers(std::string_view text);

enum class CostDomain {
  kBinary,      // cost in {0, 1}, as in the cost prompt schema
  kContinuous,  // cost in [0, 1]
};

struct TerrainCost {
  std::string type;
  double cost = 0.0;
  int gait = 0;  // 1 = raised-leg gait required
};

struct CostAssignment {
  std::string target_object;
  std::vector<std::string> obstacles;
  std::vector<TerrainCost> terrain;

  const TerrainCost* FindTerrain(std::string_view type) const;
  bool IsObstacle(std::string_view category) const;
};

// First balanced {...} (or [...] for '[') in `text`, honouring JSON string
// literals. Returns nullopt when none is found.
std::optional<std::string> ExtractBalanced(std::string_view text, char open = '{');

CostAssignment ParseCostJson(std::string_view text,
                             CostDomain domain = CostDomain::kBinary);

}  // namespace qgpt
