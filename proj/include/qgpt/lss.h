#pragma once

// Automatic locomotion-parameter adaptation.
//
//   Auto / AutoPrior    the model states numbers directly; three samples are
//                       averaged (gait by majority).
//   AutoLssSampling     the model locates an ordinal level per parameter
//                       (majority of three samples), the located intervals
//                       are grid-sampled and every candidate is simulated;
//                       the best velocity-tracking score wins.
//   AutoLssDetermining  the model picks one interval midpoint per parameter
//                       from numeric options; no simulation.
//   Manual              parameters read from a file.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qgpt/llm_gateway.h"
#include "qgpt/llm_parsers.h"
#include "qgpt/locomotion.h"
#include "qgpt/reward.h"
#include "qgpt/surrogate.h"
#include "qgpt/terrain.h"

namespace qgpt {

enum class MethodVariant {
  kManual = 0,
  kAuto = 1,
  kAutoPrior = 2,
  kAutoLssSampling = 3,
  kAutoLssDetermining = 4,
};

std::string_view VariantName(MethodVariant v);   // CLI spelling, "auto_lss"
std::string_view VariantLabel(MethodVariant v);  // table label, "Auto+LSS"
std::optional<MethodVariant> ParseVariant(std::string_view name);

// Per-parameter level plus gait, as located by the model.
using LevelSelection = LevelAnswers;

struct LssOptions {
  int n_candidates = 3;
  int candidate_cap = 4096;
  // Also grid-search the four gait presets (x4 candidates).
  bool grid_over_gaits = false;

  static LssOptions FromJson(const nlohmann::json& j);
};

// Everything an adaptation call needs besides its inputs. Gateway calls are
// made in a fixed order so scripted transcripts replay deterministically.
struct AdaptationContext {
  Gateway& gateway;
  const PromptLibrary& prompts;
  const LevelTable& table = DefaultLevelTable();
  LssOptions options = {};
};

// Majority of three-or-more votes; nullopt when no value has a strict
// majority.
std::optional<Level> MajorityLevel(std::span<const Level> votes);
std::optional<GaitPreset> MajorityGait(std::span<const GaitPreset> votes);
// Middle ordinal of the votes (lower median for even counts).
Level MedianLevel(std::span<const Level> votes);

// `subject` keys the transcript ("auto_lss/<subject>"). A parameter whose
// three votes all differ is re-queried once; if still split, the median of
// the re-query votes is used (trotting for gait).
LevelSelection LocateRanges(const std::string& terrain_description,
                            const std::string& subject, AdaptationContext& ctx);

// Mean of the (clamped) sampled values; gait by majority, trotting on a
// three-way split.
BehaviorParams DirectParams(const std::string& terrain_description,
                            const std::string& subject, AdaptationContext& ctx,
                            bool with_prior);

// Cartesian product of SampleGrid over each selected interval (body height
// outermost), gait fixed to the selection unless grid_over_gaits. Axes are
// thinned uniformly, endpoints kept, until the count fits the cap.
std::vector<BehaviorParams> CandidateGrid(const LevelSelection& selection,
                                          const LevelTable& table = DefaultLevelTable(),
                                          const LssOptions& options = {});

struct CandidateScore {
  BehaviorParams params;
  double velocity_percent = 0.0;
};

struct AdaptationResult {
  BehaviorParams chosen;
  std::vector<CandidateScore> candidates;  // empty for non-sampling variants
  MethodVariant variant = MethodVariant::kAutoLssSampling;
  std::string terrain;
  // Half-open range of gateway transcript records produced by this call.
  std::size_t transcript_begin = 0;
  std::size_t transcript_end = 0;
};

// Simulates every candidate with the same seed and returns the argmax of
// episode velocity percent; ties go to lower body height, then lower step
// frequency, then earlier position.
AdaptationResult SelectBest(std::span<const BehaviorParams> candidates,
                            const TerrainSpec& terrain, const CommandVector& cmd,
                            const SimConfig& sim, const RewardConfig& reward = {},
                            const LevelTable& table = DefaultLevelTable());

// Midpoint of each selected interval with the selected gait.
BehaviorParams MidpointParams(const LevelSelection& selection,
                              const LevelTable& table = DefaultLevelTable());

// Presents the midpoints of all five levels of each parameter as numeric
// options and assembles the model's picks; gait comes from the selection.
BehaviorParams DeterminingPick(const LevelSelection& selection,
                               const std::string& terrain_description,
                               const std::string& subject, AdaptationContext& ctx);

struct BenchmarkConfig {
  std::vector<TerrainKind> terrains;
  std::vector<MethodVariant> variants;
  int runs = 10;
  std::uint64_t seed = 0;
  CommandVector command = kBenchmarkCommand;
  SimConfig sim;
  RewardConfig reward;
  std::map<TerrainKind, TerrainSpec> terrain_specs;      // missing → Default
  std::map<TerrainKind, BehaviorParams> manual_params;  // for kManual
};

struct BenchmarkRow {
  TerrainKind terrain = TerrainKind::kUphillSlope;
  MethodVariant variant = MethodVariant::kAuto;
  EpisodeReport report;  // averaged over runs
  AdaptationResult adaptation;
};

// For each terrain (outer) and variant (inner): adapt once, then average the
// four percents over `runs` evaluation seeds shared by all variants of that
// terrain. The level location is shared between the two LSS variants.
std::vector<BenchmarkRow> RunBenchmark(const BenchmarkConfig& cfg,
                                       AdaptationContext& ctx);

// terrain,method,r_vxy,r_wz,r_cf,r_cv
std::string BenchmarkCsv(std::span<const BenchmarkRow> rows);
// Per-candidate screening scores of the sampling rows.
std::string CandidateCsv(std::span<const BenchmarkRow> rows);

// {"<terrain name>": {behavior params}, ...}
std::map<TerrainKind, BehaviorParams> ManualParamsFromJson(const nlohmann::json& j);

}  // namespace qgpt
