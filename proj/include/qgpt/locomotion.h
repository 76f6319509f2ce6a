#pragma once

// Command / behavior-parameter / gait domain model and the closed-form gait
// phase mathematics used by the reward model and the surrogate simulator.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qgpt {

inline constexpr int kNumFeet = 4;
inline constexpr int kNumContinuousParams = 5;
inline constexpr int kNumLevels = 5;
inline constexpr double kDefaultDutyFactor = 0.5;

// Stable ordering FR, FL, RR, RL.
enum class FootId { kFR = 0, kFL = 1, kRR = 2, kRL = 3 };
inline constexpr std::array<FootId, kNumFeet> kAllFeet = {
    FootId::kFR, FootId::kFL, FootId::kRR, FootId::kRL};
std::string_view FootName(FootId foot);

template <typename T>
using PerFoot = std::array<T, kNumFeet>;

struct CommandLimits {
  double max_linear = 2.0;   // m/s
  double max_angular = 3.0;  // rad/s
};

struct CommandVector {
  double vx = 0.0;  // m/s, body frame
  double vy = 0.0;  // m/s
  double wz = 0.0;  // rad/s

  // Throws std::invalid_argument on non-finite or out-of-limit components.
  void Validate(const CommandLimits& limits = {}) const;
};

// The benchmark command: walk straight ahead at 1 m/s.
inline constexpr CommandVector kBenchmarkCommand{1.0, 0.0, 0.0};

struct GaitOffsets {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;

  void Validate() const;
  bool operator==(const GaitOffsets&) const = default;
};

enum class GaitPreset { kPronking = 0, kTrotting = 1, kBounding = 2, kPacing = 3 };
inline constexpr std::array<GaitPreset, 4> kAllGaits = {
    GaitPreset::kPronking, GaitPreset::kTrotting, GaitPreset::kBounding,
    GaitPreset::kPacing};

GaitOffsets OffsetsOf(GaitPreset gait);
std::string_view GaitName(GaitPreset gait);
// Accepts full names and the common stems ("trot", "pace", ...),
// case-insensitively.
std::optional<GaitPreset> ParseGaitName(std::string_view name);
// Exact match against the four presets.
std::optional<GaitPreset> PresetOf(const GaitOffsets& offsets);

// The five continuous behavior parameters, in the order the level prompt
// asks about them.
enum class Param {
  kBodyHeight = 0,
  kStepFrequency = 1,
  kSwingHeight = 2,
  kBodyPitch = 3,
  kStanceWidth = 4,
};
inline constexpr std::array<Param, kNumContinuousParams> kAllParams = {
    Param::kBodyHeight, Param::kStepFrequency, Param::kSwingHeight,
    Param::kBodyPitch, Param::kStanceWidth};

std::string_view ParamName(Param p);  // snake_case, e.g. "body_height"
std::optional<Param> ParseParamName(std::string_view name);

// Ordinal level; pitch uses sign-aware names for the same ordinals.
enum class Level { kVeryLow = 0, kLow = 1, kMedium = 2, kHigh = 3, kVeryHigh = 4 };

std::string_view LevelName(Param p, Level level);  // e.g. "very_low", "neutral"
// Tolerates spaces/underscores/hyphens, trailing punctuation, and the
// "neural" misspelling of "neutral" used in the original prompt.
std::optional<Level> ParseLevel(Param p, std::string_view text);

struct BehaviorParams {
  double body_height = 0.3;     // m
  double step_frequency = 3.0;  // Hz
  double body_pitch = 0.0;      // rad
  double stance_width = 0.25;   // m
  double swing_height = 0.08;   // m
  GaitOffsets gait = OffsetsOf(GaitPreset::kTrotting);

  double Get(Param p) const;
  void Set(Param p, double value);
  bool operator==(const BehaviorParams&) const = default;
};

nlohmann::json ToJson(const BehaviorParams& params);
BehaviorParams BehaviorParamsFromJson(const nlohmann::json& j);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double Width() const { return hi - lo; }
  double Mid() const { return 0.5 * (lo + hi); }
  bool Contains(double x) const { return x >= lo && x <= hi; }
  double Distance(double x) const;
  bool operator==(const Interval&) const = default;
};

// Per-parameter, per-level ranges. Defaults reproduce the published level
// table; a JSON override of the same shape can be loaded.
class LevelTable {
 public:
  LevelTable();  // compiled-in defaults

  // {"body_height": {"very_low": [0.1, 0.15], ...}, ...}; parameters or
  // levels absent from the JSON keep their defaults. Validates contiguity.
  static LevelTable FromJson(const nlohmann::json& j);

  const Interval& Range(Param p, Level level) const;
  // String form; throws std::invalid_argument on unknown names.
  const Interval& Range(std::string_view param, std::string_view level) const;
  // Union of the five levels.
  Interval GlobalRange(Param p) const;
  double Clamp(Param p, double value) const;

  // Levels of one parameter must tile its global range without gaps or
  // overlapping interiors.
  void Validate() const;

 private:
  std::array<std::array<Interval, kNumLevels>, kNumContinuousParams> ranges_;
};

const LevelTable& DefaultLevelTable();

// Grid spacing used when sampling each parameter's located range.
double SamplingStep(Param p);

// Values from interval.lo stepping by SamplingStep(p); interval.hi is always
// the last value (appended when it is off-grid). Throws on inverted
// intervals or intervals outside the parameter's global range.
std::vector<double> SampleGrid(Param p, const Interval& interval,
                               const LevelTable& table = DefaultLevelTable());

// Per-foot cycle fractions [t+θ2+θ3, t+θ1+θ3, t+θ1, t+θ2] reduced into [0,1).
PerFoot<double> FootPhases(double t, const GaitOffsets& gait);

// sin(2π·phase) per foot.
PerFoot<double> TimingReference(double t, const GaitOffsets& gait);

// true = stance. A foot is in stance while its phase is below the duty
// factor.
PerFoot<bool> DesiredContact(const GaitOffsets& gait, double t,
                             double duty_factor = kDefaultDutyFactor);

}  // namespace qgpt
