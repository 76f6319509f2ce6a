#include "qgpt/locomotion.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qgpt {

namespace {

constexpr double kGridEps = 1e-9;

std::string Normalize(std::string_view text) {
  std::string out;
  for (char c : text) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) {
      out.push_back(static_cast<char>(std::tolower(u)));
    } else if (c == ' ' || c == '_' || c == '-') {
      if (!out.empty() && out.back() != '_') out.push_back('_');
    }
    // punctuation dropped
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

void CheckPhase(double t) {
  if (!std::isfinite(t) || t < 0.0 || t > 1.0) {
    throw std::invalid_argument("cycle fraction must lie in [0, 1], got " +
                                std::to_string(t));
  }
}

double Frac(double x) { return x - std::floor(x); }

}  // namespace

std::string_view FootName(FootId foot) {
  switch (foot) {
    case FootId::kFR: return "FR";
    case FootId::kFL: return "FL";
    case FootId::kRR: return "RR";
    case FootId::kRL: return "RL";
  }
  return "?";
}

void CommandVector::Validate(const CommandLimits& limits) const {
  if (!std::isfinite(vx) || !std::isfinite(vy) || !std::isfinite(wz)) {
    throw std::invalid_argument("command vector has non-finite components");
  }
  if (std::hypot(vx, vy) > limits.max_linear) {
    throw std::invalid_argument("commanded linear speed exceeds limit");
  }
  if (std::abs(wz) > limits.max_angular) {
    throw std::invalid_argument("commanded yaw rate exceeds limit");
  }
}

void GaitOffsets::Validate() const {
  for (double th : {theta1, theta2, theta3}) {
    if (!std::isfinite(th) || th < 0.0 || th >= 1.0) {
      throw std::invalid_argument("gait offsets must lie in [0, 1)");
    }
  }
}

GaitOffsets OffsetsOf(GaitPreset gait) {
  switch (gait) {
    case GaitPreset::kPronking: return {0.0, 0.0, 0.0};
    case GaitPreset::kTrotting: return {0.5, 0.0, 0.0};
    case GaitPreset::kBounding: return {0.0, 0.5, 0.0};
    case GaitPreset::kPacing: return {0.0, 0.0, 0.5};
  }
  return {};
}

std::string_view GaitName(GaitPreset gait) {
  switch (gait) {
    case GaitPreset::kPronking: return "pronking";
    case GaitPreset::kTrotting: return "trotting";
    case GaitPreset::kBounding: return "bounding";
    case GaitPreset::kPacing: return "pacing";
  }
  return "?";
}

std::optional<GaitPreset> ParseGaitName(std::string_view name) {
  static constexpr std::array<std::string_view, 4> kRoots = {"pronk", "trot",
                                                             "bound", "pac"};
  const std::string n = Normalize(name);
  for (GaitPreset g : kAllGaits) {
    const auto root = kRoots[static_cast<std::size_t>(g)];
    if (n.starts_with(root) && n.size() <= GaitName(g).size()) return g;
  }
  return std::nullopt;
}

std::optional<GaitPreset> PresetOf(const GaitOffsets& offsets) {
  for (GaitPreset g : kAllGaits) {
    if (OffsetsOf(g) == offsets) return g;
  }
  return std::nullopt;
}

std::string_view ParamName(Param p) {
  switch (p) {
    case Param::kBodyHeight: return "body_height";
    case Param::kStepFrequency: return "step_frequency";
    case Param::kSwingHeight: return "swing_height";
    case Param::kBodyPitch: return "body_pitch";
    case Param::kStanceWidth: return "stance_width";
  }
  return "?";
}

std::optional<Param> ParseParamName(std::string_view name) {
  const std::string n = Normalize(name);
  for (Param p : kAllParams) {
    if (n == ParamName(p)) return p;
  }
  return std::nullopt;
}

std::string_view LevelName(Param p, Level level) {
  static constexpr std::array<std::string_view, kNumLevels> kMagnitude = {
      "very_low", "low", "medium", "high", "very_high"};
  static constexpr std::array<std::string_view, kNumLevels> kSigned = {
      "very_negative", "negative", "neutral", "positive", "very_positive"};
  const auto i = static_cast<std::size_t>(level);
  return p == Param::kBodyPitch ? kSigned[i] : kMagnitude[i];
}

std::optional<Level> ParseLevel(Param p, std::string_view text) {
  std::string n = Normalize(text);
  if (p == Param::kBodyPitch && n == "neural") n = "neutral";
  for (int i = 0; i < kNumLevels; ++i) {
    const auto level = static_cast<Level>(i);
    if (n == LevelName(p, level)) return level;
  }
  return std::nullopt;
}

double BehaviorParams::Get(Param p) const {
  switch (p) {
    case Param::kBodyHeight: return body_height;
    case Param::kStepFrequency: return step_frequency;
    case Param::kSwingHeight: return swing_height;
    case Param::kBodyPitch: return body_pitch;
    case Param::kStanceWidth: return stance_width;
  }
  return 0.0;
}

void BehaviorParams::Set(Param p, double value) {
  switch (p) {
    case Param::kBodyHeight: body_height = value; break;
    case Param::kStepFrequency: step_frequency = value; break;
    case Param::kSwingHeight: swing_height = value; break;
    case Param::kBodyPitch: body_pitch = value; break;
    case Param::kStanceWidth: stance_width = value; break;
  }
}

nlohmann::json ToJson(const BehaviorParams& params) {
  nlohmann::json j;
  for (Param p : kAllParams) j[std::string(ParamName(p))] = params.Get(p);
  if (auto preset = PresetOf(params.gait)) {
    j["gait"] = std::string(GaitName(*preset));
  } else {
    j["gait"] = {params.gait.theta1, params.gait.theta2, params.gait.theta3};
  }
  return j;
}

BehaviorParams BehaviorParamsFromJson(const nlohmann::json& j) {
  BehaviorParams params;
  for (Param p : kAllParams) {
    const std::string key(ParamName(p));
    if (!j.contains(key)) {
      throw std::invalid_argument("behavior params missing '" + key + "'");
    }
    params.Set(p, j.at(key).get<double>());
  }
  if (j.contains("gait")) {
    const auto& g = j.at("gait");
    if (g.is_string()) {
      auto preset = ParseGaitName(g.get<std::string>());
      if (!preset) {
        throw std::invalid_argument("unknown gait '" + g.get<std::string>() + "'");
      }
      params.gait = OffsetsOf(*preset);
    } else {
      params.gait = {g.at(0).get<double>(), g.at(1).get<double>(),
                     g.at(2).get<double>()};
      params.gait.Validate();
    }
  }
  return params;
}

double Interval::Distance(double x) const {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

LevelTable::LevelTable() {
  auto set = [this](Param p, std::array<Interval, kNumLevels> levels) {
    ranges_[static_cast<std::size_t>(p)] = levels;
  };
  set(Param::kBodyHeight,
      {{{0.10, 0.15}, {0.15, 0.20}, {0.20, 0.30}, {0.30, 0.40}, {0.40, 0.45}}});
  set(Param::kStepFrequency,
      {{{1.5, 2.0}, {2.0, 2.5}, {2.5, 3.0}, {3.0, 3.5}, {3.5, 4.0}}});
  set(Param::kSwingHeight,
      {{{0.03, 0.07}, {0.07, 0.11}, {0.11, 0.16}, {0.16, 0.21}, {0.21, 0.25}}});
  set(Param::kBodyPitch,
      {{{-0.4, -0.24}, {-0.24, -0.08}, {-0.08, 0.08}, {0.08, 0.24}, {0.24, 0.4}}});
  set(Param::kStanceWidth,
      {{{0.05, 0.13}, {0.13, 0.21}, {0.21, 0.29}, {0.29, 0.37}, {0.37, 0.45}}});
}

LevelTable LevelTable::FromJson(const nlohmann::json& j) {
  LevelTable table;
  for (const auto& [pname, levels] : j.items()) {
    auto p = ParseParamName(pname);
    if (!p) throw std::invalid_argument("unknown parameter '" + pname + "'");
    for (const auto& [lname, range] : levels.items()) {
      auto level = ParseLevel(*p, lname);
      if (!level) {
        throw std::invalid_argument("unknown level '" + lname + "' for " + pname);
      }
      table.ranges_[static_cast<std::size_t>(*p)][static_cast<std::size_t>(*level)] =
          {range.at(0).get<double>(), range.at(1).get<double>()};
    }
  }
  table.Validate();
  return table;
}

const Interval& LevelTable::Range(Param p, Level level) const {
  return ranges_[static_cast<std::size_t>(p)][static_cast<std::size_t>(level)];
}

const Interval& LevelTable::Range(std::string_view param,
                                  std::string_view level) const {
  auto p = ParseParamName(param);
  if (!p) throw std::invalid_argument("unknown parameter '" + std::string(param) + "'");
  auto l = ParseLevel(*p, level);
  if (!l) {
    throw std::invalid_argument("level '" + std::string(level) +
                                "' is not legal for " + std::string(param));
  }
  return Range(*p, *l);
}

Interval LevelTable::GlobalRange(Param p) const {
  const auto& levels = ranges_[static_cast<std::size_t>(p)];
  return {levels.front().lo, levels.back().hi};
}

double LevelTable::Clamp(Param p, double value) const {
  const Interval g = GlobalRange(p);
  return std::clamp(value, g.lo, g.hi);
}

void LevelTable::Validate() const {
  for (Param p : kAllParams) {
    const auto& levels = ranges_[static_cast<std::size_t>(p)];
    for (int i = 0; i < kNumLevels; ++i) {
      if (!(levels[i].lo <= levels[i].hi)) {
        throw std::invalid_argument("inverted level interval for " +
                                    std::string(ParamName(p)));
      }
      if (i > 0 && std::abs(levels[i].lo - levels[i - 1].hi) > kGridEps) {
        throw std::invalid_argument("level intervals for " +
                                    std::string(ParamName(p)) +
                                    " are not contiguous");
      }
    }
  }
}

const LevelTable& DefaultLevelTable() {
  static const LevelTable table;
  return table;
}

double SamplingStep(Param p) {
  switch (p) {
    case Param::kBodyHeight: return 0.05;
    case Param::kStepFrequency: return 0.2;
    case Param::kSwingHeight: return 0.02;
    case Param::kBodyPitch: return 0.08;
    case Param::kStanceWidth: return 0.05;
  }
  return 0.0;
}

std::vector<double> SampleGrid(Param p, const Interval& interval,
                               const LevelTable& table) {
  if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi) ||
      interval.hi < interval.lo) {
    throw std::invalid_argument("empty or inverted sampling interval");
  }
  const Interval global = table.GlobalRange(p);
  if (interval.lo < global.lo - kGridEps || interval.hi > global.hi + kGridEps) {
    throw std::invalid_argument("sampling interval outside the global range of " +
                                std::string(ParamName(p)));
  }
  const double step = SamplingStep(p);
  const auto n = static_cast<long>(
      std::floor((interval.hi - interval.lo) / step + kGridEps));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) + 2);
  for (long k = 0; k <= n; ++k) values.push_back(interval.lo + k * step);
  if (std::abs(values.back() - interval.hi) <= kGridEps) {
    values.back() = interval.hi;
  } else {
    values.push_back(interval.hi);
  }
  return values;
}

PerFoot<double> FootPhases(double t, const GaitOffsets& gait) {
  CheckPhase(t);
  const auto [th1, th2, th3] = gait;
  return {Frac(t + th2 + th3), Frac(t + th1 + th3), Frac(t + th1), Frac(t + th2)};
}

PerFoot<double> TimingReference(double t, const GaitOffsets& gait) {
  const PerFoot<double> phases = FootPhases(t, gait);
  PerFoot<double> out;
  for (int i = 0; i < kNumFeet; ++i) {
    out[i] = std::sin(2.0 * std::numbers::pi * phases[i]);
  }
  return out;
}

PerFoot<bool> DesiredContact(const GaitOffsets& gait, double t,
                             double duty_factor) {
  const PerFoot<double> phases = FootPhases(t, gait);
  PerFoot<bool> stance;
  for (int i = 0; i < kNumFeet; ++i) stance[i] = phases[i] < duty_factor;
  return stance;
}

}  // namespace qgpt
