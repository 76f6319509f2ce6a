#include "qgpt/llm_parsers.h"

#include <cmath>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "qgpt/errors.h"

namespace qgpt {

using nlohmann::json;

namespace {

constexpr const char* kNumber = R"(([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))";

// Last "A<k>: value" per index.
std::map<int, std::string> AnswerLines(std::string_view text,
                                       const std::string& value_pattern) {
  const std::regex re(R"(\bA([1-6])\s*[:.)]\s*)" + value_pattern,
                      std::regex::icase);
  std::map<int, std::string> answers;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re);
       it != std::sregex_iterator(); ++it) {
    answers[std::stoi((*it)[1].str())] = (*it)[2].str();
  }
  return answers;
}

std::string Trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n.");
  if (b == std::string::npos || e == std::string::npos || e < b) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

LevelAnswers ParseLevels(std::string_view text) {
  const auto answers = AnswerLines(text, R"(([A-Za-z][A-Za-z _\-]*))");
  LevelAnswers out;
  for (Param p : kAllParams) {
    const int index = static_cast<int>(p) + 1;
    const std::string name = "A" + std::to_string(index);
    auto it = answers.find(index);
    if (it == answers.end()) {
      throw ParseError("missing answer " + name + " (" + std::string(ParamName(p)) + ")");
    }
    auto level = ParseLevel(p, Trim(it->second));
    if (!level) {
      throw ParseError(name + ": '" + Trim(it->second) + "' is not a valid " +
                       std::string(ParamName(p)) + " level");
    }
    out.levels[static_cast<std::size_t>(p)] = *level;
  }
  auto it = answers.find(6);
  if (it == answers.end()) throw ParseError("missing answer A6 (gait)");
  auto gait = ParseGaitName(Trim(it->second));
  if (!gait) throw ParseError("A6: '" + Trim(it->second) + "' is not a gait preset");
  out.gait = *gait;
  return out;
}

NumericParse ParseNumericParams(std::string_view text, const LevelTable& table) {
  static const std::array<std::pair<Param, const char*>, kNumContinuousParams>
      kLabels = {{
          {Param::kBodyHeight, R"(body[\s_]*height)"},
          {Param::kStepFrequency, R"(step(?:ping)?[\s_]*frequency)"},
          {Param::kSwingHeight, R"(swing[\s_]*height)"},
          {Param::kBodyPitch, R"(pitch)"},
          {Param::kStanceWidth, R"(stance[\s_]*width)"},
      }};
  const std::string s(text);
  NumericParse out;
  for (const auto& [param, label] : kLabels) {
    const std::regex re(std::string(label) + R"([^\n\d+\-.]{0,24}?)" + kNumber,
                        std::regex::icase);
    std::smatch m;
    if (!std::regex_search(s, m, re)) {
      throw ParseError("no numeric value for " + std::string(ParamName(param)));
    }
    const double raw = std::stod(m[1].str());
    if (!std::isfinite(raw)) {
      throw ParseError("non-finite value for " + std::string(ParamName(param)));
    }
    const double clamped = table.Clamp(param, raw);
    if (clamped != raw) {
      std::ostringstream w;
      w << ParamName(param) << " value " << raw << " clamped to " << clamped;
      out.warnings.push_back(w.str());
    }
    out.params.Set(param, clamped);
  }
  const std::regex gait_re(R"(gait[^\n:=]{0,16}[:=]\s*([A-Za-z]+))", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(s, m, gait_re)) throw ParseError("no gait given");
  auto gait = ParseGaitName(m[1].str());
  if (!gait) throw ParseError("gait '" + m[1].str() + "' is not a preset");
  out.params.gait = OffsetsOf(*gait);
  return out;
}

std::array<double, kNumContinuousParams> ParseNumericAnswers(std::string_view text) {
  const auto answers = AnswerLines(text, kNumber);
  std::array<double, kNumContinuousParams> out{};
  for (int i = 1; i <= kNumContinuousParams; ++i) {
    auto it = answers.find(i);
    if (it == answers.end()) throw ParseError("missing answer A" + std::to_string(i));
    out[static_cast<std::size_t>(i - 1)] = std::stod(it->second);
  }
  return out;
}

const TerrainCost* CostAssignment::FindTerrain(std::string_view type) const {
  for (const auto& t : terrain) {
    if (t.type == type) return &t;
  }
  return nullptr;
}

bool CostAssignment::IsObstacle(std::string_view category) const {
  for (const auto& o : obstacles) {
    if (o == category) return true;
  }
  return false;
}

std::optional<std::string> ExtractBalanced(std::string_view text, char open) {
  const char close = open == '{' ? '}' : ']';
  const auto start = text.find(open);
  if (start == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false, escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == open) {
      ++depth;
    } else if (c == close && --depth == 0) {
      return std::string(text.substr(start, i - start + 1));
    }
  }
  return std::nullopt;
}

CostAssignment ParseCostJson(std::string_view text, CostDomain domain) {
  const auto block = ExtractBalanced(text, '{');
  if (!block) throw ParseError("no JSON object found in reply");
  json j;
  try {
    j = json::parse(*block);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }

  std::vector<std::string> problems;
  CostAssignment out;
  if (!j.contains("target_object") || !j["target_object"].is_string()) {
    problems.push_back("target_object: missing or not a string");
  } else {
    out.target_object = j["target_object"].get<std::string>();
  }
  if (!j.contains("obstacles") || !j["obstacles"].is_array()) {
    problems.push_back("obstacles: missing or not an array");
  } else {
    for (std::size_t i = 0; i < j["obstacles"].size(); ++i) {
      const auto& o = j["obstacles"][i];
      if (!o.is_string()) {
        problems.push_back("obstacles[" + std::to_string(i) + "]: not a string");
      } else {
        out.obstacles.push_back(o.get<std::string>());
      }
    }
  }
  if (!j.contains("terrain") || !j["terrain"].is_array()) {
    problems.push_back("terrain: missing or not an array");
  } else {
    for (std::size_t i = 0; i < j["terrain"].size(); ++i) {
      const auto& t = j["terrain"][i];
      const std::string where = "terrain[" + std::to_string(i) + "]";
      if (!t.is_object()) {
        problems.push_back(where + ": not an object");
        continue;
      }
      TerrainCost tc;
      bool ok = true;
      if (!t.contains("type") || !t["type"].is_string()) {
        problems.push_back(where + ": missing 'type'");
        ok = false;
      } else {
        tc.type = t["type"].get<std::string>();
      }
      if (!t.contains("cost") || !t["cost"].is_number()) {
        problems.push_back(where + ": missing 'cost'");
        ok = false;
      } else {
        tc.cost = t["cost"].get<double>();
        const bool valid = domain == CostDomain::kBinary
                               ? (tc.cost == 0.0 || tc.cost == 1.0)
                               : (tc.cost >= 0.0 && tc.cost <= 1.0);
        if (!valid) {
          std::ostringstream msg;
          msg << where << " (" << tc.type << "): cost " << tc.cost << " outside "
              << (domain == CostDomain::kBinary ? "{0, 1}" : "[0, 1]");
          problems.push_back(msg.str());
          ok = false;
        }
      }
      if (!t.contains("gait")) {
        problems.push_back(where + ": missing 'gait'");
        ok = false;
      } else if (t["gait"].is_boolean()) {
        tc.gait = t["gait"].get<bool>() ? 1 : 0;
      } else if (t["gait"].is_number_integer() &&
                 (t["gait"].get<int>() == 0 || t["gait"].get<int>() == 1)) {
        tc.gait = t["gait"].get<int>();
      } else {
        problems.push_back(where + ": gait must be 0 or 1");
        ok = false;
      }
      if (ok) out.terrain.push_back(std::move(tc));
    }
  }
  if (!problems.empty()) {
    std::string msg = "cost assignment schema violations:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ParseError(msg);
  }
  return out;
}

}  // namespace qgpt
