#include "qgpt/config.h"

#include <filesystem>
#include <sstream>

#include "qgpt/errors.h"
#include "qgpt/llm_gateway.h"

namespace qgpt {

using nlohmann::json;

namespace {

std::vector<std::string> SplitCsv(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string Resolve(const std::string& base, const std::string& p) {
  const std::filesystem::path path(p);
  return (path.is_absolute() ? path : std::filesystem::path(base) / path)
      .lexically_normal()
      .string();
}

TerrainKind TerrainOrThrow(const std::string& name) {
  if (auto k = ParseTerrainName(name)) return *k;
  std::string valid;
  for (TerrainKind k : kAllTerrains) valid += (valid.empty() ? "" : ", ") + std::string(TerrainName(k));
  throw ConfigError("unknown terrain '" + name + "'; valid terrains: " + valid);
}

MethodVariant VariantOrThrow(const std::string& name) {
  if (auto v = ParseVariant(name)) return *v;
  std::string valid;
  for (int i = 0; i <= 4; ++i) {
    valid += (i ? ", " : "") + std::string(VariantName(static_cast<MethodVariant>(i)));
  }
  throw ConfigError("unknown variant '" + name + "'; valid variants: " + valid);
}

}  // namespace

std::vector<TerrainKind> DefaultTerrains() {
  return {std::begin(kAllTerrains), std::end(kAllTerrains)};
}

std::vector<MethodVariant> DefaultVariants() {
  return {MethodVariant::kAuto, MethodVariant::kAutoLssSampling,
          MethodVariant::kAutoLssDetermining};
}

std::vector<TerrainKind> ParseTerrainList(const std::string& csv) {
  std::vector<TerrainKind> out;
  for (const auto& name : SplitCsv(csv)) out.push_back(TerrainOrThrow(name));
  if (out.empty()) throw ConfigError("empty terrain list");
  return out;
}

std::vector<MethodVariant> ParseVariantList(const std::string& csv) {
  std::vector<MethodVariant> out;
  for (const auto& name : SplitCsv(csv)) out.push_back(VariantOrThrow(name));
  if (out.empty()) throw ConfigError("empty variant list");
  return out;
}

AppConfig AppConfig::FromJson(const json& j, const std::string& base_dir) {
  AppConfig c = Defaults();
  try {
    c.seed = j.value("seed", c.seed);
    c.runs = j.value("runs", c.runs);
    if (c.runs < 1) throw ConfigError("runs must be >= 1");
    if (j.contains("terrains")) {
      c.terrains.clear();
      for (const auto& t : j["terrains"]) c.terrains.push_back(TerrainOrThrow(t.get<std::string>()));
    }
    if (j.contains("variants")) {
      c.variants.clear();
      for (const auto& v : j["variants"]) c.variants.push_back(VariantOrThrow(v.get<std::string>()));
    }
    if (j.contains("sim")) c.sim = SimConfig::FromJson(j["sim"]);
    if (j.contains("reward")) c.reward = RewardConfig::FromJson(j["reward"]);
    if (j.contains("lss")) c.lss = LssOptions::FromJson(j["lss"]);
    if (j.contains("terrain_specs")) {
      for (const auto& [name, spec] : j["terrain_specs"].items()) {
        const TerrainKind k = TerrainOrThrow(name);
        c.terrain_specs[k] = TerrainSpec::FromJson(k, spec);
      }
    }
    if (j.contains("manual_params")) {
      const json& m = j["manual_params"];
      c.manual_params = ManualParamsFromJson(
          m.is_string() ? json::parse(ReadFile(Resolve(base_dir, m.get<std::string>()))) : m);
    }
    if (j.contains("transcript")) c.transcript = Resolve(base_dir, j["transcript"].get<std::string>());
    if (j.contains("task")) c.task = TaskOptions::FromJson(j["task"]);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

AppConfig AppConfig::Load(const std::string& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return FromJson(j, std::filesystem::path(path).parent_path().string());
}

AppConfig AppConfig::Defaults() {
  AppConfig c;
  c.terrains = DefaultTerrains();
  c.variants = DefaultVariants();
  c.manual_params = ManualParamsFromJson(json::parse(ReadFile(AssetDir() + "/manual_params.json")));
  c.transcript = AssetDir() + "/transcripts/benchmark.jsonl";
  return c;
}

}  // namespace qgpt
