// qgpt: command-line entry points.
//
//   qgpt adapt           locomotion-adaptation benchmark -> benchmark.csv
//   qgpt plan            cost-map path planning in a synthetic scene
//   qgpt task            long-horizon instruction in a bundled scenario
//   qgpt export-terrain  benchmark terrain heightfields as PGM / text
//
// The scripted provider is the default; --provider live reads the endpoint,
// model and key from QGPT_LLM_BASE_URL / QGPT_LLM_MODEL / QGPT_LLM_API_KEY.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgpt/config.h"
#include "qgpt/errors.h"
#include "qgpt/io.h"
#include "qgpt/llm_gateway.h"
#include "qgpt/lss.h"
#include "qgpt/navigation.h"
#include "qgpt/semantic_map.h"
#include "qgpt/task.h"
#include "qgpt/terrain.h"

namespace {

using nlohmann::json;
using namespace qgpt;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIncomplete = 3;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string provider = "scripted";
  std::string transcript;
  std::string out = "out";
};

std::shared_ptr<LlmProvider> MakeProvider(const Common& common,
                                          const std::string& default_transcript) {
  if (common.provider == "live") {
    return std::make_shared<LiveProvider>(LiveSettings::FromEnvironment());
  }
  const std::string path = common.transcript.empty() ? default_transcript : common.transcript;
  if (path.empty()) throw ConfigError("scripted provider needs --transcript");
  return ScriptedProvider::FromFile(path);
}

AppConfig LoadConfig(const Common& common) {
  AppConfig cfg = common.config_path.empty() ? AppConfig::Defaults()
                                             : AppConfig::Load(common.config_path);
  if (common.seed) cfg.seed = *common.seed;
  return cfg;
}

void WriteManifest(const Common& common, const std::string& command, std::uint64_t seed,
                   const std::string& transcript, json extra) {
  json m = {{"command", command},
            {"config", common.config_path},
            {"seed", seed},
            {"provider", {{"mode", common.provider}, {"transcript", transcript}}},
            {"out", common.out}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  WriteFile(common.out + "/manifest.json", m.dump(2) + "\n");
}

void WriteTranscript(const Common& common, const Gateway& gateway) {
  WriteFile(common.out + "/transcript.jsonl", TranscriptToJsonl(gateway.Transcript()));
}

int RunAdapt(const Common& common, int runs, const std::string& terrains,
             const std::string& variants, std::optional<double> noise_scale) {
  AppConfig cfg = LoadConfig(common);
  if (runs > 0) cfg.runs = runs;
  if (!terrains.empty()) cfg.terrains = ParseTerrainList(terrains);
  if (!variants.empty()) cfg.variants = ParseVariantList(variants);
  if (noise_scale) cfg.sim.noise_scale = *noise_scale;
  cfg.sim.Validate();

  Gateway gateway(MakeProvider(common, cfg.transcript));
  const PromptLibrary prompts = PromptLibrary::Default();
  AdaptationContext ctx{gateway, prompts, DefaultLevelTable(), cfg.lss};
  BenchmarkConfig bench;
  bench.terrains = cfg.terrains;
  bench.variants = cfg.variants;
  bench.runs = cfg.runs;
  bench.seed = cfg.seed;
  bench.sim = cfg.sim;
  bench.reward = cfg.reward;
  bench.terrain_specs = cfg.terrain_specs;
  bench.manual_params = cfg.manual_params;

  const auto rows = RunBenchmark(bench, ctx);
  WriteFile(common.out + "/benchmark.csv", BenchmarkCsv(rows));
  WriteFile(common.out + "/candidates.csv", CandidateCsv(rows));
  json chosen = json::array();
  for (const auto& r : rows) {
    chosen.push_back({{"terrain", std::string(TerrainName(r.terrain))},
                      {"method", std::string(VariantLabel(r.variant))},
                      {"params", ToJson(r.adaptation.chosen)}});
  }
  WriteFile(common.out + "/chosen_params.json", chosen.dump(2) + "\n");
  WriteTranscript(common, gateway);

  json t = json::array(), v = json::array();
  for (auto k : cfg.terrains) t.push_back(std::string(TerrainName(k)));
  for (auto m : cfg.variants) v.push_back(std::string(VariantName(m)));
  WriteManifest(common, "adapt", cfg.seed,
                common.provider == "live" ? "" : (common.transcript.empty() ? cfg.transcript
                                                                            : common.transcript),
                {{"runs", cfg.runs},
                 {"terrains", t},
                 {"variants", v},
                 {"noise_scale", cfg.sim.noise_scale}});
  std::cout << BenchmarkCsv(rows);
  return 0;
}

int RunPlan(const Common& common, const std::string& scene_path,
            const std::string& instruction, bool no_cost) {
  AppConfig cfg = LoadConfig(common);
  const Scene scene = LoadScene(scene_path);
  if (common.provider != "live" && common.transcript.empty()) {
    throw ConfigError("plan needs --transcript with the scripted provider");
  }
  Gateway gateway(MakeProvider(common, ""));
  const PromptLibrary prompts = PromptLibrary::Default();
  PlanOptions opts;
  opts.mapping = cfg.task.mapping;
  opts.costs = cfg.task.costs;
  opts.costs.no_cost = opts.costs.no_cost || no_cost;
  opts.cost_domain = cfg.task.cost_domain;
  opts.success_radius = cfg.task.success_radius;

  const PlanResult result = PlanScene(scene, instruction, gateway, prompts, opts);
  WriteFile(common.out + "/costmap.pgm", result.costmap.ToPgm());
  WriteFile(common.out + "/arrival.csv", result.field.ToCsv());
  json summary = {{"target", result.assignment.target_object},
                  {"goal", {result.goal.cell.row, result.goal.cell.col}},
                  {"reachable", result.path.has_value()},
                  {"reached", result.reached},
                  {"message", result.message},
                  {"no_cost", opts.costs.no_cost}};
  if (result.path) {
    summary["distance_to_target"] = result.distance;
    WriteFile(common.out + "/path.json", result.path->ToJson().dump(2) + "\n");
  }
  WriteFile(common.out + "/result.json", summary.dump(2) + "\n");
  WriteTranscript(common, gateway);
  WriteManifest(common, "plan", cfg.seed, common.transcript,
                {{"scene", scene_path}, {"instruction", instruction},
                 {"no_cost", opts.costs.no_cost}});
  std::cout << summary.dump(2) << "\n";
  if (!result.path) {
    std::cerr << "unreachable: " << result.message << "\n";
    return kExitIncomplete;
  }
  return result.reached ? 0 : kExitIncomplete;
}

int RunTask(const Common& common, const std::string& scenario_path) {
  AppConfig cfg = LoadConfig(common);
  const Scenario scenario = Scenario::Load(scenario_path);
  TaskOptions options = cfg.task;
  if (!scenario.options.empty()) options = TaskOptions::FromJson(scenario.options);

  Gateway gateway(MakeProvider(common, scenario.transcript_path));
  const PromptLibrary prompts = PromptLibrary::Default();
  const SkillLibrary library = SkillLibrary::Default();
  TaskContext ctx{gateway, prompts, library, options};
  World world = World::FromScene(LoadScene(scenario.scene_path), options.mapping);

  const auto plan = Decompose(scenario.instruction, library, gateway, prompts);
  const ExecutionTrace trace = Execute(plan, world, ctx);
  WriteFile(common.out + "/trace.jsonl", trace.ToJsonl());
  WriteTranscript(common, gateway);
  WriteManifest(common, "task", cfg.seed,
                common.transcript.empty() ? scenario.transcript_path : common.transcript,
                {{"scenario", scenario_path}});
  for (const auto& r : trace.records) {
    std::cout << r.index << " " << r.subgoal.skill << " "
              << StatusName(r.subgoal.status) << ": " << r.verdict.reason << "\n";
  }
  std::cout << "task_complete=" << (trace.task_complete ? "true" : "false") << "\n";
  return trace.task_complete ? 0 : kExitIncomplete;
}

int RunExportTerrain(const Common& common, const std::string& terrains) {
  AppConfig cfg = LoadConfig(common);
  const auto kinds = terrains.empty() ? cfg.terrains : ParseTerrainList(terrains);
  for (TerrainKind k : kinds) {
    auto it = cfg.terrain_specs.find(k);
    TerrainSpec spec = it != cfg.terrain_specs.end() ? it->second : TerrainSpec::Default(k);
    spec.seed = cfg.seed;
    const Heightfield hf = BuildTerrain(spec);
    const std::string base = common.out + "/" + std::string(TerrainName(k));
    WriteFile(base + ".pgm", hf.ToPgm());
    WriteFile(base + ".txt", hf.ToText());
    std::cout << base << ".pgm\n";
  }
  WriteManifest(common, "export-terrain", cfg.seed, "", json::object());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language-model-driven quadruped locomotion and navigation toolkit"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Root seed");
    sub->add_option("--provider", common.provider, "Model provider")
        ->check(CLI::IsMember({"scripted", "live"}));
    sub->add_option("--transcript", common.transcript, "Scripted-provider transcript")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "Output directory");
  };

  int runs = 0;
  std::string terrains, variants;
  std::optional<double> noise_scale;
  auto* adapt = app.add_subcommand("adapt", "Run the locomotion-adaptation benchmark");
  add_common(adapt);
  adapt->add_option("--runs", runs, "Evaluation runs per row")->check(CLI::PositiveNumber);
  adapt->add_option("--terrains", terrains, "Comma-separated terrain names");
  adapt->add_option("--variants", variants, "Comma-separated method variants");
  adapt->add_option("--noise-scale", noise_scale, "Surrogate noise scale")
      ->check(CLI::NonNegativeNumber);

  std::string scene_path, instruction;
  bool no_cost = false;
  auto* plan = app.add_subcommand("plan", "Plan a path in a synthetic scene");
  add_common(plan);
  plan->add_option("--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
  plan->add_option("--instruction", instruction, "Navigation instruction")->required();
  plan->add_flag("--no-cost", no_cost, "Ablation: ignore category costs");

  std::string scenario_path;
  auto* task = app.add_subcommand("task", "Run a long-horizon scenario");
  add_common(task);
  task->add_option("scenario", scenario_path, "Scenario file")->required()
      ->check(CLI::ExistingFile);

  auto* export_terrain = app.add_subcommand("export-terrain", "Write terrain heightfields");
  add_common(export_terrain);
  export_terrain->add_option("--terrains", terrains, "Comma-separated terrain names");

  CLI11_PARSE(app, argc, argv);
  for (auto* sub : {adapt, plan, task, export_terrain}) {
    if (sub->parsed() && sub->count("--seed")) common.seed = seed;
  }

  try {
    if (adapt->parsed()) return RunAdapt(common, runs, terrains, variants, noise_scale);
    if (plan->parsed()) return RunPlan(common, scene_path, instruction, no_cost);
    if (task->parsed()) return RunTask(common, scenario_path);
    if (export_terrain->parsed()) return RunExportTerrain(common, terrains);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
