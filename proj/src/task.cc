#include "qgpt/task.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qgpt/errors.h"
#include "qgpt/io.h"
#include "qgpt/lss.h"

namespace qgpt {

using nlohmann::json;

namespace {

double WrapAngle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool IsNavigationSkill(const std::string& name) {
  return name == "navigate_to" || name == "find" || name == "sit_next_to";
}

}  // namespace

SkillLibrary SkillLibrary::Default() {
  SkillLibrary lib;
  lib.Add({"sit_down", {}, "Lower the body into a sitting posture."});
  lib.Add({"stand_up", {}, "Return to the normal standing posture."});
  lib.Add({"squat_down", {}, "Bend all legs to lower the body into a squat."});
  lib.Add({"greet", {}, "Greet the person in front of the robot."});
  lib.Add({"switch_gait",
           {{"terrain_description"}},
           "Adapt the locomotion parameters and gait to the described terrain."});
  lib.Add({"navigate_to",
           {{"target"}},
           "Walk to the named object or terrain region, planning around obstacles."});
  lib.Add({"find",
           {{"target"}},
           "Explore until the named object is seen, then walk up to it."});
  lib.Add({"sit_next_to",
           {{"target"}},
           "Walk up to the named object and sit down beside it."});
  return lib;
}

void SkillLibrary::Add(Skill skill) {
  if (Find(skill.name)) throw std::invalid_argument("duplicate skill '" + skill.name + "'");
  skills_.push_back(std::move(skill));
}

const Skill* SkillLibrary::Find(const std::string& name) const {
  for (const auto& s : skills_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<std::string> SkillLibrary::Names() const {
  std::vector<std::string> out;
  for (const auto& s : skills_) out.push_back(s.name);
  return out;
}

std::string SkillLibrary::Docs() const {
  std::string out;
  for (const auto& s : skills_) {
    out += s.name + "(";
    for (std::size_t i = 0; i < s.params.size(); ++i) {
      out += (i ? ", " : "") + s.params[i].name;
    }
    out += "): " + s.doc + "\n";
  }
  return out;
}

std::string_view StatusName(SubgoalStatus s) {
  switch (s) {
    case SubgoalStatus::kPending: return "pending";
    case SubgoalStatus::kRunning: return "running";
    case SubgoalStatus::kSucceeded: return "succeeded";
    case SubgoalStatus::kFailed: return "failed";
  }
  return "?";
}

std::string_view PostureName(Posture p) {
  switch (p) {
    case Posture::kStanding: return "standing";
    case Posture::kSitting: return "sitting";
    case Posture::kSquatting: return "squatting";
  }
  return "?";
}

namespace {

// Parsed subgoals plus the names that are not in the library.
std::pair<std::vector<Subgoal>, std::vector<std::string>> ParseSubgoals(
    const std::string& reply, const SkillLibrary& library) {
  const auto block = ExtractBalanced(reply, '[');
  if (!block) throw ParseError("no JSON array of subgoals found in reply");
  json j;
  try {
    j = json::parse(*block);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed subgoal JSON: ") + e.what());
  }
  std::vector<Subgoal> plan;
  std::vector<std::string> unknown;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& item = j[i];
    const std::string where = "subgoal[" + std::to_string(i) + "]";
    if (!item.is_object() || !item.contains("skill") || !item["skill"].is_string()) {
      throw ParseError(where + ": missing 'skill'");
    }
    Subgoal s;
    s.skill = item["skill"].get<std::string>();
    s.description = item.value("description", s.skill);
    if (item.contains("args")) {
      if (!item["args"].is_object()) throw ParseError(where + ": 'args' must be an object");
      for (const auto& [k, v] : item["args"].items()) {
        if (!v.is_string()) throw ParseError(where + ": argument '" + k + "' must be a string");
        s.args[k] = v.get<std::string>();
      }
    }
    if (!library.Find(s.skill)) unknown.push_back(s.skill);
    plan.push_back(std::move(s));
  }
  if (plan.empty()) throw ParseError("the subgoal list is empty");
  return {plan, unknown};
}

std::string JoinNames(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

}  // namespace

std::vector<Subgoal> Decompose(const std::string& instruction, const SkillLibrary& library,
                               Gateway& gateway, const PromptLibrary& prompts) {
  if (instruction.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw std::invalid_argument("instruction is empty");
  }
  ChatRequest request;
  request.template_id = "decompose";
  request.user = prompts.Render("decompose",
                                {{"skills", library.Docs()}, {"instruction", instruction}});
  request.temperature = kParsingTemperature;

  std::string problem;
  try {
    auto [plan, unknown] = ParseSubgoals(gateway.CompleteOne(request), library);
    if (unknown.empty()) return plan;
    problem = "unknown skill '" + unknown.front() + "'";
  } catch (const ParseError& e) {
    problem = e.what();
  }

  ChatRequest retry = request;
  retry.user += "\n\nYour previous answer could not be used (" + problem +
                "). Use only these skills: " + JoinNames(library.Names()) + ".";
  auto [plan, unknown] = ParseSubgoals(gateway.CompleteOne(retry), library);
  if (!unknown.empty()) {
    throw ParseError("unknown skill '" + unknown.front() +
                     "' after reprompt; valid skills: " + JoinNames(library.Names()));
  }
  return plan;
}

BoundSkill RetrieveSkill(const Subgoal& subgoal, const SkillLibrary& library) {
  const Skill* skill = library.Find(subgoal.skill);
  if (!skill) throw std::invalid_argument("no skill named '" + subgoal.skill + "'");
  std::string expected = skill->name + "(";
  for (std::size_t i = 0; i < skill->params.size(); ++i) {
    expected += (i ? ", " : "") + skill->params[i].name;
  }
  expected += ")";
  for (const auto& [name, value] : subgoal.args) {
    const bool known = std::any_of(skill->params.begin(), skill->params.end(),
                                   [&](const SkillParam& p) { return p.name == name; });
    if (!known) {
      throw std::invalid_argument("unexpected argument '" + name + "'; expected " + expected);
    }
  }
  BoundSkill bound{skill, {}};
  for (const SkillParam& p : skill->params) {
    auto it = subgoal.args.find(p.name);
    if (it == subgoal.args.end() || it->second.empty()) {
      throw std::invalid_argument("missing argument '" + p.name + "'; expected " + expected);
    }
    bound.args[p.name] = it->second;
  }
  return bound;
}

TaskOptions TaskOptions::FromJson(const json& j) {
  TaskOptions o;
  if (j.contains("mapping")) o.mapping = MappingOptions::FromJson(j["mapping"]);
  if (j.contains("costs")) o.costs = CostMapOptions::FromJson(j["costs"]);
  if (j.contains("cost_domain")) {
    const std::string d = j["cost_domain"].get<std::string>();
    if (d == "binary") {
      o.cost_domain = CostDomain::kBinary;
    } else if (d == "continuous") {
      o.cost_domain = CostDomain::kContinuous;
    } else {
      throw ConfigError("cost_domain must be 'binary' or 'continuous'");
    }
  }
  o.success_radius = j.value("success_radius", o.success_radius);
  o.max_iterations = j.value("max_iterations", o.max_iterations);
  o.advance_cells = j.value("advance_cells", o.advance_cells);
  if (!(o.success_radius > 0) || o.max_iterations < 1 || o.advance_cells < 1) {
    throw ConfigError("task options out of range");
  }
  return o;
}

World World::FromScene(const Scene& scene, const MappingOptions& mapping) {
  World w{scene, scene.MakeMap(), {}, {}, 0, 0, {}};
  w.agent.pose = scene.start;
  SemanticMap truth_map = scene.MakeMap();
  MappingOptions full = mapping;
  full.sensor = scene.sensor;
  Ingest(truth_map, w.truth, scene.AllPoints(), scene.start, 0, full);
  return w;
}

void Observe(World& world, const MappingOptions& mapping) {
  const Pose& pose = world.agent.pose;
  const SensorModel& sensor = world.scene.sensor;
  std::vector<LabeledPoint> visible;
  for (const auto& f : world.scene.frames) {
    for (const LabeledPoint& p : f.points) {
      const double dx = p.x - pose.x, dy = p.y - pose.y;
      if (std::hypot(dx, dy) > sensor.range) continue;
      if (sensor.fov < 2.0 * std::numbers::pi &&
          std::abs(WrapAngle(std::atan2(dy, dx) - pose.yaw)) > 0.5 * sensor.fov) {
        continue;
      }
      visible.push_back(p);
    }
  }
  MappingOptions opts = mapping;
  opts.sensor = sensor;
  Ingest(world.map, world.memory, visible, pose, world.frames_seen++, opts);
}

namespace {

std::pair<double, double> CentroidWorld(const SemanticMap& map, const InstanceRecord& inst) {
  const auto [r, c] = Centroid(inst);
  return {(c - map.size() / 2 + 0.5) * map.cell_size(),
          (r - map.size() / 2 + 0.5) * map.cell_size()};
}

// Distance from the agent to the nearest true instance of `category`.
std::optional<double> DistanceToTruth(const World& world, const std::string& category) {
  auto k = world.map.CategoryIndex(category);
  if (!k) return std::nullopt;
  std::optional<double> best;
  for (const auto& inst : world.truth.instances()) {
    if (inst.category != *k) continue;
    const auto [x, y] = CentroidWorld(world.map, inst);
    const double d = std::hypot(x - world.agent.pose.x, y - world.agent.pose.y);
    if (!best || d < *best) best = d;
  }
  return best;
}

json Navigate(const std::string& target, const std::string& description, World& world,
              TaskContext& ctx) {
  const TaskOptions& opt = ctx.options;
  Observe(world, opt.mapping);
  const CostAssignment assignment = AssignCosts(description, world.map.categories(),
                                                ctx.gateway, ctx.prompts, opt.cost_domain);
  int cells_moved = 0, gait_segments = 0, rounds = 0, scans = 0;
  for (; rounds < opt.max_iterations; ++rounds) {
    const CostMap cm = BuildCostMap(world.map, assignment, opt.costs);
    const Cell start = world.map.WorldToCell(world.agent.pose.x, world.agent.pose.y);
    const GoalChoice goal = GlobalGoal(target, world.memory, world.map, cm, start);
    const PathPlan plan = ExtractPath(FmmSolve(cm, goal.cell), start, cm, world.agent.pose.yaw);
    if (plan.offsets.empty()) {
      if (goal.instance_id) {
        return {{"cells_moved", cells_moved},
                {"gait_segments", gait_segments},
                {"rounds", rounds + 1},
                {"instance_id", *goal.instance_id}};
      }
      // Standing on the frontier itself: look around.
      for (int q = 0; q < 3; ++q) {
        world.agent.pose.yaw = WrapAngle(world.agent.pose.yaw + 0.5 * std::numbers::pi);
        ++world.tick;
        Observe(world, opt.mapping);
      }
      ++scans;
      continue;
    }
    const std::size_t steps =
        std::min(plan.offsets.size(), static_cast<std::size_t>(opt.advance_cells));
    for (std::size_t i = 0; i < steps; ++i) {
      world.agent.pose.x = plan.world[i + 1].first;
      world.agent.pose.y = plan.world[i + 1].second;
      world.agent.pose.yaw = WrapAngle(world.agent.pose.yaw + plan.offsets[i].dyaw);
      gait_segments += plan.gait_flags[i];
      ++cells_moved;
      ++world.tick;
    }
    Observe(world, opt.mapping);
  }
  throw Error("navigation to '" + target + "' did not settle within " +
              std::to_string(opt.max_iterations) + " rounds");
}

std::string AgentSummary(const World& world) {
  std::ostringstream os;
  os << "posture=" << PostureName(world.agent.posture)
     << ", greeted=" << (world.agent.greeted ? "true" : "false");
  return os.str();
}

}  // namespace

Verdict EvaluateSuccess(const Subgoal& subgoal, const World& world, TaskContext& ctx) {
  if (IsNavigationSkill(subgoal.skill)) {
    auto it = subgoal.args.find("target");
    if (it == subgoal.args.end()) return {false, "no target argument"};
    const auto d = DistanceToTruth(world, it->second);
    if (!d) return {false, "no '" + it->second + "' exists in the scene"};
    std::ostringstream os;
    os << "distance " << FormatFixed(*d, 3) << " m to '" << it->second << "'";
    if (*d > ctx.options.success_radius) return {false, os.str() + " exceeds the radius"};
    if (subgoal.skill == "sit_next_to" && world.agent.posture != Posture::kSitting) {
      return {false, os.str() + " but not sitting"};
    }
    return {true, os.str()};
  }
  if (subgoal.skill == "switch_gait") {
    if (!world.agent.behavior) return {false, "no behavior parameters were set"};
    return {true, "behavior parameters set"};
  }

  ChatRequest request;
  request.template_id = "evaluate";
  request.user = ctx.prompts.Render(
      "evaluate", {{"subgoal", subgoal.description}, {"state", AgentSummary(world)}});
  request.temperature = kParsingTemperature;
  try {
    const std::string reply = Lower(ctx.gateway.CompleteOne(request));
    if (reply.find("fail") != std::string::npos) return {false, "evaluator: failed"};
    if (reply.find("succe") != std::string::npos) return {true, "evaluator: succeeded"};
    return {false, "evaluator reply not understood"};
  } catch (const Error& e) {
    return {false, std::string("evaluator unavailable: ") + e.what()};
  }
}

ExecutionTrace Execute(std::vector<Subgoal> plan, World& world, TaskContext& ctx) {
  ExecutionTrace trace;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    Subgoal& sg = plan[i];
    TraceRecord rec;
    rec.index = static_cast<int>(i);
    rec.tick_begin = world.tick;
    sg.status = SubgoalStatus::kRunning;
    bool ran = true;
    try {
      const BoundSkill bound = RetrieveSkill(sg, ctx.library);
      const std::string& name = bound.skill->name;
      if (name == "sit_down") {
        world.agent.posture = Posture::kSitting;
        ++world.tick;
      } else if (name == "stand_up") {
        world.agent.posture = Posture::kStanding;
        ++world.tick;
      } else if (name == "squat_down") {
        world.agent.posture = Posture::kSquatting;
        ++world.tick;
      } else if (name == "greet") {
        world.agent.greeted = true;
        ++world.tick;
      } else if (name == "switch_gait") {
        AdaptationContext actx{ctx.gateway, ctx.prompts};
        const std::string desc = bound.args.at("terrain_description");
        const LevelSelection sel = LocateRanges(desc, "switch_gait", actx);
        world.agent.behavior = MidpointParams(sel);
        rec.details = {{"behavior", ToJson(*world.agent.behavior)}};
        ++world.tick;
      } else if (IsNavigationSkill(name)) {
        if (name == "sit_next_to") world.agent.posture = Posture::kStanding;
        rec.details = Navigate(bound.args.at("target"), sg.description, world, ctx);
        if (name == "sit_next_to") {
          world.agent.posture = Posture::kSitting;
          ++world.tick;
        }
      } else {
        throw std::invalid_argument("skill '" + name + "' has no executable body");
      }
    } catch (const std::exception& e) {
      ran = false;
      rec.verdict = {false, e.what()};
    }
    if (ran) rec.verdict = EvaluateSuccess(sg, world, ctx);
    sg.status = rec.verdict.succeeded ? SubgoalStatus::kSucceeded : SubgoalStatus::kFailed;
    rec.subgoal = sg;
    rec.tick_end = world.tick;
    if (rec.details.is_null()) rec.details = json::object();
    rec.details["pose"] = {world.agent.pose.x, world.agent.pose.y, world.agent.pose.yaw};
    rec.details["posture"] = std::string(PostureName(world.agent.posture));
    trace.records.push_back(std::move(rec));
    if (sg.status == SubgoalStatus::kFailed) break;
  }
  trace.task_complete = std::all_of(plan.begin(), plan.end(), [](const Subgoal& s) {
    return s.status == SubgoalStatus::kSucceeded;
  });
  trace.plan = std::move(plan);
  return trace;
}

std::string ExecutionTrace::ToJsonl() const {
  std::string out;
  for (const auto& r : records) {
    json j = {{"index", r.index},
              {"description", r.subgoal.description},
              {"skill", r.subgoal.skill},
              {"args", r.subgoal.args},
              {"status", std::string(StatusName(r.subgoal.status))},
              {"tick_begin", r.tick_begin},
              {"tick_end", r.tick_end},
              {"verdict", r.verdict.succeeded ? "succeeded" : "failed"},
              {"reason", r.verdict.reason},
              {"details", r.details}};
    out += j.dump() + "\n";
  }
  json statuses = json::array();
  for (const auto& s : plan) statuses.push_back(std::string(StatusName(s.status)));
  out += json({{"task_complete", task_complete}, {"statuses", statuses}}).dump() + "\n";
  return out;
}

Scenario Scenario::Load(const std::string& path) {
  const std::string text = ReadFile(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ConfigError("scenario file '" + path + "' is empty");
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("scenario '" + path + "': " + e.what());
  }
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& key) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw ConfigError("scenario '" + path + "' lacks '" + key + "'");
    }
    const std::filesystem::path p = j[key].get<std::string>();
    return (p.is_absolute() ? p : base / p).lexically_normal().string();
  };
  Scenario s;
  if (!j.contains("instruction") || !j["instruction"].is_string()) {
    throw ConfigError("scenario '" + path + "' lacks 'instruction'");
  }
  s.instruction = j["instruction"].get<std::string>();
  s.scene_path = resolve("scene");
  s.transcript_path = resolve("transcript");
  s.options = j.value("options", json::object());
  return s;
}

}  // namespace qgpt
