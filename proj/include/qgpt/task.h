#pragma once

// Long-horizon task reasoning: the model breaks an instruction into
// subgoals naming library skills, the executor runs them in order against
// the synthetic world, and each one is checked before the next starts.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgpt/llm_gateway.h"
#include "qgpt/llm_parsers.h"
#include "qgpt/locomotion.h"
#include "qgpt/navigation.h"
#include "qgpt/semantic_map.h"

namespace qgpt {

struct SkillParam {
  std::string name;
  std::string type = "string";  // only string arguments exist today
};

struct Skill {
  std::string name;
  std::vector<SkillParam> params;
  std::string doc;
};

class SkillLibrary {
 public:
  // sit_down, stand_up, squat_down, greet, switch_gait(terrain_description),
  // navigate_to(target), find(target), sit_next_to(target).
  static SkillLibrary Default();

  // Throws std::invalid_argument on a duplicate name.
  void Add(Skill skill);
  const Skill* Find(const std::string& name) const;
  const std::vector<Skill>& skills() const { return skills_; }
  std::vector<std::string> Names() const;
  // One "name(arg, ...): doc" line per skill, for prompts.
  std::string Docs() const;

 private:
  std::vector<Skill> skills_;
};

enum class SubgoalStatus { kPending, kRunning, kSucceeded, kFailed };
std::string_view StatusName(SubgoalStatus s);

struct Subgoal {
  std::string description;
  std::string skill;
  std::map<std::string, std::string> args;
  SubgoalStatus status = SubgoalStatus::kPending;

  bool operator==(const Subgoal&) const = default;
};

// Prompts with the instruction and the library docs; expects a JSON array
// of {"description", "skill", "args"}. Unknown skill names trigger one
// reprompt listing the valid names, then a ParseError naming the skill.
std::vector<Subgoal> Decompose(const std::string& instruction, const SkillLibrary& library,
                               Gateway& gateway, const PromptLibrary& prompts);

struct BoundSkill {
  const Skill* skill = nullptr;
  std::map<std::string, std::string> args;
};

// Exact name lookup plus argument validation; schema errors list the
// expected parameters.
BoundSkill RetrieveSkill(const Subgoal& subgoal, const SkillLibrary& library);

enum class Posture { kStanding, kSitting, kSquatting };
std::string_view PostureName(Posture p);

struct AgentState {
  Pose pose;
  Posture posture = Posture::kStanding;
  bool greeted = false;
  std::optional<BehaviorParams> behavior;  // set by switch_gait
};

struct TaskOptions {
  MappingOptions mapping;
  CostMapOptions costs;
  CostDomain cost_domain = CostDomain::kBinary;
  double success_radius = kSuccessRadius;
  int max_iterations = 60;  // plan/advance rounds per navigation subgoal
  int advance_cells = 40;   // cells travelled between re-observations

  static TaskOptions FromJson(const nlohmann::json& j);
};

// The synthetic world: a scene's points act as the environment; the agent
// observes whatever falls inside its sensor sector.
struct World {
  Scene scene;
  SemanticMap map;
  InstanceMemory memory;
  AgentState agent;
  int frames_seen = 0;
  long tick = 0;  // logical clock, advanced per action and per cell moved
  // Instances built from every scene point; used only for success checks.
  InstanceMemory truth;

  static World FromScene(const Scene& scene, const MappingOptions& mapping = {});
};

// Ingests one synthetic observation at the agent pose.
void Observe(World& world, const MappingOptions& mapping);

struct Verdict {
  bool succeeded = false;
  std::string reason;
};

struct TaskContext {
  Gateway& gateway;
  const PromptLibrary& prompts;
  const SkillLibrary& library;
  TaskOptions options = {};
};

// Geometric checks where ground truth exists (distance to the nearest
// true instance of the target category, posture after sit_next_to);
// otherwise the gateway is asked, and a gateway failure counts as failed.
Verdict EvaluateSuccess(const Subgoal& subgoal, const World& world, TaskContext& ctx);

struct TraceRecord {
  int index = 0;
  Subgoal subgoal;  // final status
  long tick_begin = 0;
  long tick_end = 0;
  Verdict verdict;
  nlohmann::json details;  // skill-specific: path length, gait segments, ...
};

struct ExecutionTrace {
  std::vector<TraceRecord> records;
  std::vector<Subgoal> plan;  // statuses after execution
  bool task_complete = false;

  std::string ToJsonl() const;
};

// Runs subgoals in order, halting at the first failure (later subgoals
// stay pending). A world error inside a skill fails that subgoal.
ExecutionTrace Execute(std::vector<Subgoal> plan, World& world, TaskContext& ctx);

// {"instruction", "scene", "transcript", optional "options"}; paths are
// relative to the scenario file.
struct Scenario {
  std::string instruction;
  std::string scene_path;
  std::string transcript_path;
  nlohmann::json options;

  static Scenario Load(const std::string& path);
};

}  // namespace qgpt
