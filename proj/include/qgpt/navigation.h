#pragma once

// Goal selection (memory lookup, else frontier exploration) and local
// planning (model-assigned category costs -> cost map -> fast marching ->
// waypoints and positional offsets).

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qgpt/llm_gateway.h"
#include "qgpt/llm_parsers.h"
#include "qgpt/semantic_map.h"

namespace qgpt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSpeedFloor = 0.05;
inline constexpr double kSuccessRadius = 0.5;  // m

// Issues the cost prompt with `instruction` substituted and parses the JSON
// reply (one corrective retry). Observed categories the reply does not
// mention are added with cost 0.5 and gait 0.
CostAssignment AssignCosts(const std::string& instruction,
                           const std::vector<std::string>& observed_categories,
                           Gateway& gateway, const PromptLibrary& prompts,
                           CostDomain domain = CostDomain::kBinary);

struct CostMapOptions {
  double unexplored_cost = 0.5;
  double default_category_cost = 0.5;
  bool no_cost = false;  // ablation: every cell costs 0

  static CostMapOptions FromJson(const nlohmann::json& j);
};

class CostMap {
 public:
  CostMap(int size, double cell_size);

  int size() const { return size_; }
  double cell_size() const { return cell_size_; }
  bool InBounds(const Cell& c) const {
    return c.row >= 0 && c.col >= 0 && c.row < size_ && c.col < size_;
  }
  double cost(const Cell& c) const { return cost_[Index(c)]; }
  double& cost(const Cell& c) { return cost_[Index(c)]; }
  int gait(const Cell& c) const { return gait_[Index(c)]; }
  std::uint8_t& gait(const Cell& c) { return gait_[Index(c)]; }
  bool Obstacle(const Cell& c) const { return cost(c) >= 1.0; }
  // F = clamp(1 - cost, speed floor, 1).
  double Speed(const Cell& c) const;
  // World coordinates of a cell centre, same convention as SemanticMap.
  double CenterX(int col) const { return (col - size_ / 2 + 0.5) * cell_size_; }
  double CenterY(int row) const { return (row - size_ / 2 + 0.5) * cell_size_; }

  std::string ToPgm() const;  // cost 0..1 -> 0..255, top row = max y
  std::string ToCsv() const;  // rows bottom-up, %.3f

 private:
  std::size_t Index(const Cell& c) const {
    return static_cast<std::size_t>(c.row) * size_ + c.col;
  }
  int size_;
  double cell_size_;
  std::vector<double> cost_;
  std::vector<std::uint8_t> gait_;
};

// Per cell: unexplored -> unexplored_cost; explored with no category ->
// 0; otherwise the maximum over present categories of their cost, where
// obstacle categories cost 1 and the target category costs 0. The gait
// flag is that of the costliest present category (lowest channel on ties).
CostMap BuildCostMap(const SemanticMap& map, const CostAssignment& assignment,
                     const CostMapOptions& options = {});

struct ArrivalField {
  int size = 0;
  double cell_size = 0.0;
  std::vector<double> time;  // +inf where unreachable

  double at(const Cell& c) const {
    return time[static_cast<std::size_t>(c.row) * size + c.col];
  }
  std::string ToCsv() const;  // "inf" for unreachable cells
};

// First-order upwind fast marching. Each update takes the smaller of the
// axis stencil and the 45-degree stencil (spacing h*sqrt(2)); a diagonal
// neighbour counts only when both side cells are free. Obstacles never
// enter the queue. Throws std::invalid_argument when the goal is an
// obstacle or outside the grid.
ArrivalField FmmSolve(const CostMap& costmap, const Cell& goal);

struct Offset {
  double dx = 0.0, dy = 0.0, dyaw = 0.0;
};

struct PathPlan {
  std::vector<Cell> cells;
  std::vector<std::pair<double, double>> world;  // cell centres
  std::vector<int> gait_flags;                   // per segment, destination cell
  std::vector<Offset> offsets;                   // per segment
  double arrival_time = 0.0;                     // T at the start cell

  nlohmann::json ToJson() const;
};

// Steepest descent over the 8 neighbours of T (diagonal moves may not cut
// an obstacle corner) until T = 0. Headings start at `start_yaw`. Throws
// UnreachableError when T(start) is infinite.
PathPlan ExtractPath(const ArrivalField& field, const Cell& start, const CostMap& costmap,
                     double start_yaw = 0.0);

// Frontier: explored, non-obstacle cell with an unexplored 8-neighbour.
bool IsFrontier(const SemanticMap& map, const CostMap& costmap, const Cell& c);
// Reachable frontier cell of minimum arrival time from `start`, ties to
// the smallest (row, col). Throws ExplorationComplete when there is none.
Cell FrontierGoal(const SemanticMap& map, const CostMap& costmap, const Cell& start);

struct GoalChoice {
  Cell cell;
  std::optional<int> instance_id;  // empty when exploring
};

// Goal is a category name or an instance id. A known instance yields its
// centroid snapped to the nearest free cell (several instances of the
// category: nearest centroid to `start`, ties to the lowest id); otherwise
// FrontierGoal. Throws std::invalid_argument when nothing is explored.
GoalChoice GlobalGoal(const std::variant<std::string, int>& goal,
                      const InstanceMemory& memory, const SemanticMap& map,
                      const CostMap& costmap, const Cell& start);

// Nearest non-obstacle cell to a fractional (row, col), ties to the
// smallest (row, col).
Cell SnapToFree(const CostMap& costmap, double row, double col);

struct PlanResult {
  CostAssignment assignment;
  CostMap costmap;
  ArrivalField field;
  std::optional<PathPlan> path;  // empty when the goal is unreachable
  GoalChoice goal;
  bool reached = false;     // path ends within the success radius of the target
  double distance = kInf;   // path end to target centroid, m
  std::string message;
};

struct PlanOptions {
  MappingOptions mapping;
  CostMapOptions costs;
  CostDomain cost_domain = CostDomain::kBinary;
  double success_radius = kSuccessRadius;
};

// Ingests every frame of the scene, asks the model for category costs,
// and plans from the scene start to the instruction's target object.
PlanResult PlanScene(const Scene& scene, const std::string& instruction, Gateway& gateway,
                     const PromptLibrary& prompts, const PlanOptions& options = {});

}  // namespace qgpt
