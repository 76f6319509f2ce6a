#include "qgpt/navigation.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "qgpt/errors.h"
#include "qgpt/io.h"

namespace qgpt {

using nlohmann::json;

namespace {

double WrapAngle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}


}  // namespace

CostAssignment AssignCosts(const std::string& instruction,
                           const std::vector<std::string>& observed_categories,
                           Gateway& gateway, const PromptLibrary& prompts,
                           CostDomain domain) {
  if (observed_categories.empty()) {
    throw std::invalid_argument("cost assignment needs at least one observed category");
  }
  ChatRequest request;
  request.template_id = "cost_map";
  request.user = prompts.Render("cost_map", {{"instruction", instruction}});
  request.temperature = kParsingTemperature;

  CostAssignment out;
  const std::string reply = gateway.CompleteOne(request);
  try {
    out = ParseCostJson(reply, domain);
  } catch (const ParseError& e) {
    ChatRequest retry = request;
    retry.user += "\n\nYour previous answer could not be used (" + std::string(e.what()) +
                  "). Reply with one JSON object following the example exactly.";
    out = ParseCostJson(gateway.CompleteOne(retry), domain);
  }
  for (const auto& name : observed_categories) {
    if (name == out.target_object || out.IsObstacle(name) || out.FindTerrain(name)) continue;
    out.terrain.push_back({name, 0.5, 0});
  }
  return out;
}

CostMapOptions CostMapOptions::FromJson(const json& j) {
  CostMapOptions o;
  o.unexplored_cost = j.value("unexplored_cost", o.unexplored_cost);
  o.default_category_cost = j.value("default_category_cost", o.default_category_cost);
  o.no_cost = j.value("no_cost", o.no_cost);
  for (double v : {o.unexplored_cost, o.default_category_cost}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("costs must lie in [0, 1]");
  }
  return o;
}

CostMap::CostMap(int size, double cell_size)
    : size_(size),
      cell_size_(cell_size),
      cost_(static_cast<std::size_t>(size) * size, 0.0),
      gait_(static_cast<std::size_t>(size) * size, 0) {
  if (size <= 0) throw std::invalid_argument("cost map size must be positive");
  if (!(cell_size > 0)) throw std::invalid_argument("cell size must be positive");
}

double CostMap::Speed(const Cell& c) const {
  return std::clamp(1.0 - cost(c), kSpeedFloor, 1.0);
}

std::string CostMap::ToPgm() const {
  std::vector<std::uint8_t> pixels;
  pixels.reserve(cost_.size());
  for (int r = size_ - 1; r >= 0; --r) {
    for (int c = 0; c < size_; ++c) {
      pixels.push_back(static_cast<std::uint8_t>(
          std::lround(std::clamp(cost({r, c}), 0.0, 1.0) * 255.0)));
    }
  }
  return EncodePgm(size_, size_, pixels);
}

std::string CostMap::ToCsv() const {
  std::string out;
  for (int r = 0; r < size_; ++r) {
    for (int c = 0; c < size_; ++c) {
      if (c) out += ',';
      out += FormatFixed(cost({r, c}), 3);
    }
    out += '\n';
  }
  return out;
}

CostMap BuildCostMap(const SemanticMap& map, const CostAssignment& assignment,
                     const CostMapOptions& options) {
  CostMap cm(map.size(), map.cell_size());
  if (options.no_cost) return cm;

  const int n = map.num_categories();
  std::vector<double> category_cost(n, options.default_category_cost);
  std::vector<std::uint8_t> category_gait(n, 0);
  for (int k = 0; k < n; ++k) {
    const std::string& name = map.categories()[k];
    if (const TerrainCost* t = assignment.FindTerrain(name)) {
      category_cost[k] = t->cost;
      category_gait[k] = static_cast<std::uint8_t>(t->gait);
    }
    if (name == assignment.target_object) category_cost[k] = 0.0;
    if (assignment.IsObstacle(name)) category_cost[k] = 1.0;
  }

  for (int r = 0; r < map.size(); ++r) {
    for (int c = 0; c < map.size(); ++c) {
      const Cell cell{r, c};
      int dominant = -1;
      for (int k = 0; k < n; ++k) {
        if (map.at(k, cell) == 0) continue;
        if (dominant < 0 || category_cost[k] > category_cost[dominant]) dominant = k;
      }
      if (dominant >= 0) {
        cm.cost(cell) = category_cost[dominant];
        cm.gait(cell) = category_gait[dominant];
      } else {
        cm.cost(cell) = map.Explored(cell) ? 0.0 : options.unexplored_cost;
      }
    }
  }
  return cm;
}

std::string ArrivalField::ToCsv() const {
  std::string out;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      if (c) out += ',';
      const double t = at({r, c});
      out += std::isinf(t) ? "inf" : FormatFixed(t, 4);
    }
    out += '\n';
  }
  return out;
}

ArrivalField FmmSolve(const CostMap& costmap, const Cell& goal) {
  if (!costmap.InBounds(goal)) throw std::invalid_argument("goal outside the cost map");
  if (costmap.Obstacle(goal)) throw std::invalid_argument("goal lies on an obstacle cell");
  const int n = costmap.size();
  const double h = costmap.cell_size();
  ArrivalField field{n, h, std::vector<double>(static_cast<std::size_t>(n) * n, kInf)};
  std::vector<std::uint8_t> known(field.time.size(), 0);
  auto idx = [n](const Cell& c) { return static_cast<std::size_t>(c.row) * n + c.col; };
  auto known_time = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= n || c >= n) return kInf;
    const std::size_t i = static_cast<std::size_t>(r) * n + c;
    return known[i] ? field.time[i] : kInf;
  };

  auto blocked = [&](int r, int c) { return !costmap.InBounds({r, c}) || costmap.Obstacle({r, c}); };
  // Diagonal neighbour time, usable only when both side cells are free.
  auto diag_time = [&](const Cell& at, int dr, int dc) {
    if (blocked(at.row + dr, at.col) || blocked(at.row, at.col + dc)) return kInf;
    return known_time(at.row + dr, at.col + dc);
  };
  // Upwind update from one neighbour time per axis, grid spacing folded into `a`.
  auto solve = [](double t1, double t2, double a) {
    const double lo = std::min(t1, t2), hi = std::max(t1, t2);
    if (std::isinf(lo)) return kInf;
    if (!std::isinf(hi) && hi - lo < a) {
      return 0.5 * (lo + hi + std::sqrt(2.0 * a * a - (hi - lo) * (hi - lo)));
    }
    return lo + a;
  };

  using Entry = std::tuple<double, int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  field.time[idx(goal)] = 0.0;
  heap.push({0.0, goal.row, goal.col});
  while (!heap.empty()) {
    const auto [t, r, c] = heap.top();
    heap.pop();
    const std::size_t i = idx({r, c});
    if (known[i]) continue;
    known[i] = 1;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell nb{r + dr, c + dc};
        if ((!dr && !dc) || blocked(nb.row, nb.col) || known[idx(nb)]) continue;
        if (dr && dc && (blocked(r, nb.col) || blocked(nb.row, c))) continue;
        const double a = h / costmap.Speed(nb);
        const double axis =
            solve(std::min(known_time(nb.row, nb.col - 1), known_time(nb.row, nb.col + 1)),
                  std::min(known_time(nb.row - 1, nb.col), known_time(nb.row + 1, nb.col)), a);
        const double diag = solve(std::min(diag_time(nb, -1, -1), diag_time(nb, 1, 1)),
                                  std::min(diag_time(nb, -1, 1), diag_time(nb, 1, -1)),
                                  a * std::sqrt(2.0));
        const double cand = std::min(axis, diag);
        if (cand < field.time[idx(nb)]) {
          field.time[idx(nb)] = cand;
          heap.push({cand, nb.row, nb.col});
        }
      }
    }
  }
  return field;
}

json PathPlan::ToJson() const {
  json waypoints = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    waypoints.push_back({{"row", cells[i].row},
                         {"col", cells[i].col},
                         {"x", world[i].first},
                         {"y", world[i].second}});
  }
  json offs = json::array();
  for (const auto& o : offsets) offs.push_back({o.dx, o.dy, o.dyaw});
  return {{"waypoints", waypoints},
          {"gait_flags", gait_flags},
          {"offsets", offs},
          {"arrival_time", arrival_time}};
}

PathPlan ExtractPath(const ArrivalField& field, const Cell& start, const CostMap& costmap,
                     double start_yaw) {
  if (!costmap.InBounds(start)) throw std::invalid_argument("start outside the cost map");
  if (costmap.Obstacle(start)) throw std::invalid_argument("start lies on an obstacle cell");
  if (std::isinf(field.at(start))) {
    throw UnreachableError("goal is unreachable from (" + std::to_string(start.row) + ", " +
                           std::to_string(start.col) + ")");
  }
  PathPlan plan;
  plan.arrival_time = field.at(start);
  Cell cur = start;
  plan.cells.push_back(cur);
  while (field.at(cur) > 0.0) {
    std::optional<Cell> best;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const Cell nb{cur.row + dr, cur.col + dc};
        if (!costmap.InBounds(nb) || costmap.Obstacle(nb)) continue;
        if (dr != 0 && dc != 0 &&
            (costmap.Obstacle({cur.row + dr, cur.col}) ||
             costmap.Obstacle({cur.row, cur.col + dc}))) {
          continue;
        }
        if (!best || field.at(nb) < field.at(*best)) best = nb;
      }
    }
    if (!best || !(field.at(*best) < field.at(cur))) {
      throw Error("path descent stalled at (" + std::to_string(cur.row) + ", " +
                  std::to_string(cur.col) + ")");
    }
    cur = *best;
    plan.cells.push_back(cur);
  }

  double heading = start_yaw;
  for (const Cell& c : plan.cells) {
    plan.world.emplace_back(costmap.CenterX(c.col), costmap.CenterY(c.row));
  }
  for (std::size_t i = 1; i < plan.cells.size(); ++i) {
    const double dx = plan.world[i].first - plan.world[i - 1].first;
    const double dy = plan.world[i].second - plan.world[i - 1].second;
    const double next = std::atan2(dy, dx);
    plan.offsets.push_back({dx, dy, WrapAngle(next - heading)});
    heading = next;
    plan.gait_flags.push_back(costmap.gait(plan.cells[i]));
  }
  return plan;
}

bool IsFrontier(const SemanticMap& map, const CostMap& costmap, const Cell& c) {
  if (!map.Explored(c) || costmap.Obstacle(c)) return false;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const Cell nb{c.row + dr, c.col + dc};
      if ((dr || dc) && map.InBounds(nb) && !map.Explored(nb)) return true;
    }
  }
  return false;
}

Cell FrontierGoal(const SemanticMap& map, const CostMap& costmap, const Cell& start) {
  const ArrivalField field = FmmSolve(costmap, start);
  std::optional<Cell> best;
  for (int r = 0; r < map.size(); ++r) {
    for (int c = 0; c < map.size(); ++c) {
      const Cell cell{r, c};
      const double t = field.at(cell);
      if (std::isinf(t) || !IsFrontier(map, costmap, cell)) continue;
      if (!best || t < field.at(*best)) best = cell;
    }
  }
  if (!best) throw ExplorationComplete("no reachable frontier cell remains");
  return *best;
}

Cell SnapToFree(const CostMap& costmap, double row, double col) {
  std::optional<Cell> best;
  double best_d = kInf;
  for (int r = 0; r < costmap.size(); ++r) {
    for (int c = 0; c < costmap.size(); ++c) {
      if (costmap.Obstacle({r, c})) continue;
      const double d = (r - row) * (r - row) + (c - col) * (c - col);
      if (d < best_d) {
        best_d = d;
        best = Cell{r, c};
      }
    }
  }
  if (!best) throw UnreachableError("the cost map has no free cell");
  return *best;
}

GoalChoice GlobalGoal(const std::variant<std::string, int>& goal,
                      const InstanceMemory& memory, const SemanticMap& map,
                      const CostMap& costmap, const Cell& start) {
  bool any_explored = false;
  for (int r = 0; r < map.size() && !any_explored; ++r) {
    for (int c = 0; c < map.size(); ++c) {
      if (map.Explored({r, c})) {
        any_explored = true;
        break;
      }
    }
  }
  if (!any_explored) throw std::invalid_argument("the map has no explored cell yet");

  const InstanceRecord* chosen = nullptr;
  if (const int* id = std::get_if<int>(&goal)) {
    chosen = memory.Find(*id);
    if (!chosen) throw std::out_of_range("no instance with id " + std::to_string(*id));
  } else if (auto category = map.CategoryIndex(std::get<std::string>(goal))) {
    double best_d = kInf;
    for (const auto& inst : memory.instances()) {
      if (inst.category != *category || inst.cells.empty()) continue;
      const auto [r, c] = Centroid(inst);
      const double d = (r - start.row) * (r - start.row) + (c - start.col) * (c - start.col);
      if (d < best_d) {
        best_d = d;
        chosen = &inst;
      }
    }
  }
  if (!chosen) return {FrontierGoal(map, costmap, start), std::nullopt};
  const auto [r, c] = Centroid(*chosen);
  return {SnapToFree(costmap, r, c), chosen->id};
}

PlanResult PlanScene(const Scene& scene, const std::string& instruction, Gateway& gateway,
                     const PromptLibrary& prompts, const PlanOptions& options) {
  SemanticMap map = scene.MakeMap();
  InstanceMemory memory;
  MappingOptions mapping = options.mapping;
  mapping.sensor = scene.sensor;
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    Ingest(map, memory, scene.frames[i].points, scene.frames[i].pose, static_cast<int>(i),
           mapping);
  }
  CostAssignment assignment =
      AssignCosts(instruction, map.categories(), gateway, prompts, options.cost_domain);
  CostMap costmap = BuildCostMap(map, assignment, options.costs);
  const Cell start = map.WorldToCell(scene.start.x, scene.start.y);
  const GoalChoice goal = GlobalGoal(assignment.target_object, memory, map, costmap, start);
  ArrivalField field = FmmSolve(costmap, goal.cell);

  PlanResult result{std::move(assignment), std::move(costmap), std::move(field),
                    std::nullopt, goal, false, kInf, ""};
  if (!goal.instance_id) {
    result.message = "target '" + result.assignment.target_object +
                     "' is not in the map; goal is an exploration frontier";
  }
  try {
    result.path = ExtractPath(result.field, start, result.costmap, scene.start.yaw);
  } catch (const UnreachableError& e) {
    result.message = e.what();
    return result;
  }
  if (goal.instance_id) {
    const auto [r, c] = Centroid(*memory.Find(*goal.instance_id));
    const auto [x, y] = result.path->world.back();
    result.distance = std::hypot(x - (c - map.size() / 2 + 0.5) * map.cell_size(),
                                 y - (r - map.size() / 2 + 0.5) * map.cell_size());
    result.reached = result.distance <= options.success_radius;
    if (result.message.empty()) result.message = result.reached ? "reached" : "stopped short";
  }
  return result;
}

}  // namespace qgpt
