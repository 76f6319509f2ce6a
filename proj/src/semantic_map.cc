#include "qgpt/semantic_map.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "qgpt/errors.h"
#include "qgpt/io.h"
#include "qgpt/llm_gateway.h"

namespace qgpt {

using nlohmann::json;

namespace {

double WrapAngle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

}  // namespace

SensorModel SensorModel::FromJson(const json& j) {
  SensorModel s;
  s.range = j.value("range", s.range);
  s.fov = j.value("fov", s.fov);
  if (!(s.range > 0) || !(s.fov > 0)) {
    throw ConfigError("sensor range and fov must be positive");
  }
  return s;
}

const InstanceRecord* InstanceMemory::Find(int id) const {
  for (const auto& r : instances_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

InstanceRecord* InstanceMemory::Find(int id) {
  for (auto& r : instances_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

InstanceRecord& InstanceMemory::Create(int category, CellSet cells, const ViewRef& view) {
  InstanceRecord r;
  r.id = static_cast<int>(instances_.size()) + 1;
  r.category = category;
  r.cells = std::move(cells);
  r.views.insert(view);
  instances_.push_back(std::move(r));
  return instances_.back();
}

SemanticMap::SemanticMap(std::vector<std::string> categories, int size, double cell_size)
    : categories_(std::move(categories)), size_(size), cell_size_(cell_size) {
  if (size_ <= 0 || size_ % 2 != 0) {
    throw std::invalid_argument("map size must be a positive even cell count");
  }
  if (!(cell_size_ > 0)) throw std::invalid_argument("cell size must be positive");
  data_.assign(static_cast<std::size_t>(num_channels()) * size_ * size_, 0);
}

std::optional<int> SemanticMap::CategoryIndex(std::string_view name) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

int SemanticMap::AddCategory(const std::string& name) {
  if (auto i = CategoryIndex(name)) return *i;
  const std::size_t plane = static_cast<std::size_t>(size_) * size_;
  const std::size_t c = categories_.size();
  // The new category channel goes in front of the three bookkeeping ones.
  data_.insert(data_.begin() + static_cast<std::ptrdiff_t>(c * plane), plane, 0);
  categories_.push_back(name);
  return static_cast<int>(c);
}

std::optional<Cell> SemanticMap::TryWorldToCell(double x, double y) const {
  if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  const Cell c{static_cast<int>(std::floor(y / cell_size_ + 1e-9)) + size_ / 2,
               static_cast<int>(std::floor(x / cell_size_ + 1e-9)) + size_ / 2};
  if (!InBounds(c)) return std::nullopt;
  return c;
}

Cell SemanticMap::WorldToCell(double x, double y) const {
  auto c = TryWorldToCell(x, y);
  if (!c) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ") lies outside the map";
    throw std::out_of_range(msg.str());
  }
  return *c;
}

void SemanticMap::SetAgent(const Pose& pose) {
  const Cell c = WorldToCell(pose.x, pose.y);
  if (current_) at(current_channel(), *current_) = 0;
  at(current_channel(), c) = 1;
  at(past_channel(), c) = 1;
  current_ = c;
}

std::string SemanticMap::ChannelPgm(int channel) const {
  if (channel < 0 || channel >= num_channels()) throw std::out_of_range("bad channel");
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(size_) * size_);
  for (int r = size_ - 1; r >= 0; --r) {
    for (int c = 0; c < size_; ++c) pixels.push_back(at(channel, {r, c}) != 0 ? 255 : 0);
  }
  return EncodePgm(size_, size_, pixels);
}

CellSet Dilate(const CellSet& cells, int p, int size) {
  if (p < 0) throw std::invalid_argument("dilation radius must be >= 0");
  if (p == 0) return cells;
  CellSet out;
  for (const Cell& c : cells) {
    for (int dr = -p; dr <= p; ++dr) {
      for (int dc = -p; dc <= p; ++dc) {
        const Cell n{c.row + dr, c.col + dc};
        if (size > 0 && (n.row < 0 || n.col < 0 || n.row >= size || n.col >= size)) {
          continue;
        }
        out.insert(n);
      }
    }
  }
  return out;
}

std::vector<Detection> ProjectFrame(SemanticMap& map, const std::vector<LabeledPoint>& cloud,
                                    const Pose& pose, int frame_index,
                                    const SensorModel& sensor, int p) {
  if (!std::isfinite(pose.x) || !std::isfinite(pose.y) || !std::isfinite(pose.yaw)) {
    throw std::invalid_argument("pose must be finite");
  }
  const int num_bins = static_cast<int>(std::lround(kMaxPointHeight / kHeightBinSize));
  std::set<std::tuple<int, Cell, int>> voxels;  // (category, cell, height bin)
  for (const LabeledPoint& pt : cloud) {
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z)) {
      throw std::invalid_argument("point coordinates must be finite");
    }
    if (pt.category < 0 || pt.category >= map.num_categories()) {
      throw std::invalid_argument("point category " + std::to_string(pt.category) +
                                  " outside [0, " +
                                  std::to_string(map.num_categories()) + ")");
    }
    if (pt.z > kMaxPointHeight) continue;
    auto cell = map.TryWorldToCell(pt.x, pt.y);
    if (!cell) continue;
    const int bin = std::clamp(static_cast<int>(std::floor(pt.z / kHeightBinSize)), 0,
                               num_bins - 1);
    voxels.insert({pt.category, *cell, bin});
  }

  // Vertical sum: a (category, cell) is supported when any of its bins is.
  std::map<int, CellSet> touched;
  for (const auto& [category, cell, bin] : voxels) touched[category].insert(cell);

  for (const auto& [category, cells] : touched) {
    for (const Cell& c : cells) {
      std::int32_t& v = map.at(category, c);
      if (v == 0) v = -1;
      map.at(map.explored_channel(), c) = 1;
    }
  }

  // Sensor sector around the agent.
  const Cell here = map.WorldToCell(pose.x, pose.y);
  const int reach = static_cast<int>(std::ceil(sensor.range / map.cell_size())) + 1;
  for (int r = here.row - reach; r <= here.row + reach; ++r) {
    for (int c = here.col - reach; c <= here.col + reach; ++c) {
      const Cell cell{r, c};
      if (!map.InBounds(cell)) continue;
      const double dx = map.CenterX(c) - pose.x;
      const double dy = map.CenterY(r) - pose.y;
      const double dist = std::hypot(dx, dy);
      if (dist > sensor.range) continue;
      const bool inside = cell == here || sensor.fov >= 2.0 * std::numbers::pi ||
                          std::abs(WrapAngle(std::atan2(dy, dx) - pose.yaw)) <=
                              0.5 * sensor.fov + 1e-12;
      if (inside) map.at(map.explored_channel(), cell) = 1;
    }
  }
  map.SetAgent(pose);

  std::vector<Detection> detections;
  for (const auto& [category, cells] : touched) {
    CellSet remaining = cells;
    while (!remaining.empty()) {
      Detection d;
      d.category = category;
      std::deque<Cell> queue = {*remaining.begin()};
      remaining.erase(remaining.begin());
      while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        d.cells.insert(c);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            auto it = remaining.find({c.row + dr, c.col + dc});
            if (it == remaining.end()) continue;
            queue.push_back(*it);
            remaining.erase(it);
          }
        }
      }
      d.view = {frame_index, d.cells.begin()->row, std::numeric_limits<int>::max(),
                d.cells.rbegin()->row, std::numeric_limits<int>::min()};
      for (const Cell& c : d.cells) {
        d.view.col0 = std::min(d.view.col0, c.col);
        d.view.col1 = std::max(d.view.col1, c.col);
      }
      d.dilated = Dilate(d.cells, p, map.size());
      detections.push_back(std::move(d));
    }
  }
  return detections;
}

std::optional<int> MatchDetection(const Detection& d, const InstanceMemory& memory) {
  std::optional<int> best;
  std::size_t best_overlap = 0;
  for (const InstanceRecord& inst : memory.instances()) {
    if (inst.category != d.category) continue;
    std::size_t overlap = 0;
    const CellSet& small = d.dilated.size() < inst.cells.size() ? d.dilated : inst.cells;
    const CellSet& large = &small == &d.dilated ? inst.cells : d.dilated;
    for (const Cell& c : small) overlap += large.count(c);
    if (overlap > best_overlap || (overlap > 0 && overlap == best_overlap && inst.id < *best)) {
      best = inst.id;
      best_overlap = overlap;
    }
  }
  return best;
}

void Merge(int instance_id, const Detection& d, InstanceMemory& memory) {
  InstanceRecord* inst = memory.Find(instance_id);
  if (!inst) throw std::out_of_range("no instance with id " + std::to_string(instance_id));
  if (inst->category != d.category) {
    throw std::invalid_argument("cannot merge a category " + std::to_string(d.category) +
                                " detection into category " +
                                std::to_string(inst->category) + " instance " +
                                std::to_string(instance_id));
  }
  inst->cells.insert(d.cells.begin(), d.cells.end());
  inst->views.insert(d.view);
}

MappingOptions MappingOptions::FromJson(const json& j) {
  MappingOptions o;
  o.dilation = j.value("dilation", o.dilation);
  if (o.dilation < 0) throw ConfigError("dilation must be >= 0");
  if (j.contains("sensor")) o.sensor = SensorModel::FromJson(j["sensor"]);
  return o;
}

std::vector<Detection> Ingest(SemanticMap& map, InstanceMemory& memory,
                              const std::vector<LabeledPoint>& cloud, const Pose& pose,
                              int frame_index, const MappingOptions& options) {
  std::vector<Detection> detections =
      ProjectFrame(map, cloud, pose, frame_index, options.sensor, options.dilation);
  for (const Detection& d : detections) {
    const std::optional<int> match = MatchDetection(d, memory);
    Detection own = d;
    own.cells.clear();
    for (const Cell& c : d.cells) {
      const std::int32_t owner = map.at(d.category, c);
      if (owner <= 0 || (match && owner == *match)) own.cells.insert(c);
    }
    int id;
    if (match) {
      Merge(*match, own, memory);
      id = *match;
    } else {
      id = memory.Create(d.category, own.cells, d.view).id;
    }
    for (const Cell& c : own.cells) map.at(d.category, c) = id;
  }
  return detections;
}

std::pair<double, double> Centroid(const InstanceRecord& instance) {
  if (instance.cells.empty()) throw std::invalid_argument("instance has no cells");
  double r = 0.0, c = 0.0;
  for (const Cell& cell : instance.cells) {
    r += cell.row;
    c += cell.col;
  }
  const double n = static_cast<double>(instance.cells.size());
  return {r / n, c / n};
}

std::vector<LabeledPoint> Scene::AllPoints() const {
  std::vector<LabeledPoint> out;
  for (const auto& f : frames) out.insert(out.end(), f.points.begin(), f.points.end());
  return out;
}

namespace {

Pose PoseFromJson(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("pose must be [x, y, yaw]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Scene ParseScene(std::string_view text) {
  Scene scene;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        scene.categories = j.at("categories").get<std::vector<std::string>>();
        scene.cell_size = j.value("cell_size", kDefaultCellSize);
        scene.size = j.value("M", kDefaultMapSize);
        if (j.contains("sensor")) scene.sensor = SensorModel::FromJson(j["sensor"]);
        if (j.contains("start")) scene.start = PoseFromJson(j["start"]);
        if (scene.categories.empty()) throw ParseError("scene declares no categories");
        have_header = true;
        continue;
      }
      SceneFrame f;
      f.pose = PoseFromJson(j.at("pose"));
      for (const auto& p : j.at("points")) {
        if (!p.is_array() || p.size() < 4 || p.size() > 5) {
          throw ParseError("points must be [x, y, z, category(, view)]");
        }
        LabeledPoint pt{p[0].get<double>(), p[1].get<double>(), p[2].get<double>(),
                        p[3].get<int>(), p.size() == 5 ? p[4].get<int>() : 0};
        if (pt.category < 0 || pt.category >= static_cast<int>(scene.categories.size())) {
          throw ParseError("category id " + std::to_string(pt.category) + " out of range");
        }
        f.points.push_back(pt);
      }
      scene.frames.push_back(std::move(f));
    } catch (const json::exception& e) {
      throw ParseError("scene line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("scene line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError("scene file is empty");
  return scene;
}

Scene LoadScene(const std::string& path) { return ParseScene(ReadFile(path)); }

}  // namespace qgpt
