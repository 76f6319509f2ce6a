#pragma once

// Top-down semantic instance map and the object/terrain instance memory.
//
// The map is a K x M x M integer grid, K = C + 3: channels 0..C-1 hold the
// owning instance id (from 1) per category, channel C marks explored cells,
// C+1 the current agent cell and C+2 every visited cell. Row index follows
// +y and column index +x, with the world origin at cell (M/2, M/2).

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qgpt {

inline constexpr double kDefaultCellSize = 0.05;
inline constexpr int kDefaultMapSize = 480;
inline constexpr double kHeightBinSize = 0.05;
inline constexpr double kMaxPointHeight = 2.0;
inline constexpr int kDefaultDilation = 3;

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};
using CellSet = std::set<Cell>;

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;  // rad, 0 = east (+x)
};

struct LabeledPoint {
  double x = 0.0, y = 0.0, z = 0.0;  // world frame, m
  int category = 0;
  int view = 0;  // instance-view id from the segmenter; informational
};

// Sector-shaped field of view used to mark explored cells.
struct SensorModel {
  double range = 3.0;         // m
  double fov = 1.5707963267948966;  // rad, full opening angle

  static SensorModel FromJson(const nlohmann::json& j);
};

// Map-space bounding rectangle of a detection plus the frame it came from;
// stands in for the image-space box of a real segmenter.
struct ViewRef {
  int frame = 0;
  int row0 = 0, col0 = 0, row1 = 0, col1 = 0;
  auto operator<=>(const ViewRef&) const = default;
};

struct Detection {
  ViewRef view;
  int category = 0;
  CellSet cells;
  CellSet dilated;
};

struct InstanceRecord {
  int id = 0;
  int category = 0;
  CellSet cells;
  std::set<ViewRef> views;

  bool operator==(const InstanceRecord&) const = default;
};

class InstanceMemory {
 public:
  const std::vector<InstanceRecord>& instances() const { return instances_; }
  std::size_t size() const { return instances_.size(); }

  const InstanceRecord* Find(int id) const;
  InstanceRecord* Find(int id);
  // New record with the next id (ids start at 1).
  InstanceRecord& Create(int category, CellSet cells, const ViewRef& view);

  bool operator==(const InstanceMemory&) const = default;

 private:
  std::vector<InstanceRecord> instances_;
};

class SemanticMap {
 public:
  explicit SemanticMap(std::vector<std::string> categories,
                       int size = kDefaultMapSize, double cell_size = kDefaultCellSize);

  int size() const { return size_; }
  double cell_size() const { return cell_size_; }
  int num_categories() const { return static_cast<int>(categories_.size()); }
  int num_channels() const { return num_categories() + 3; }
  int explored_channel() const { return num_categories(); }
  int current_channel() const { return num_categories() + 1; }
  int past_channel() const { return num_categories() + 2; }
  const std::vector<std::string>& categories() const { return categories_; }

  std::optional<int> CategoryIndex(std::string_view name) const;
  // Appends a category channel, keeping existing contents; returns its
  // index. Existing names return their current index.
  int AddCategory(const std::string& name);

  bool InBounds(const Cell& c) const {
    return c.row >= 0 && c.col >= 0 && c.row < size_ && c.col < size_;
  }
  // Throws std::out_of_range when the point lies outside the map.
  Cell WorldToCell(double x, double y) const;
  std::optional<Cell> TryWorldToCell(double x, double y) const;
  // World coordinates of the lower-left corner of a cell.
  double CellX(int col) const { return (col - size_ / 2) * cell_size_; }
  double CellY(int row) const { return (row - size_ / 2) * cell_size_; }
  // Cell centre.
  double CenterX(int col) const { return CellX(col) + 0.5 * cell_size_; }
  double CenterY(int row) const { return CellY(row) + 0.5 * cell_size_; }

  std::int32_t at(int channel, const Cell& c) const {
    return data_[Index(channel, c)];
  }
  std::int32_t& at(int channel, const Cell& c) { return data_[Index(channel, c)]; }

  bool Explored(const Cell& c) const { return at(explored_channel(), c) != 0; }
  std::optional<Cell> CurrentCell() const { return current_; }

  // Moves the agent marker; the past channel keeps every visited cell.
  void SetAgent(const Pose& pose);

  // Greyscale rendering of one channel (non-zero = white), top row = max y.
  std::string ChannelPgm(int channel) const;

  bool operator==(const SemanticMap&) const = default;

 private:
  std::size_t Index(int channel, const Cell& c) const {
    return (static_cast<std::size_t>(channel) * size_ + c.row) * size_ + c.col;
  }

  std::vector<std::string> categories_;
  int size_;
  double cell_size_;
  std::vector<std::int32_t> data_;
  std::optional<Cell> current_;
};

// Bins the points into 5 cm height voxels (up to 2 m; lower points clamp to
// the first bin), sums over height, marks touched category cells with -1
// unless an instance already owns them, marks the sensor sector and touched
// cells explored, and moves the agent marker. Returns one detection per
// category and 8-connected component of touched cells, dilated by `p`.
// Points outside the map are dropped.
std::vector<Detection> ProjectFrame(SemanticMap& map, const std::vector<LabeledPoint>& cloud,
                                    const Pose& pose, int frame_index,
                                    const SensorModel& sensor = {},
                                    int p = kDefaultDilation);

// Chebyshev dilation by p cells; clipped to [0, size) when size > 0.
CellSet Dilate(const CellSet& cells, int p, int size = 0);

// Same-category instance with the largest |D_d ∩ C_i| > 0, ties to the
// lowest id.
std::optional<int> MatchDetection(const Detection& d, const InstanceMemory& memory);

// C_i ∪= C_d, M_i ∪= {I_d}. Throws std::invalid_argument on a class
// mismatch and std::out_of_range for an unknown id.
void Merge(int instance_id, const Detection& d, InstanceMemory& memory);

struct MappingOptions {
  int dilation = kDefaultDilation;
  SensorModel sensor;

  static MappingOptions FromJson(const nlohmann::json& j);
};

// ProjectFrame, then match/merge or create per detection, then writes owner
// ids into the category channels. Cells already owned by another instance
// of the same category stay with that owner, so instances partition the
// non-zero category cells.
std::vector<Detection> Ingest(SemanticMap& map, InstanceMemory& memory,
                              const std::vector<LabeledPoint>& cloud, const Pose& pose,
                              int frame_index, const MappingOptions& options = {});

// Mean cell coordinates (row, col) of an instance.
std::pair<double, double> Centroid(const InstanceRecord& instance);

struct SceneFrame {
  Pose pose;
  std::vector<LabeledPoint> points;
};

struct Scene {
  std::vector<std::string> categories;
  double cell_size = kDefaultCellSize;
  int size = kDefaultMapSize;
  SensorModel sensor;
  Pose start;
  std::vector<SceneFrame> frames;

  SemanticMap MakeMap() const { return SemanticMap(categories, size, cell_size); }
  // Every point of every frame.
  std::vector<LabeledPoint> AllPoints() const;
};

// Line-delimited JSON: a header {"categories", "cell_size", "M", optional
// "sensor" {range, fov}, optional "start" [x, y, yaw]} followed by one
// {"pose": [x, y, yaw], "points": [[x, y, z, category(, view)], ...]} per
// frame.
Scene ParseScene(std::string_view text);
Scene LoadScene(const std::string& path);

}  // namespace qgpt
