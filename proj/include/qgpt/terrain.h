#pragma once

// Benchmark terrains as heightfields plus simple geometric queries.
//
// The raw parameter values keep the simulator sign convention (negative
// slope = uphill, negative step height = ascending stairs); heights in the
// generated field are world-frame, so uphill rises along +x. Profiles depend
// on x only and are mirrored along -x.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qgpt {

enum class TerrainKind {
  kUphillSlope = 0,
  kDownhillSlope = 1,
  kUpsideStair = 2,
  kDownsideStair = 3,
  kUnevenGround = 4,
};
inline constexpr TerrainKind kAllTerrains[] = {
    TerrainKind::kUphillSlope, TerrainKind::kDownhillSlope,
    TerrainKind::kUpsideStair, TerrainKind::kDownsideStair,
    TerrainKind::kUnevenGround};

std::string_view TerrainName(TerrainKind kind);   // "uphill_slope", ...
std::string_view TerrainLabel(TerrainKind kind);  // "Uphill Slope", ...
std::optional<TerrainKind> ParseTerrainName(std::string_view name);

struct TerrainSpec {
  TerrainKind kind = TerrainKind::kUphillSlope;
  double slope = 0.0;          // raw, dimensionless
  double platform_size = 0.0;  // m, side of the flat central square
  double step_width = 0.0;     // m
  double step_height = 0.0;    // raw, m
  double min_height = 0.0;     // m
  double max_height = 0.0;     // m
  std::uint64_t seed = 0;

  // Published parameter set for each terrain.
  static TerrainSpec Default(TerrainKind kind, std::uint64_t seed = 0);
  // Overrides from {"slope": .., "platform_size": .., ...} on top of Default.
  static TerrainSpec FromJson(TerrainKind kind, const nlohmann::json& j);

  void Validate() const;
  // Natural-language description handed to the language model.
  std::string Description() const;
};

struct GridGeometry {
  double resolution = 0.05;  // m per cell
  double extent = 8.0;       // m per side
};

class Heightfield {
 public:
  // Square grid of n x n cells centred on the world origin; cell (0,0) sits
  // at (origin_x, origin_y). Heights are indexed [row = y][col = x].
  Heightfield(int n, double resolution, double origin_x, double origin_y);

  int size() const { return n_; }
  double resolution() const { return resolution_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double max_coord_x() const { return origin_x_ + (n_ - 1) * resolution_; }
  double max_coord_y() const { return origin_y_ + (n_ - 1) * resolution_; }

  double cell(int row, int col) const { return heights_[row * n_ + col]; }
  double& cell(int row, int col) { return heights_[row * n_ + col]; }
  double cell_x(int col) const { return origin_x_ + col * resolution_; }
  double cell_y(int row) const { return origin_y_ + row * resolution_; }
  const std::vector<double>& heights() const { return heights_; }

  // Bilinear interpolation; throws std::out_of_range outside the grid.
  double HeightAt(double x, double y) const;

  // Whitespace-separated rows, row 0 first.
  std::string ToText() const;
  // 8-bit binary PGM scaled between the field's min and max height.
  std::string ToPgm() const;

 private:
  int n_;
  double resolution_;
  double origin_x_;
  double origin_y_;
  std::vector<double> heights_;
};

Heightfield BuildTerrain(const TerrainSpec& spec, const GridGeometry& geom = {});

// World-frame axis-aligned rectangle.
struct Region {
  double x0, y0, x1, y1;
};

struct TerrainStats {
  double mean_gradient = 0.0;  // mean forward-difference gradient magnitude
  double height_span = 0.0;    // max - min, m
};

// Throws std::invalid_argument if the region covers fewer than 2x2 cells and
// std::out_of_range if it leaves the grid.
TerrainStats SlopeRoughness(const Heightfield& hf, const Region& region);

}  // namespace qgpt
