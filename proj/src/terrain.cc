#include "qgpt/terrain.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qgpt/random.h"

namespace qgpt {

std::string_view TerrainName(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::kUphillSlope: return "uphill_slope";
    case TerrainKind::kDownhillSlope: return "downhill_slope";
    case TerrainKind::kUpsideStair: return "upside_stair";
    case TerrainKind::kDownsideStair: return "downside_stair";
    case TerrainKind::kUnevenGround: return "uneven_ground";
  }
  return "?";
}

std::string_view TerrainLabel(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::kUphillSlope: return "Uphill Slope";
    case TerrainKind::kDownhillSlope: return "Downhill Slope";
    case TerrainKind::kUpsideStair: return "Upside Stair";
    case TerrainKind::kDownsideStair: return "Downside Stair";
    case TerrainKind::kUnevenGround: return "Uneven Ground";
  }
  return "?";
}

std::optional<TerrainKind> ParseTerrainName(std::string_view name) {
  for (TerrainKind k : kAllTerrains) {
    if (name == TerrainName(k)) return k;
  }
  return std::nullopt;
}

TerrainSpec TerrainSpec::Default(TerrainKind kind, std::uint64_t seed) {
  TerrainSpec s;
  s.kind = kind;
  s.seed = seed;
  switch (kind) {
    case TerrainKind::kUphillSlope:
      s.slope = -0.15;
      s.platform_size = 0.6;
      break;
    case TerrainKind::kDownhillSlope:
      s.slope = 0.4;
      s.platform_size = 0.8;
      break;
    case TerrainKind::kUpsideStair:
      s.step_width = 0.5;
      s.step_height = -0.1;
      s.platform_size = 0.8;
      break;
    case TerrainKind::kDownsideStair:
      s.step_width = 0.5;
      s.step_height = 0.1;
      s.platform_size = 1.0;
      break;
    case TerrainKind::kUnevenGround:
      s.min_height = 0.0;
      s.max_height = 0.2;
      break;
  }
  return s;
}

TerrainSpec TerrainSpec::FromJson(TerrainKind kind, const nlohmann::json& j) {
  TerrainSpec s = Default(kind);
  s.slope = j.value("slope", s.slope);
  s.platform_size = j.value("platform_size", s.platform_size);
  s.step_width = j.value("step_width", s.step_width);
  s.step_height = j.value("step_height", s.step_height);
  s.min_height = j.value("min_height", s.min_height);
  s.max_height = j.value("max_height", s.max_height);
  s.seed = j.value("seed", s.seed);
  s.Validate();
  return s;
}

void TerrainSpec::Validate() const {
  if (platform_size < 0.0) throw std::invalid_argument("negative platform size");
  switch (kind) {
    case TerrainKind::kUpsideStair:
    case TerrainKind::kDownsideStair:
      if (!(step_width > 0.0)) throw std::invalid_argument("step width must be positive");
      break;
    case TerrainKind::kUnevenGround:
      if (max_height < min_height) {
        throw std::invalid_argument("uneven ground max height below min height");
      }
      break;
    default:
      break;
  }
}

std::string TerrainSpec::Description() const {
  std::ostringstream os;
  auto cm = [](double m) { return static_cast<int>(std::lround(std::abs(m) * 100.0)); };
  switch (kind) {
    case TerrainKind::kUphillSlope:
      os << "There is an uphill slope. The slope rises " << cm(slope)
         << " centimeters for every meter travelled.";
      break;
    case TerrainKind::kDownhillSlope:
      os << "There is a downhill slope. The slope drops " << cm(slope)
         << " centimeters for every meter travelled.";
      break;
    case TerrainKind::kUpsideStair:
      os << "There is a staircase going up here. Each step is " << cm(step_height)
         << " centimeters in height and " << cm(step_width)
         << " centimeters in width.";
      break;
    case TerrainKind::kDownsideStair:
      os << "There is a staircase going down here. Each step is "
         << cm(step_height) << " centimeters in height and " << cm(step_width)
         << " centimeters in width.";
      break;
    case TerrainKind::kUnevenGround:
      os << "There is uneven ground. The ground's maximum height is "
         << cm(max_height) << " cm, and the minimum height is " << cm(min_height)
         << " cm.";
      break;
  }
  return os.str();
}

Heightfield::Heightfield(int n, double resolution, double origin_x,
                         double origin_y)
    : n_(n),
      resolution_(resolution),
      origin_x_(origin_x),
      origin_y_(origin_y),
      heights_(static_cast<std::size_t>(n) * n, 0.0) {
  if (n < 2) throw std::invalid_argument("heightfield needs at least 2x2 cells");
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
}

double Heightfield::HeightAt(double x, double y) const {
  const double fx = (x - origin_x_) / resolution_;
  const double fy = (y - origin_y_) / resolution_;
  constexpr double kEps = 1e-9;
  if (!(fx >= -kEps && fy >= -kEps && fx <= n_ - 1 + kEps && fy <= n_ - 1 + kEps)) {
    throw std::out_of_range("height query outside the heightfield extent");
  }
  const int c0 = std::clamp(static_cast<int>(std::floor(fx)), 0, n_ - 2);
  const int r0 = std::clamp(static_cast<int>(std::floor(fy)), 0, n_ - 2);
  const double tx = std::clamp(fx - c0, 0.0, 1.0);
  const double ty = std::clamp(fy - r0, 0.0, 1.0);
  const double h00 = cell(r0, c0), h01 = cell(r0, c0 + 1);
  const double h10 = cell(r0 + 1, c0), h11 = cell(r0 + 1, c0 + 1);
  return (1 - ty) * ((1 - tx) * h00 + tx * h01) + ty * ((1 - tx) * h10 + tx * h11);
}

std::string Heightfield::ToText() const {
  std::ostringstream os;
  os.precision(9);
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) {
      if (c) os << ' ';
      os << cell(r, c);
    }
    os << '\n';
  }
  return os.str();
}

std::string Heightfield::ToPgm() const {
  const auto [lo_it, hi_it] = std::minmax_element(heights_.begin(), heights_.end());
  const double lo = *lo_it, span = *hi_it - *lo_it;
  std::string out = "P5\n" + std::to_string(n_) + " " + std::to_string(n_) + "\n255\n";
  // Row 0 is the most negative y; images are written top row first.
  for (int r = n_ - 1; r >= 0; --r) {
    for (int c = 0; c < n_; ++c) {
      const double v = span > 0 ? (cell(r, c) - lo) / span : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
  return out;
}

Heightfield BuildTerrain(const TerrainSpec& spec, const GridGeometry& geom) {
  spec.Validate();
  const int n = static_cast<int>(std::lround(geom.extent / geom.resolution)) + 1;
  const double half = 0.5 * (n - 1) * geom.resolution;
  Heightfield hf(n, geom.resolution, -half, -half);
  const double half_platform = 0.5 * spec.platform_size;

  if (spec.kind == TerrainKind::kUnevenGround) {
    Rng rng(DeriveSeed(spec.seed, "terrain/uneven_ground"));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const bool on_platform = std::abs(hf.cell_x(c)) <= half_platform &&
                                 std::abs(hf.cell_y(r)) <= half_platform;
        hf.cell(r, c) =
            on_platform ? 0.0 : rng.Uniform(spec.min_height, spec.max_height);
      }
    }
    return hf;
  }

  for (int c = 0; c < n; ++c) {
    // Distance travelled past the platform edge, mirrored about x = 0.
    const double d = std::max(0.0, std::abs(hf.cell_x(c)) - half_platform);
    double h = 0.0;
    switch (spec.kind) {
      case TerrainKind::kUphillSlope: h = std::abs(spec.slope) * d; break;
      case TerrainKind::kDownhillSlope: h = -std::abs(spec.slope) * d; break;
      case TerrainKind::kUpsideStair:
        h = std::abs(spec.step_height) * std::floor(d / spec.step_width + 1e-9);
        break;
      case TerrainKind::kDownsideStair:
        h = -std::abs(spec.step_height) * std::floor(d / spec.step_width + 1e-9);
        break;
      case TerrainKind::kUnevenGround: break;
    }
    for (int r = 0; r < n; ++r) hf.cell(r, c) = h;
  }
  return hf;
}

TerrainStats SlopeRoughness(const Heightfield& hf, const Region& region) {
  const double res = hf.resolution();
  if (region.x0 < hf.origin_x() - 1e-9 || region.y0 < hf.origin_y() - 1e-9 ||
      region.x1 > hf.max_coord_x() + 1e-9 || region.y1 > hf.max_coord_y() + 1e-9) {
    throw std::out_of_range("region leaves the heightfield");
  }
  const int c0 = static_cast<int>(std::ceil((region.x0 - hf.origin_x()) / res - 1e-9));
  const int c1 = static_cast<int>(std::floor((region.x1 - hf.origin_x()) / res + 1e-9));
  const int r0 = static_cast<int>(std::ceil((region.y0 - hf.origin_y()) / res - 1e-9));
  const int r1 = static_cast<int>(std::floor((region.y1 - hf.origin_y()) / res + 1e-9));
  if (c1 - c0 < 1 || r1 - r0 < 1) {
    throw std::invalid_argument("region must span at least 2x2 cells");
  }
  double lo = hf.cell(r0, c0), hi = lo;
  double grad_sum = 0.0;
  long count = 0;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      lo = std::min(lo, hf.cell(r, c));
      hi = std::max(hi, hf.cell(r, c));
      if (r < r1 && c < c1) {
        const double gx = (hf.cell(r, c + 1) - hf.cell(r, c)) / res;
        const double gy = (hf.cell(r + 1, c) - hf.cell(r, c)) / res;
        grad_sum += std::hypot(gx, gy);
        ++count;
      }
    }
  }
  return {grad_sum / static_cast<double>(count), hi - lo};
}

}  // namespace qgpt
