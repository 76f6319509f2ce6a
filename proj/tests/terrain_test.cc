#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "qgpt/random.h"
#include "qgpt/terrain.h"

namespace qgpt {
namespace {

TEST(TerrainSpec, PublishedDefaults) {
  auto s = TerrainSpec::Default(TerrainKind::kUphillSlope);
  EXPECT_DOUBLE_EQ(s.slope, -0.15);
  EXPECT_DOUBLE_EQ(s.platform_size, 0.6);
  s = TerrainSpec::Default(TerrainKind::kDownhillSlope);
  EXPECT_DOUBLE_EQ(s.slope, 0.4);
  EXPECT_DOUBLE_EQ(s.platform_size, 0.8);
  s = TerrainSpec::Default(TerrainKind::kUpsideStair);
  EXPECT_DOUBLE_EQ(s.step_width, 0.5);
  EXPECT_DOUBLE_EQ(s.step_height, -0.1);
  EXPECT_DOUBLE_EQ(s.platform_size, 0.8);
  s = TerrainSpec::Default(TerrainKind::kDownsideStair);
  EXPECT_DOUBLE_EQ(s.step_height, 0.1);
  EXPECT_DOUBLE_EQ(s.platform_size, 1.0);
  s = TerrainSpec::Default(TerrainKind::kUnevenGround);
  EXPECT_DOUBLE_EQ(s.min_height, 0.0);
  EXPECT_DOUBLE_EQ(s.max_height, 0.2);
}

TEST(TerrainSpec, Names) {
  for (TerrainKind k : kAllTerrains) EXPECT_EQ(ParseTerrainName(TerrainName(k)), k);
  EXPECT_FALSE(ParseTerrainName("lava").has_value());
}

TEST(TerrainSpec, Descriptions) {
  EXPECT_EQ(TerrainSpec::Default(TerrainKind::kUpsideStair).Description(),
            "There is a staircase going up here. Each step is 10 centimeters in height "
            "and 50 centimeters in width.");
  EXPECT_EQ(TerrainSpec::Default(TerrainKind::kUnevenGround).Description(),
            "There is uneven ground. The ground's maximum height is 20 cm, and the "
            "minimum height is 0 cm.");
}

TEST(TerrainSpec, FromJsonAndValidation) {
  auto s = TerrainSpec::FromJson(TerrainKind::kUphillSlope, {{"slope", -0.3}});
  EXPECT_DOUBLE_EQ(s.slope, -0.3);
  EXPECT_DOUBLE_EQ(s.platform_size, 0.6);
  EXPECT_THROW(TerrainSpec::FromJson(TerrainKind::kUpsideStair, {{"step_width", 0.0}}),
               std::invalid_argument);
  EXPECT_THROW(TerrainSpec::FromJson(TerrainKind::kUnevenGround, {{"max_height", -1.0}}),
               std::invalid_argument);
}

TEST(BuildTerrain, OriginOnPlatform) {
  for (TerrainKind k : kAllTerrains) {
    const auto hf = BuildTerrain(TerrainSpec::Default(k));
    EXPECT_DOUBLE_EQ(hf.HeightAt(0.0, 0.0), 0.0) << TerrainName(k);
  }
}

TEST(BuildTerrain, UpsideStairStepCount) {
  const auto hf = BuildTerrain(TerrainSpec::Default(TerrainKind::kUpsideStair));
  // 1.3 m past the 0.4 m half-platform: two full steps.
  EXPECT_NEAR(hf.HeightAt(0.4 + 1.3, 0.0), 0.2, 1e-12);
  EXPECT_NEAR(hf.HeightAt(-(0.4 + 1.3), 1.0), 0.2, 1e-12);  // mirrored
}

TEST(BuildTerrain, StairDiscontinuitiesAtStepMultiples) {
  const auto spec = TerrainSpec::Default(TerrainKind::kDownsideStair);
  const auto hf = BuildTerrain(spec);
  const double edge = 0.5 * spec.platform_size;
  for (int c = 0; c + 1 < hf.size(); ++c) {
    const double a = hf.cell(0, c), b = hf.cell(0, c + 1);
    if (a == b) continue;
    // A jump between two columns brackets a step boundary.
    const double xa = std::abs(hf.cell_x(c)) - edge, xb = std::abs(hf.cell_x(c + 1)) - edge;
    const double lo = std::min(xa, xb), hi = std::max(xa, xb);
    const double k = std::ceil(lo / spec.step_width - 1e-9);
    EXPECT_LE(k * spec.step_width, hi + 1e-9);
    EXPECT_NEAR(std::abs(a - b), 0.1, 1e-12);
  }
}

TEST(BuildTerrain, SlopesAreContinuous) {
  for (TerrainKind k : {TerrainKind::kUphillSlope, TerrainKind::kDownhillSlope}) {
    const auto spec = TerrainSpec::Default(k);
    const auto hf = BuildTerrain(spec);
    for (int c = 0; c + 1 < hf.size(); ++c) {
      EXPECT_LE(std::abs(hf.cell(3, c + 1) - hf.cell(3, c)),
                std::abs(spec.slope) * hf.resolution() + 1e-12);
    }
  }
  const auto up = BuildTerrain(TerrainSpec::Default(TerrainKind::kUphillSlope));
  EXPECT_GT(up.HeightAt(2.0, 0.0), 0.0);
  const auto down = BuildTerrain(TerrainSpec::Default(TerrainKind::kDownhillSlope));
  EXPECT_LT(down.HeightAt(2.0, 0.0), 0.0);
}

TEST(BuildTerrain, UnevenGroundBoundsAndDeterminism) {
  const auto spec = TerrainSpec::Default(TerrainKind::kUnevenGround, 42);
  const auto a = BuildTerrain(spec);
  const auto b = BuildTerrain(spec);
  EXPECT_EQ(a.heights(), b.heights());
  double lo = 1e9, hi = -1e9;
  for (double h : a.heights()) lo = std::min(lo, h), hi = std::max(hi, h);
  EXPECT_GE(lo, 0.0);
  EXPECT_LE(hi, 0.2);
  EXPECT_GT(hi - lo, 0.15);
  EXPECT_NE(BuildTerrain(TerrainSpec::Default(TerrainKind::kUnevenGround, 43)).heights(),
            a.heights());
}

TEST(HeightAt, MatchesBilinearOracle) {
  const auto hf = BuildTerrain(TerrainSpec::Default(TerrainKind::kUnevenGround, 7));
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.Uniform(hf.origin_x(), hf.max_coord_x());
    const double y = rng.Uniform(hf.origin_y(), hf.max_coord_y());
    const double fx = (x - hf.origin_x()) / hf.resolution();
    const double fy = (y - hf.origin_y()) / hf.resolution();
    int c = static_cast<int>(fx), r = static_cast<int>(fy);
    c = std::min(c, hf.size() - 2);
    r = std::min(r, hf.size() - 2);
    const double u = fx - c, v = fy - r;
    const double want = hf.cell(r, c) * (1 - u) * (1 - v) + hf.cell(r, c + 1) * u * (1 - v) +
                        hf.cell(r + 1, c) * (1 - u) * v + hf.cell(r + 1, c + 1) * u * v;
    EXPECT_NEAR(hf.HeightAt(x, y), want, 1e-12);
  }
}

TEST(HeightAt, CellCentresAndMidpoints) {
  Heightfield hf(3, 0.1, 0.0, 0.0);
  hf.cell(0, 0) = 0.0;
  hf.cell(0, 1) = 0.1;
  EXPECT_DOUBLE_EQ(hf.HeightAt(0.1, 0.0), 0.1);
  EXPECT_NEAR(hf.HeightAt(0.05, 0.0), 0.05, 1e-12);
  EXPECT_THROW(hf.HeightAt(0.3, 0.0), std::out_of_range);
  EXPECT_THROW(hf.HeightAt(0.0, -0.01), std::out_of_range);
}

TEST(SlopeRoughness, Examples) {
  const auto flat = BuildTerrain(TerrainSpec::Default(TerrainKind::kUphillSlope));
  auto st = SlopeRoughness(flat, {-0.25, -0.25, 0.25, 0.25});
  EXPECT_DOUBLE_EQ(st.mean_gradient, 0.0);
  EXPECT_DOUBLE_EQ(st.height_span, 0.0);
  st = SlopeRoughness(flat, {1.0, -1.0, 3.0, 1.0});
  EXPECT_NEAR(st.mean_gradient, 0.15, 1e-9);
  EXPECT_NEAR(st.height_span, 0.3, 1e-9);
  EXPECT_THROW(SlopeRoughness(flat, {0.0, 0.0, 0.01, 0.01}), std::invalid_argument);
  EXPECT_THROW(SlopeRoughness(flat, {3.0, 0.0, 5.0, 1.0}), std::out_of_range);
}

TEST(SlopeRoughness, Reproducible) {
  const auto spec = TerrainSpec::Default(TerrainKind::kUnevenGround, 3);
  const auto a = SlopeRoughness(BuildTerrain(spec), {1, 1, 2, 2});
  const auto b = SlopeRoughness(BuildTerrain(spec), {1, 1, 2, 2});
  EXPECT_EQ(a.mean_gradient, b.mean_gradient);
  EXPECT_EQ(a.height_span, b.height_span);
}

TEST(Heightfield, Exports) {
  const auto hf = BuildTerrain(TerrainSpec::Default(TerrainKind::kUpsideStair));
  const std::string pgm = hf.ToPgm();
  const std::string header = "P5\n161 161\n255\n";
  ASSERT_EQ(pgm.substr(0, header.size()), header);
  EXPECT_EQ(pgm.size(), header.size() + 161u * 161u);
  const std::string txt = hf.ToText();
  EXPECT_EQ(std::count(txt.begin(), txt.end(), '\n'), 161);
}

}  // namespace
}  // namespace qgpt
