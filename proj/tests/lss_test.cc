#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qgpt/errors.h"
#include "qgpt/lss.h"
#include "qgpt/surrogate.h"
#include "support.h"

namespace qgpt {
namespace {

using L = Level;
using testing::Script;

std::string Answers(std::array<L, 5> levels, const std::string& gait = "trotting") {
  std::string out;
  for (Param p : kAllParams) {
    const int k = static_cast<int>(p) + 1;
    out += "A" + std::to_string(k) + ": " +
           std::string(LevelName(p, levels[static_cast<std::size_t>(p)])) + ".\n";
  }
  return out + "A6: " + gait + ".\n";
}

std::string Numbers(double h, double f, double sw, double pitch, double w,
                    const std::string& gait) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "Body height: %g\nStepping frequency: %g\nFoot swing height: %g\n"
                "Body pitch: %g\nFoot stance width: %g\nGait: %s",
                h, f, sw, pitch, w, gait.c_str());
  return buf;
}

struct Harness {
  explicit Harness(std::shared_ptr<ScriptedProvider> p)
      : provider(p), gateway(p), prompts(PromptLibrary::Default()) {}
  AdaptationContext Context() { return {gateway, prompts}; }

  std::shared_ptr<ScriptedProvider> provider;
  Gateway gateway;
  PromptLibrary prompts;
};

TEST(Votes, MajorityAndMedian) {
  const std::vector<L> a = {L::kLow, L::kHigh, L::kLow};
  EXPECT_EQ(MajorityLevel(a), L::kLow);
  const std::vector<L> split = {L::kLow, L::kMedium, L::kHigh};
  EXPECT_FALSE(MajorityLevel(split).has_value());
  EXPECT_EQ(MedianLevel(split), L::kMedium);
  const std::vector<L> even = {L::kVeryHigh, L::kLow};
  EXPECT_FALSE(MajorityLevel(even).has_value());
  EXPECT_EQ(MedianLevel(even), L::kLow);
  const std::vector<GaitPreset> g = {GaitPreset::kPacing, GaitPreset::kTrotting,
                                     GaitPreset::kPacing};
  EXPECT_EQ(MajorityGait(g), GaitPreset::kPacing);
}

TEST(Variant, Names) {
  for (int i = 0; i <= 4; ++i) {
    const auto v = static_cast<MethodVariant>(i);
    EXPECT_EQ(ParseVariant(VariantName(v)), v);
    EXPECT_EQ(ParseVariant(VariantLabel(v)), v);
  }
  EXPECT_FALSE(ParseVariant("oracle").has_value());
}

TEST(LocateRanges, MajorityOfThree) {
  const std::string example = testing::Fixture("a2_uphill_answers.txt");
  Harness h(Script({{"auto_lss/uphill", example},
                    {"auto_lss/uphill", Answers({L::kMedium, L::kHigh, L::kHigh, L::kHigh,
                                                 L::kMedium})},
                    {"auto_lss/uphill", example}}));
  auto ctx = h.Context();
  const auto sel = LocateRanges("slope", "uphill", ctx);
  EXPECT_EQ(sel.levels, (std::array<L, 5>{L::kLow, L::kHigh, L::kHigh, L::kHigh, L::kMedium}));
  EXPECT_EQ(sel.gait, GaitPreset::kTrotting);
  EXPECT_EQ(h.provider->Remaining(), 0u);
  const auto ex = h.gateway.Exchanges();
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_EQ(ex[0].request.n_samples, 3);
  EXPECT_DOUBLE_EQ(ex[0].request.temperature, kSamplingTemperature);
  EXPECT_NE(ex[0].request.user.find("slope"), std::string::npos);
}

TEST(LocateRanges, SplitVoteIsRequeriedOnce) {
  // A1 splits three ways, then splits again: the median of the re-query wins.
  // A6 splits too and falls back to trotting.
  const std::string tid = "auto_lss/t";
  Harness h(Script({
      {tid, Answers({L::kLow, L::kMedium, L::kMedium, L::kMedium, L::kMedium}, "pacing")},
      {tid, Answers({L::kMedium, L::kMedium, L::kMedium, L::kMedium, L::kMedium}, "bounding")},
      {tid, Answers({L::kHigh, L::kMedium, L::kLow, L::kMedium, L::kMedium}, "pronking")},
      {tid, Answers({L::kVeryHigh, L::kLow, L::kLow, L::kLow, L::kLow}, "pacing")},
      {tid, Answers({L::kVeryLow, L::kLow, L::kLow, L::kLow, L::kLow}, "bounding")},
      {tid, Answers({L::kHigh, L::kLow, L::kLow, L::kLow, L::kLow}, "pronking")},
  }));
  auto ctx = h.Context();
  const auto sel = LocateRanges("x", "t", ctx);
  EXPECT_EQ(sel.level(Param::kBodyHeight), L::kHigh);
  // Majorities from the first round stand.
  EXPECT_EQ(sel.level(Param::kStepFrequency), L::kMedium);
  EXPECT_EQ(sel.level(Param::kSwingHeight), L::kMedium);
  EXPECT_EQ(sel.gait, GaitPreset::kTrotting);
  EXPECT_EQ(h.gateway.Exchanges().size(), 2u);
}

TEST(LocateRanges, UnparseableReplyGetsOneRetry) {
  const std::string tid = "auto_lss/t";
  const std::string good = Answers({L::kLow, L::kLow, L::kLow, L::kLow, L::kLow});
  Harness h(Script({{tid, good}, {tid, "no idea"}, {tid, good}, {tid, good}}));
  auto ctx = h.Context();
  EXPECT_EQ(LocateRanges("x", "t", ctx).level(Param::kBodyPitch), L::kLow);
  const auto ex = h.gateway.Exchanges();
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[1].request.n_samples, 1);
  EXPECT_NE(ex[1].request.user.find("could not be used"), std::string::npos);

  Harness bad(Script({{tid, good}, {tid, "no idea"}, {tid, good}, {tid, "still no"}}));
  auto bctx = bad.Context();
  EXPECT_THROW(LocateRanges("x", "t", bctx), ParseError);
}

TEST(DirectParams, MeanClampAndGaitMajority) {
  const std::string tid = "auto/t";
  Harness h(Script({{tid, Numbers(0.2, 2.0, 0.1, 0.1, 0.2, "pacing")},
                    {tid, Numbers(0.3, 3.0, 0.1, 0.1, 0.2, "trot")},
                    {tid, Numbers(0.5, 4.0, 0.1, 0.1, 0.2, "pacing")}}));
  auto ctx = h.Context();
  const auto p = DirectParams("x", "t", ctx, false);
  // 0.5 clamps to 0.45 before averaging.
  EXPECT_NEAR(p.body_height, (0.2 + 0.3 + 0.45) / 3, 1e-12);
  EXPECT_NEAR(p.step_frequency, 3.0, 1e-12);
  EXPECT_NEAR(p.swing_height, 0.1, 1e-12);
  EXPECT_EQ(p.gait, OffsetsOf(GaitPreset::kPacing));

  Harness prior(Script({{"auto_prior/t", Numbers(0.2, 2, 0.1, 0, 0.2, "pronking")},
                        {"auto_prior/t", Numbers(0.2, 2, 0.1, 0, 0.2, "bounding")},
                        {"auto_prior/t", Numbers(0.2, 2, 0.1, 0, 0.2, "pacing")}}));
  auto pctx = prior.Context();
  EXPECT_EQ(DirectParams("x", "t", pctx, true).gait, OffsetsOf(GaitPreset::kTrotting));
}

// Grid size computed from the interval bounds alone.
std::size_t AxisCount(Param p, Interval iv) {
  const double step = SamplingStep(p);
  std::size_t n = 0;
  double last = 0.0;
  for (int k = 0; iv.lo + k * step <= iv.hi + 1e-9; ++k) {
    ++n;
    last = iv.lo + k * step;
  }
  if (std::abs(last - iv.hi) > 1e-9) ++n;
  return n;
}

TEST(CandidateGrid, CountMatchesEnumeration) {
  const LevelTable& t = DefaultLevelTable();
  for (int l = 0; l < kNumLevels; ++l) {
    LevelSelection sel;
    for (Param p : kAllParams) {
      sel.levels[static_cast<std::size_t>(p)] =
          static_cast<L>((l + static_cast<int>(p)) % kNumLevels);
    }
    std::size_t want = 1;
    for (Param p : kAllParams) want *= AxisCount(p, t.Range(p, sel.level(p)));
    const auto grid = CandidateGrid(sel);
    EXPECT_EQ(grid.size(), want);
    std::set<std::vector<double>> unique;
    for (const auto& b : grid) {
      std::vector<double> key;
      for (Param p : kAllParams) {
        EXPECT_TRUE(t.Range(p, sel.level(p)).Contains(b.Get(p)));
        key.push_back(b.Get(p));
      }
      EXPECT_EQ(b.gait, OffsetsOf(sel.gait));
      unique.insert(key);
    }
    EXPECT_EQ(unique.size(), grid.size());
  }
  LevelSelection up;
  up.levels = {L::kLow, L::kHigh, L::kHigh, L::kHigh, L::kMedium};
  EXPECT_EQ(CandidateGrid(up).size(), 288u);
  LssOptions gaits;
  gaits.grid_over_gaits = true;
  EXPECT_EQ(CandidateGrid(up, DefaultLevelTable(), gaits).size(), 4 * 288u);
}

TEST(CandidateGrid, CapThinsAndKeepsEndpoints) {
  LevelSelection sel;
  sel.levels = {L::kMedium, L::kVeryHigh, L::kMedium, L::kHigh, L::kVeryHigh};
  const LevelTable& t = DefaultLevelTable();
  for (int cap : {1, 50, 100}) {
    LssOptions o;
    o.candidate_cap = cap;
    const auto grid = CandidateGrid(sel, t, o);
    EXPECT_LE(grid.size(), std::max<std::size_t>(cap, 32u));
    for (Param p : kAllParams) {
      double lo = 1e9, hi = -1e9;
      for (const auto& b : grid) lo = std::min(lo, b.Get(p)), hi = std::max(hi, b.Get(p));
      EXPECT_DOUBLE_EQ(lo, t.Range(p, sel.level(p)).lo) << cap;
      EXPECT_DOUBLE_EQ(hi, t.Range(p, sel.level(p)).hi) << cap;
    }
  }
  LssOptions o;
  o.candidate_cap = 1;
  EXPECT_EQ(CandidateGrid(sel, t, o).size(), 32u);  // two endpoints per axis
}

SimConfig Quiet() {
  SimConfig cfg;
  cfg.noise_scale = 0.0;
  return cfg;
}

TEST(SelectBest, SingleCandidate) {
  BehaviorParams p;
  const std::vector<BehaviorParams> one = {p};
  const auto r = SelectBest(one, TerrainSpec::Default(TerrainKind::kUphillSlope),
                            kBenchmarkCommand, Quiet());
  EXPECT_EQ(r.chosen, p);
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_THROW(SelectBest({}, TerrainSpec::Default(TerrainKind::kUphillSlope),
                          kBenchmarkCommand, Quiet()),
               std::invalid_argument);
}

TEST(SelectBest, IdealMidpointWinsOnMidpointGrid) {
  const LevelTable& t = DefaultLevelTable();
  for (TerrainKind k : kAllTerrains) {
    const IdealProfile ideal = IdealProfileFor(k);
    std::vector<BehaviorParams> cands;
    for (int code = 0; code < 243; ++code) {
      BehaviorParams b;
      b.gait = OffsetsOf(ideal.gait);
      int c = code;
      for (Param p : kAllParams) {
        const int l = std::clamp(static_cast<int>(ideal.level(p)) + c % 3 - 1, 0, 4);
        c /= 3;
        b.Set(p, t.Range(p, static_cast<L>(l)).Mid());
      }
      cands.push_back(b);
    }
    const auto r = SelectBest(cands, TerrainSpec::Default(k), kBenchmarkCommand, Quiet());
    EXPECT_EQ(r.chosen, ideal.Midpoint()) << TerrainName(k);
  }
}

TEST(SelectBest, TiesGoToLowerHeightThenFrequency) {
  // Both inside the ideal box: equal scores.
  const IdealProfile up = IdealProfileFor(TerrainKind::kUphillSlope);
  BehaviorParams a = up.Midpoint(), b = a;
  a.body_height = 0.19;
  b.body_height = 0.16;
  const std::vector<BehaviorParams> ab = {a, b};
  auto r = SelectBest(ab, TerrainSpec::Default(TerrainKind::kUphillSlope), kBenchmarkCommand,
                      Quiet());
  EXPECT_EQ(r.candidates[0].velocity_percent, r.candidates[1].velocity_percent);
  EXPECT_EQ(r.chosen, b);
  a = b;
  a.step_frequency = 3.4;
  b.step_frequency = 3.1;
  const std::vector<BehaviorParams> freq = {a, b};
  r = SelectBest(freq, TerrainSpec::Default(TerrainKind::kUphillSlope), kBenchmarkCommand,
                 Quiet());
  EXPECT_EQ(r.chosen, b);
  const std::vector<BehaviorParams> same = {a, a};
  r = SelectBest(same, TerrainSpec::Default(TerrainKind::kUphillSlope), kBenchmarkCommand,
                 Quiet());
  EXPECT_EQ(r.chosen, a);
}

TEST(MidpointParams, UsesSelection) {
  LevelSelection sel;
  sel.levels = {L::kVeryLow, L::kLow, L::kMedium, L::kHigh, L::kVeryHigh};
  sel.gait = GaitPreset::kBounding;
  const auto b = MidpointParams(sel);
  EXPECT_DOUBLE_EQ(b.body_height, 0.125);
  EXPECT_DOUBLE_EQ(b.step_frequency, 2.25);
  EXPECT_DOUBLE_EQ(b.swing_height, 0.135);
  EXPECT_DOUBLE_EQ(b.body_pitch, 0.16);
  EXPECT_DOUBLE_EQ(b.stance_width, 0.41);
  EXPECT_EQ(b.gait, OffsetsOf(GaitPreset::kBounding));
}

TEST(DeterminingPick, OffersMidpointsAndRetriesIllegalPick) {
  const std::string tid = "lss_determining/t";
  Harness h(Script({{tid, "A1: 0.3\nA2: 3.25\nA3: 0.185\nA4: 0.16\nA5: 0.25"},
                    {tid, "A1: 0.175\nA2: 3.25\nA3: 0.185\nA4: 0.16\nA5: 0.25"}}));
  auto ctx = h.Context();
  LevelSelection sel;
  sel.gait = GaitPreset::kPacing;
  const auto b = DeterminingPick(sel, "x", "t", ctx);
  EXPECT_DOUBLE_EQ(b.body_height, 0.175);
  EXPECT_DOUBLE_EQ(b.step_frequency, 3.25);
  EXPECT_DOUBLE_EQ(b.swing_height, 0.185);
  EXPECT_DOUBLE_EQ(b.body_pitch, 0.16);
  EXPECT_DOUBLE_EQ(b.stance_width, 0.25);
  EXPECT_EQ(b.gait, OffsetsOf(GaitPreset::kPacing));
  const auto ex = h.gateway.Exchanges();
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_NE(ex[0].request.user.find("0.425, 0.35, 0.25, 0.175, 0.125"), std::string::npos);
  EXPECT_NE(ex[0].request.user.find("0.32, 0.16, 0, -0.16, -0.32"), std::string::npos);
  EXPECT_NE(ex[1].request.user.find("body_height"), std::string::npos);
}

BenchmarkConfig OneRun(std::vector<MethodVariant> variants) {
  BenchmarkConfig cfg;
  cfg.terrains = {TerrainKind::kUphillSlope};
  cfg.variants = std::move(variants);
  cfg.runs = 1;
  cfg.sim.noise_scale = 0.0;
  return cfg;
}

TEST(RunBenchmark, UphillRowsFromBundledTranscript) {
  Harness h(ScriptedProvider::FromFile(testing::AssetPath("transcripts/benchmark.jsonl")));
  auto ctx = h.Context();
  const auto rows =
      RunBenchmark(OneRun({MethodVariant::kAuto, MethodVariant::kAutoPrior,
                           MethodVariant::kAutoLssSampling,
                           MethodVariant::kAutoLssDetermining}),
                   ctx);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2].variant, MethodVariant::kAutoLssSampling);
  EXPECT_EQ(rows[2].adaptation.candidates.size(), 288u);
  EXPECT_EQ(rows[2].report.velocity_xy, 100.0);
  EXPECT_EQ(rows[3].report.velocity_xy, 100.0);
  EXPECT_LT(rows[0].report.velocity_xy, 100.0);
  // The determining row reuses the located levels: one extra call only.
  EXPECT_EQ(rows[3].adaptation.transcript_end - rows[3].adaptation.transcript_begin, 1u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].adaptation.transcript_begin, rows[i - 1].adaptation.transcript_end);
  }
  const std::string csv = BenchmarkCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "terrain,method,r_vxy,r_wz,r_cf,r_cv");
  EXPECT_NE(csv.find("\nuphill_slope,Auto+LSS,100.00,"), std::string::npos);
  const std::string cand = CandidateCsv(rows);
  EXPECT_EQ(std::count(cand.begin(), cand.end(), '\n'), 289);
}

TEST(RunBenchmark, ManualNeedsParams) {
  Harness h(Script({}));
  auto ctx = h.Context();
  EXPECT_THROW(RunBenchmark(OneRun({MethodVariant::kManual}), ctx), ConfigError);
  auto cfg = OneRun({MethodVariant::kManual});
  cfg.manual_params = ManualParamsFromJson(
      nlohmann::json::parse(ReadFile(testing::AssetPath("manual_params.json"))));
  EXPECT_EQ(cfg.manual_params.size(), 5u);
  const auto rows = RunBenchmark(cfg, ctx);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].adaptation.chosen, cfg.manual_params[TerrainKind::kUphillSlope]);
  EXPECT_THROW(ManualParamsFromJson({{"lava", {}}}), ConfigError);
  cfg.runs = 0;
  EXPECT_THROW(RunBenchmark(cfg, ctx), std::invalid_argument);
}

TEST(RunBenchmark, RunsAreDeterministic) {
  auto run = [] {
    Harness h(ScriptedProvider::FromFile(testing::AssetPath("transcripts/benchmark.jsonl")));
    auto ctx = h.Context();
    auto cfg = OneRun({MethodVariant::kAuto, MethodVariant::kAutoLssSampling});
    cfg.runs = 3;
    cfg.sim.noise_scale = 0.05;
    return BenchmarkCsv(RunBenchmark(cfg, ctx));
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace qgpt
