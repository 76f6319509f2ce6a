#include "qgpt/lss.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "qgpt/errors.h"
#include "qgpt/random.h"

namespace qgpt {

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string Compact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Issues `request` and parses every reply; an unparseable reply gets one
// corrective single-sample retry before the error propagates.
template <typename T>
std::vector<T> SampleAndParse(Gateway& gateway, const ChatRequest& request,
                              const std::function<T(const std::string&)>& parse,
                              const std::string& format_hint) {
  std::vector<T> out;
  for (const std::string& reply : gateway.Complete(request)) {
    try {
      out.push_back(parse(reply));
    } catch (const ParseError& first) {
      ChatRequest retry = request;
      retry.n_samples = 1;
      retry.temperature = kParsingTemperature;
      retry.user += "\n\nYour previous answer could not be used (" +
                    std::string(first.what()) + "). " + format_hint;
      out.push_back(parse(gateway.CompleteOne(retry)));
    }
  }
  return out;
}

const char* kLevelHint =
    "Answer every question A1 to A6 using only the listed options.";
const char* kNumericHint =
    "Give an exact number for body height, stepping frequency, foot swing "
    "height, body pitch and foot stance width, and name one gait.";
const char* kOptionHint =
    "Answer A1 to A5 with exactly one of the listed numbers each.";

}  // namespace

std::string_view VariantName(MethodVariant v) {
  switch (v) {
    case MethodVariant::kManual: return "manual";
    case MethodVariant::kAuto: return "auto";
    case MethodVariant::kAutoPrior: return "auto_prior";
    case MethodVariant::kAutoLssSampling: return "auto_lss";
    case MethodVariant::kAutoLssDetermining: return "lss_determining";
  }
  return "?";
}

std::string_view VariantLabel(MethodVariant v) {
  switch (v) {
    case MethodVariant::kManual: return "Manual";
    case MethodVariant::kAuto: return "Auto";
    case MethodVariant::kAutoPrior: return "Auto+prior";
    case MethodVariant::kAutoLssSampling: return "Auto+LSS";
    case MethodVariant::kAutoLssDetermining: return "LSS-Determining";
  }
  return "?";
}

std::optional<MethodVariant> ParseVariant(std::string_view name) {
  for (int i = 0; i <= 4; ++i) {
    const auto v = static_cast<MethodVariant>(i);
    if (name == VariantName(v) || name == VariantLabel(v)) return v;
  }
  if (name == "auto_lss_sampling") return MethodVariant::kAutoLssSampling;
  return std::nullopt;
}

LssOptions LssOptions::FromJson(const nlohmann::json& j) {
  LssOptions o;
  o.n_candidates = j.value("n_candidates", o.n_candidates);
  o.candidate_cap = j.value("candidate_cap", o.candidate_cap);
  o.grid_over_gaits = j.value("grid_over_gaits", o.grid_over_gaits);
  if (o.n_candidates < 1) throw std::invalid_argument("n_candidates must be >= 1");
  if (o.candidate_cap < 1) throw std::invalid_argument("candidate_cap must be >= 1");
  return o;
}

std::optional<Level> MajorityLevel(std::span<const Level> votes) {
  std::array<int, kNumLevels> counts{};
  for (Level l : votes) ++counts[static_cast<std::size_t>(l)];
  for (int i = 0; i < kNumLevels; ++i) {
    if (2 * counts[i] > static_cast<int>(votes.size())) return static_cast<Level>(i);
  }
  return std::nullopt;
}

std::optional<GaitPreset> MajorityGait(std::span<const GaitPreset> votes) {
  std::array<int, 4> counts{};
  for (GaitPreset g : votes) ++counts[static_cast<std::size_t>(g)];
  for (int i = 0; i < 4; ++i) {
    if (2 * counts[i] > static_cast<int>(votes.size())) return static_cast<GaitPreset>(i);
  }
  return std::nullopt;
}

Level MedianLevel(std::span<const Level> votes) {
  if (votes.empty()) return Level::kMedium;
  std::vector<Level> sorted(votes.begin(), votes.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted[(sorted.size() - 1) / 2];
}

LevelSelection LocateRanges(const std::string& terrain_description,
                            const std::string& subject, AdaptationContext& ctx) {
  ChatRequest request;
  request.template_id = "auto_lss/" + subject;
  request.user = ctx.prompts.Render("auto_lss",
                                    {{"terrain_description", terrain_description}});
  request.temperature = kSamplingTemperature;
  request.n_samples = ctx.options.n_candidates;
  const std::function<LevelAnswers(const std::string&)> parse =
      [](const std::string& s) { return ParseLevels(s); };

  const auto first = SampleAndParse(ctx.gateway, request, parse, kLevelHint);

  LevelSelection selection;
  std::vector<Param> split_params;
  for (Param p : kAllParams) {
    std::vector<Level> votes;
    for (const auto& a : first) votes.push_back(a.level(p));
    if (auto m = MajorityLevel(votes)) {
      selection.levels[static_cast<std::size_t>(p)] = *m;
    } else {
      split_params.push_back(p);
    }
  }
  std::vector<GaitPreset> gait_votes;
  for (const auto& a : first) gait_votes.push_back(a.gait);
  auto gait = MajorityGait(gait_votes);
  if (gait) selection.gait = *gait;

  if (split_params.empty() && gait) return selection;

  const auto second = SampleAndParse(ctx.gateway, request, parse, kLevelHint);
  for (Param p : split_params) {
    std::vector<Level> votes;
    for (const auto& a : second) votes.push_back(a.level(p));
    selection.levels[static_cast<std::size_t>(p)] =
        MajorityLevel(votes).value_or(MedianLevel(votes));
  }
  if (!gait) {
    gait_votes.clear();
    for (const auto& a : second) gait_votes.push_back(a.gait);
    selection.gait = MajorityGait(gait_votes).value_or(GaitPreset::kTrotting);
  }
  return selection;
}

BehaviorParams DirectParams(const std::string& terrain_description,
                            const std::string& subject, AdaptationContext& ctx,
                            bool with_prior) {
  const std::string name = with_prior ? "auto_prior" : "auto";
  ChatRequest request;
  request.template_id = name + "/" + subject;
  request.user = ctx.prompts.Render(name, {{"terrain_description", terrain_description}});
  request.temperature = kSamplingTemperature;
  request.n_samples = ctx.options.n_candidates;
  const LevelTable& table = ctx.table;
  const std::function<NumericParse(const std::string&)> parse =
      [&table](const std::string& s) { return ParseNumericParams(s, table); };

  const auto samples = SampleAndParse(ctx.gateway, request, parse, kNumericHint);

  BehaviorParams out;
  for (Param p : kAllParams) {
    double sum = 0.0;
    for (const auto& s : samples) sum += s.params.Get(p);
    out.Set(p, table.Clamp(p, sum / static_cast<double>(samples.size())));
  }
  std::vector<GaitPreset> gaits;
  for (const auto& s : samples) gaits.push_back(*PresetOf(s.params.gait));
  out.gait = OffsetsOf(MajorityGait(gaits).value_or(GaitPreset::kTrotting));
  return out;
}

namespace {

std::vector<double> Thin(const std::vector<double>& values, std::size_t m) {
  const std::size_t n = values.size();
  if (m >= n) return values;
  if (m <= 1) return {values.front()};
  std::vector<double> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double pos = static_cast<double>(i) * static_cast<double>(n - 1) /
                       static_cast<double>(m - 1);
    out.push_back(values[static_cast<std::size_t>(std::lround(pos))]);
  }
  return out;
}

}  // namespace

std::vector<BehaviorParams> CandidateGrid(const LevelSelection& selection,
                                          const LevelTable& table,
                                          const LssOptions& options) {
  std::array<std::vector<double>, kNumContinuousParams> full, axes;
  for (Param p : kAllParams) {
    const auto i = static_cast<std::size_t>(p);
    full[i] = SampleGrid(p, table.Range(p, selection.level(p)), table);
    axes[i] = full[i];
  }
  std::vector<GaitPreset> gaits = {selection.gait};
  if (options.grid_over_gaits) gaits.assign(kAllGaits.begin(), kAllGaits.end());

  auto count = [&] {
    std::size_t c = gaits.size();
    for (const auto& a : axes) c *= a.size();
    return c;
  };
  const auto cap = static_cast<std::size_t>(options.candidate_cap);
  while (count() > cap) {
    auto widest = std::max_element(axes.begin(), axes.end(),
                                   [](const auto& a, const auto& b) {
                                     return a.size() < b.size();
                                   });
    if (widest->size() <= 2) break;  // endpoints only; cannot thin further
    const auto i = static_cast<std::size_t>(widest - axes.begin());
    axes[i] = Thin(full[i], widest->size() - 1);
  }

  std::vector<BehaviorParams> out;
  out.reserve(count());
  const auto& [h, f, sw, pi, st] = axes;
  for (double vh : h)
    for (double vf : f)
      for (double vsw : sw)
        for (double vpi : pi)
          for (double vst : st)
            for (GaitPreset g : gaits) {
              BehaviorParams b;
              b.body_height = vh;
              b.step_frequency = vf;
              b.swing_height = vsw;
              b.body_pitch = vpi;
              b.stance_width = vst;
              b.gait = OffsetsOf(g);
              out.push_back(b);
            }
  return out;
}

AdaptationResult SelectBest(std::span<const BehaviorParams> candidates,
                            const TerrainSpec& terrain, const CommandVector& cmd,
                            const SimConfig& sim, const RewardConfig& reward,
                            const LevelTable& table) {
  if (candidates.empty()) throw std::invalid_argument("no candidates to select from");
  AdaptationResult result;
  result.variant = MethodVariant::kAutoLssSampling;
  result.terrain = std::string(TerrainName(terrain.kind));
  result.candidates.reserve(candidates.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Trajectory traj = Simulate(terrain, candidates[i], cmd, sim, table);
    const EpisodeReport rep = EpisodePercent(traj.samples, cmd, candidates[i].gait, reward);
    result.candidates.push_back({candidates[i], rep.velocity_xy});
    if (i == 0) continue;
    const CandidateScore& a = result.candidates[i];
    const CandidateScore& b = result.candidates[best];
    if (a.velocity_percent > b.velocity_percent ||
        (a.velocity_percent == b.velocity_percent &&
         (a.params.body_height < b.params.body_height ||
          (a.params.body_height == b.params.body_height &&
           a.params.step_frequency < b.params.step_frequency)))) {
      best = i;
    }
  }
  result.chosen = result.candidates[best].params;
  return result;
}

BehaviorParams MidpointParams(const LevelSelection& selection, const LevelTable& table) {
  BehaviorParams b;
  for (Param p : kAllParams) b.Set(p, table.Range(p, selection.level(p)).Mid());
  b.gait = OffsetsOf(selection.gait);
  return b;
}

namespace {

std::string DeterminingOptions(const LevelTable& table) {
  static constexpr std::array<std::pair<Param, const char*>, kNumContinuousParams>
      kQuestions = {{
          {Param::kBodyHeight, "body height (m)"},
          {Param::kStepFrequency, "stepping frequency (Hz)"},
          {Param::kSwingHeight, "foot swing height (m)"},
          {Param::kBodyPitch, "body pitch (rad)"},
          {Param::kStanceWidth, "foot stance width (m)"},
      }};
  std::ostringstream os;
  int q = 1;
  for (const auto& [p, text] : kQuestions) {
    os << "Q" << q++ << ": What is the proper " << text
       << " for this environment? Choose among ";
    for (int l = kNumLevels - 1; l >= 0; --l) {
      os << Compact(table.Range(p, static_cast<Level>(l)).Mid())
         << (l > 0 ? ", " : ".\n");
    }
  }
  return os.str();
}

}  // namespace

BehaviorParams DeterminingPick(const LevelSelection& selection,
                               const std::string& terrain_description,
                               const std::string& subject, AdaptationContext& ctx) {
  const LevelTable& table = ctx.table;
  ChatRequest request;
  request.template_id = "lss_determining/" + subject;
  request.user = ctx.prompts.Render(
      "lss_determining", {{"terrain_description", terrain_description},
                          {"options", DeterminingOptions(table)}});
  request.temperature = kParsingTemperature;

  auto pick = [&table](const std::string& reply) {
    const auto values = ParseNumericAnswers(reply);
    BehaviorParams b;
    for (Param p : kAllParams) {
      const double v = values[static_cast<std::size_t>(p)];
      bool legal = false;
      for (int l = 0; l < kNumLevels; ++l) {
        if (std::abs(table.Range(p, static_cast<Level>(l)).Mid() - v) < 1e-6) {
          legal = true;
        }
      }
      if (!legal) {
        throw ParseError("A" + std::to_string(static_cast<int>(p) + 1) + " (" +
                         std::string(ParamName(p)) + "): " + Compact(v) +
                         " is not one of the offered options");
      }
      b.Set(p, v);
    }
    return b;
  };

  const std::function<BehaviorParams(const std::string&)> parse = pick;
  BehaviorParams out = SampleAndParse(ctx.gateway, request, parse, kOptionHint).front();
  out.gait = OffsetsOf(selection.gait);
  return out;
}

std::vector<BenchmarkRow> RunBenchmark(const BenchmarkConfig& cfg,
                                       AdaptationContext& ctx) {
  if (cfg.runs < 1) throw std::invalid_argument("runs must be >= 1");
  std::vector<BenchmarkRow> rows;
  for (TerrainKind kind : cfg.terrains) {
    const auto spec_it = cfg.terrain_specs.find(kind);
    const TerrainSpec spec =
        spec_it != cfg.terrain_specs.end() ? spec_it->second : TerrainSpec::Default(kind);
    const std::string name(TerrainName(kind));
    const std::string description = spec.Description();
    std::optional<LevelSelection> selection;
    auto located = [&]() -> const LevelSelection& {
      if (!selection) selection = LocateRanges(description, name, ctx);
      return *selection;
    };

    for (MethodVariant variant : cfg.variants) {
      BenchmarkRow row;
      row.terrain = kind;
      row.variant = variant;
      AdaptationResult& adapt = row.adaptation;
      const std::size_t begin = ctx.gateway.Transcript().size();
      switch (variant) {
        case MethodVariant::kManual: {
          auto it = cfg.manual_params.find(kind);
          if (it == cfg.manual_params.end()) {
            throw ConfigError("no manual parameters for terrain '" + name + "'");
          }
          adapt.chosen = it->second;
          break;
        }
        case MethodVariant::kAuto:
        case MethodVariant::kAutoPrior:
          adapt.chosen = DirectParams(description, name, ctx,
                                      variant == MethodVariant::kAutoPrior);
          break;
        case MethodVariant::kAutoLssSampling: {
          const auto grid = CandidateGrid(located(), ctx.table, ctx.options);
          SimConfig screen = cfg.sim;
          screen.seed = DeriveSeed(cfg.seed, "screen/" + name);
          adapt = SelectBest(grid, spec, cfg.command, screen, cfg.reward, ctx.table);
          break;
        }
        case MethodVariant::kAutoLssDetermining:
          adapt.chosen = DeterminingPick(located(), description, name, ctx);
          break;
      }
      adapt.variant = variant;
      adapt.terrain = name;
      adapt.transcript_begin = begin;
      adapt.transcript_end = ctx.gateway.Transcript().size();

      EpisodeReport sum;
      for (int run = 0; run < cfg.runs; ++run) {
        SimConfig eval = cfg.sim;
        eval.seed = DeriveSeed(cfg.seed, "eval/" + name, static_cast<std::uint64_t>(run));
        const Trajectory traj = Simulate(spec, adapt.chosen, cfg.command, eval, ctx.table);
        const EpisodeReport r =
            EpisodePercent(traj.samples, cfg.command, adapt.chosen.gait, cfg.reward);
        sum.velocity_xy += r.velocity_xy;
        sum.velocity_yaw += r.velocity_yaw;
        sum.swing_force += r.swing_force;
        sum.stance_velocity += r.stance_velocity;
      }
      const double n = cfg.runs;
      row.report = {sum.velocity_xy / n, sum.velocity_yaw / n, sum.swing_force / n,
                    sum.stance_velocity / n};
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string BenchmarkCsv(std::span<const BenchmarkRow> rows) {
  std::string out = "terrain,method,r_vxy,r_wz,r_cf,r_cv\n";
  for (const auto& r : rows) {
    out += std::string(TerrainName(r.terrain)) + "," +
           std::string(VariantLabel(r.variant)) + "," +
           Fixed(r.report.velocity_xy, 2) + "," + Fixed(r.report.velocity_yaw, 2) +
           "," + Fixed(r.report.swing_force, 2) + "," +
           Fixed(r.report.stance_velocity, 2) + "\n";
  }
  return out;
}

std::string CandidateCsv(std::span<const BenchmarkRow> rows) {
  std::string out =
      "terrain,body_height,step_frequency,swing_height,body_pitch,stance_width,"
      "gait,velocity_percent\n";
  for (const auto& r : rows) {
    for (const auto& c : r.adaptation.candidates) {
      out += std::string(TerrainName(r.terrain));
      for (Param p : kAllParams) out += "," + Compact(c.params.Get(p));
      const auto g = PresetOf(c.params.gait);
      out += "," + std::string(g ? GaitName(*g) : "custom") + "," +
             Fixed(c.velocity_percent, 6) + "\n";
    }
  }
  return out;
}

std::map<TerrainKind, BehaviorParams> ManualParamsFromJson(const nlohmann::json& j) {
  std::map<TerrainKind, BehaviorParams> out;
  for (const auto& [name, params] : j.items()) {
    auto kind = ParseTerrainName(name);
    if (!kind) throw ConfigError("manual params: unknown terrain '" + name + "'");
    out[*kind] = BehaviorParamsFromJson(params);
  }
  return out;
}

}  // namespace qgpt
