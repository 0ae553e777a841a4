#include "n1sleep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "n1sleep/error.hpp"

namespace n1sleep::synth {

namespace {

namespace chr = std::chrono;

constexpr std::array<InputEvent, 6> kLifestyle = {InputEvent::ExerciseDay,  InputEvent::ExerciseWeek,
                                                  InputEvent::EatSleepInterval, InputEvent::AwakeBetween,
                                                  InputEvent::StartTemp,    InputEvent::StartHumidity};

constexpr int kMinSleepMin = 180;
constexpr int kEveningFrom = 20 * 60;
constexpr int kEveningTo = 23 * 60 + 30;
constexpr int kDayMin = 24 * 60;
// Gaps are drawn no shorter than this when the category allows, keeping sessions plausible.
constexpr double kTypicalWakeMin = 600.0;
constexpr double kIndoorTempFloorF = 50.0;
constexpr int kMaxDraws = 10000;

[[noreturn]] void spec_error(const std::string& what) { throw Error(ErrorKind::Spec, what); }

// Portable transforms over mt19937_64 so output does not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  double exponential(double mean) { return -mean * std::log(uniform()); }

  std::size_t pick(const std::vector<double>& probs) {
    const double u = uniform();
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last = i;
      acc += probs[i];
      if (u < acc) return i;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
};

// Rounds to a multiple of `step` (a power of ten); dividing by the exact integer scale
// yields the double nearest the decimal.
double round_to(double v, double step) {
  const double scale = std::round(1.0 / step);
  return std::round(v * scale) / scale;
}

std::vector<double> marginals_for(const GeneratorSpec& spec, const SchemeSet& schemes, InputEvent e) {
  if (auto it = spec.input_marginals.find(e); it != spec.input_marginals.end()) return it->second;
  const auto n = schemes.categories(e);
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

// Draws a value in category `cat` of `scheme`, no smaller than `floor`, rounded to
// `step`, and accepted only when it categorizes back to `cat` and passes `ok`.
template <class Accept>
double draw_in_category(Rng& rng, const Scheme& scheme, CategoryIndex cat, double floor, double step, Accept ok) {
  const std::string& label = scheme.label(cat);
  for (const auto& s : scheme.specials())
    if (s.label == label) {
      if (s.value < floor || !ok(s.value)) spec_error(fmt::format("category '{}' of '{}' is infeasible", label, scheme.name()));
      return s.value;
    }
  const Bin* bin = nullptr;
  for (const auto& b : scheme.bins())
    if (b.label == label) bin = &b;
  if (!bin) spec_error(fmt::format("category '{}' missing from scheme '{}'", label, scheme.name()));

  const double lo = std::max({bin->lower, floor, scheme.domain_lo()});
  const double hi = std::min(bin->upper, scheme.domain_hi());
  const double tail_mean = std::max(10.0, 0.1 * std::fabs(lo));
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    double v = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi)) {
      v = rng.uniform(lo, hi);
    } else if (std::isfinite(lo)) {
      v = lo + rng.exponential(tail_mean);
    } else if (std::isfinite(hi)) {
      v = hi - rng.exponential(std::max(10.0, 0.1 * std::fabs(hi)));
    } else {
      v = rng.normal() * 100.0;
    }
    v = round_to(v, step);
    if (v >= floor && scheme.try_categorize(v) == cat && ok(v)) return v;
  }
  spec_error(fmt::format("could not draw a value in category '{}' of '{}'", label, scheme.name()));
}

double draw_in_category(Rng& rng, const Scheme& scheme, CategoryIndex cat, double floor, double step) {
  return draw_in_category(rng, scheme, cat, floor, step, [](double) { return true; });
}

bool category_can_reach(const Scheme& scheme, CategoryIndex cat, double floor) {
  const std::string& label = scheme.label(cat);
  for (const auto& s : scheme.specials())
    if (s.label == label) return s.value >= floor;
  for (const auto& b : scheme.bins())
    if (b.label == label) return b.upper > floor || (b.upper == floor && b.upper_closed);
  return false;
}

struct Night {
  std::array<CategoryIndex, kInputCount> lifestyle{};
  double exercise_day = 0.0;
  double exercise_week = 0.0;
  std::optional<double> eat_interval;
  std::optional<double> awake_between;
  double temp = 0.0;
  double humidity = 0.0;
  LocalTime onset;
  LocalTime wake;
};

struct ResolvedLink {
  InputEvent event;
  CategoryIndex category;
  std::size_t output;
  double delta;
};

std::vector<ResolvedLink> resolve(const std::vector<Link>& links, const SchemeSet& schemes) {
  std::vector<ResolvedLink> out;
  for (const auto& l : links)
    out.push_back({l.event, *schemes.for_input(l.event).index_of(l.category), static_cast<std::size_t>(l.output),
                   l.delta});
  return out;
}

}  // namespace

void validate(const GeneratorSpec& spec, const SchemeSet& schemes) {
  if (spec.n_days < 2) spec_error(fmt::format("n_days must be >= 2, got {}", spec.n_days));
  if (!spec.start_date.ok()) spec_error("start_date is not a valid calendar date");
  if (!(spec.carryover >= 0.0 && spec.carryover < 1.0))
    spec_error(fmt::format("carryover must be in [0,1), got {}", spec.carryover));
  for (auto m : kAllOutputs) {
    const auto i = static_cast<std::size_t>(m);
    if (!std::isfinite(spec.baseline_means[i]))
      spec_error(fmt::format("baseline mean for '{}' must be finite", name_of(m)));
    if (!(spec.noise_sd[i] > 0.0) || !std::isfinite(spec.noise_sd[i]))
      spec_error(fmt::format("noise_sd for '{}' must be positive", name_of(m)));
  }
  for (const auto& [event, probs] : spec.input_marginals) {
    if (lagged_output(event))
      spec_error(fmt::format("'{}' follows from the previous night and takes no marginal", name_of(event)));
    const auto n = schemes.categories(event);
    if (probs.size() != n)
      spec_error(fmt::format("marginal for '{}' needs {} probabilities, got {}", name_of(event), n, probs.size()));
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p))
        spec_error(fmt::format("marginal for '{}' has an invalid probability", name_of(event)));
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      spec_error(fmt::format("marginal for '{}' sums to {}, not 1", name_of(event), sum));
  }
  auto check_links = [&](const std::vector<Link>& links, const char* what) {
    for (const auto& l : links) {
      if (!schemes.for_input(l.event).index_of(l.category))
        spec_error(fmt::format("{}: '{}' has no category '{}'", what, name_of(l.event), l.category));
      if (!std::isfinite(l.delta)) spec_error(fmt::format("{}: delta must be finite", what));
    }
  };
  check_links(spec.planted_effects, "planted effect");
  check_links(spec.confounder_links, "confounder link");
}

GeneratedData generate(const GeneratorSpec& spec, const SchemeSet& schemes) {
  validate(spec, schemes);
  Rng rng(spec.seed);
  const auto n = static_cast<std::size_t>(spec.n_days);

  std::array<std::vector<double>, kInputCount> marginals;
  for (auto e : kLifestyle) marginals[static_cast<std::size_t>(e)] = marginals_for(spec, schemes, e);
  auto pick = [&](InputEvent e) { return static_cast<CategoryIndex>(rng.pick(marginals[static_cast<std::size_t>(e)])); };
  auto set = [](Night& night, InputEvent e, CategoryIndex c) { night.lifestyle[static_cast<std::size_t>(e)] = c; };

  // Pass 1: lifestyle inputs and the sleep timeline.
  std::vector<Night> nights(n);
  int prev_tod = 0;
  for (std::size_t d = 0; d < n; ++d) {
    Night& night = nights[d];

    const auto& day_scheme = schemes.for_input(InputEvent::ExerciseDay);
    const auto day_cat = pick(InputEvent::ExerciseDay);
    night.exercise_day = draw_in_category(rng, day_scheme, day_cat, 0.0, 0.1);
    set(night, InputEvent::ExerciseDay, day_cat);

    const auto& week_scheme = schemes.for_input(InputEvent::ExerciseWeek);
    auto week_cat = pick(InputEvent::ExerciseWeek);
    if (!category_can_reach(week_scheme, week_cat, night.exercise_day)) {
      auto probs = marginals[static_cast<std::size_t>(InputEvent::ExerciseWeek)];
      for (std::size_t c = 0; c < probs.size(); ++c)
        if (!category_can_reach(week_scheme, static_cast<CategoryIndex>(c), night.exercise_day)) probs[c] = 0.0;
      double total = 0.0;
      for (double p : probs) total += p;
      if (total <= 0.0) {
        // No listed weekly category can hold today's minutes; fall back to any that can.
        for (std::size_t c = 0; c < probs.size(); ++c)
          probs[c] = category_can_reach(week_scheme, static_cast<CategoryIndex>(c), night.exercise_day) ? 1.0 : 0.0;
      }
      week_cat = static_cast<CategoryIndex>(rng.pick(probs));
    }
    night.exercise_week = draw_in_category(rng, week_scheme, week_cat, night.exercise_day, 0.1);
    set(night, InputEvent::ExerciseWeek, week_cat);

    const auto& eat_scheme = schemes.for_input(InputEvent::EatSleepInterval);
    const auto eat_cat = pick(InputEvent::EatSleepInterval);
    if (eat_scheme.label(eat_cat) != "Missing")
      night.eat_interval = draw_in_category(rng, eat_scheme, eat_cat, 0.0, 0.1);
    set(night, InputEvent::EatSleepInterval, eat_cat);

    const auto& temp_scheme = schemes.for_input(InputEvent::StartTemp);
    const auto temp_cat = pick(InputEvent::StartTemp);
    const double temp_floor = category_can_reach(temp_scheme, temp_cat, kIndoorTempFloorF)
                                  ? std::max(kIndoorTempFloorF, temp_scheme.domain_lo())
                                  : temp_scheme.domain_lo();
    night.temp = draw_in_category(rng, temp_scheme, temp_cat, temp_floor, 0.1);
    set(night, InputEvent::StartTemp, temp_cat);

    const auto& hum_scheme = schemes.for_input(InputEvent::StartHumidity);
    const auto hum_cat = pick(InputEvent::StartHumidity);
    night.humidity = draw_in_category(rng, hum_scheme, hum_cat, hum_scheme.domain_lo(), 0.1);
    set(night, InputEvent::StartHumidity, hum_cat);

    // Onset falls on night d's calendar date; the previous session stretches or
    // shrinks to honour the drawn awake-between gap while lasting >= kMinSleepMin.
    const LocalTime day_start = midnight_of(add_days(spec.start_date, static_cast<int>(d)));
    int tod = 0;
    if (d == 0) {
      tod = rng.uniform_int(kEveningFrom, kEveningTo);
      set(night, InputEvent::AwakeBetween, kUnavailable);
    } else {
      const auto& gap_scheme = schemes.for_input(InputEvent::AwakeBetween);
      const auto gap_cat = pick(InputEvent::AwakeBetween);
      const int max_gap = 2 * kDayMin - 1 - prev_tod - kMinSleepMin;
      const double gap_floor = category_can_reach(gap_scheme, gap_cat, kTypicalWakeMin) ? kTypicalWakeMin : 0.0;
      const double gap = draw_in_category(rng, gap_scheme, gap_cat, gap_floor, 1.0,
                                          [max_gap](double v) { return v <= max_gap; });
      const int gap_min = static_cast<int>(gap);
      const int earliest = std::max(0, prev_tod + kMinSleepMin + gap_min - kDayMin);
      tod = std::max(rng.uniform_int(kEveningFrom, kEveningTo), earliest);
      night.awake_between = gap;
      set(night, InputEvent::AwakeBetween, gap_cat);
      nights[d - 1].wake = day_start + chr::minutes{tod - gap_min};
    }
    night.onset = day_start + chr::minutes{tod};
    prev_tod = tod;
  }
  nights[n - 1].wake = nights[n - 1].onset + chr::minutes{rng.uniform_int(420, 540)};

  // Pass 2: outputs, sequential because of carryover and previous-night categories.
  const auto planted = resolve(spec.planted_effects, schemes);
  const auto linked = resolve(spec.confounder_links, schemes);
  GeneratedData out;
  out.records.reserve(n);
  std::array<double, kOutputCount> noise{};
  std::array<CategoryIndex, kOutputCount> prev_cats{};
  for (std::size_t d = 0; d < n; ++d) {
    const Night& night = nights[d];
    auto category_of = [&](InputEvent e) -> CategoryIndex {
      if (auto lag = lagged_output(e)) return d == 0 ? kUnavailable : prev_cats[static_cast<std::size_t>(*lag)];
      return night.lifestyle[static_cast<std::size_t>(e)];
    };

    std::array<double, kOutputCount> raw = spec.baseline_means;
    for (const auto* links : {&planted, &linked})
      for (const auto& l : *links)
        if (category_of(l.event) == l.category) raw[l.output] += l.delta;
    for (std::size_t m = 0; m < kOutputCount; ++m) {
      noise[m] = spec.carryover * noise[m] + spec.noise_sd[m] * rng.normal();
      raw[m] += noise[m];
    }

    DayRecord rec;
    rec.night_date = add_days(spec.start_date, static_cast<int>(d));
    rec.sleep.onset = night.onset;
    rec.sleep.wake = night.wake;
    const double in_bed = rec.sleep.in_bed_min();
    auto clamp = [&](OutputMeasure m, double v, double lo, double hi) {
      if (v < lo || v > hi) ++out.clamped[static_cast<std::size_t>(m)];
      return std::clamp(v, lo, hi);
    };
    rec.sleep.latency_min = round_to(clamp(OutputMeasure::Latency, raw[0], 0.0, in_bed), 0.01);
    rec.sleep.awake_min = round_to(clamp(OutputMeasure::AwakeMin, raw[1], 0.0, in_bed), 0.01);
    rec.sleep.awakenings_gt5 = static_cast<int>(std::lround(clamp(OutputMeasure::Awakenings, raw[2], 0.0, 1e6)));
    rec.sleep.efficiency = round_to(clamp(OutputMeasure::Efficiency, raw[3], 0.0, 1.0), 1e-4);
    rec.sleep.awake_min = std::min(rec.sleep.awake_min, in_bed);
    rec.exercise_day_min = night.exercise_day;
    rec.exercise_week_min = night.exercise_week;
    rec.eat_sleep_interval_min = night.eat_interval;
    rec.awake_between_min = night.awake_between;
    rec.start_temp_f = night.temp;
    rec.start_humidity_pct = night.humidity;

    for (auto m : kAllOutputs)
      prev_cats[static_cast<std::size_t>(m)] = schemes.for_output(m).categorize(output_value(rec.sleep, m));
    out.records.push_back(std::move(rec));
  }
  return out;
}

namespace {

std::vector<Link> links_from(const config::Value& v, const char* what) {
  std::vector<Link> out;
  for (const auto& item : v.as_array(what)) {
    const auto& parts = item.as_array(what);
    if (parts.size() != 4)
      spec_error(fmt::format("line {}: {} entries need [event, \"Category\", output, delta]", item.line, what));
    const auto& event = parts[0].as_string("event");
    const auto& output = parts[2].as_string("output");
    auto e = input_from_name(event);
    auto m = output_from_name(output);
    if (!e) spec_error(fmt::format("line {}: unknown input event '{}'", item.line, event));
    if (!m) spec_error(fmt::format("line {}: unknown output measure '{}'", item.line, output));
    out.push_back({*e, parts[1].as_string("category"), *m, parts[3].as_number("delta")});
  }
  return out;
}

void per_output(const config::Section& sec, std::array<double, kOutputCount>& target) {
  for (const auto& entry : sec.entries) {
    auto m = output_from_name(entry.key);
    if (!m) spec_error(fmt::format("line {}: unknown output measure '{}' in [{}]", entry.value.line, entry.key, sec.name));
    target[static_cast<std::size_t>(*m)] = entry.value.as_number(entry.key);
  }
}

}  // namespace

GeneratorSpec spec_from_config(const config::Document& doc) {
  GeneratorSpec spec;
  for (const auto& sec : doc.sections) {
    if (sec.name == "generator") {
      for (const auto& entry : sec.entries) {
        const auto& v = entry.value;
        if (entry.key == "n_days") {
          const double d = v.as_number("n_days");
          if (d != std::floor(d) || d < 0 || d > 1e7) spec_error(fmt::format("line {}: n_days must be a whole number", v.line));
          spec.n_days = static_cast<int>(d);
        } else if (entry.key == "seed") {
          const double s = v.as_number("seed");
          if (s != std::floor(s) || s < 0 || s > 9007199254740992.0)
            spec_error(fmt::format("line {}: seed must be a non-negative whole number", v.line));
          spec.seed = static_cast<std::uint64_t>(s);
        } else if (entry.key == "carryover") {
          spec.carryover = v.as_number("carryover");
        } else if (entry.key == "start_date") {
          auto date = parse_date(v.as_string("start_date"));
          if (!date) spec_error(fmt::format("line {}: start_date must be YYYY-MM-DD", v.line));
          spec.start_date = *date;
        } else {
          spec_error(fmt::format("line {}: unknown key '{}' in [generator]", v.line, entry.key));
        }
      }
    } else if (sec.name == "baseline_means") {
      per_output(sec, spec.baseline_means);
    } else if (sec.name == "noise_sd") {
      per_output(sec, spec.noise_sd);
    } else if (sec.name == "input_marginals") {
      for (const auto& entry : sec.entries) {
        auto e = input_from_name(entry.key);
        if (!e) spec_error(fmt::format("line {}: unknown input event '{}'", entry.value.line, entry.key));
        std::vector<double> probs;
        for (const auto& p : entry.value.as_array(entry.key)) probs.push_back(p.as_number(entry.key));
        spec.input_marginals[*e] = std::move(probs);
      }
    } else if (sec.name == "effects") {
      for (const auto& entry : sec.entries) {
        if (entry.key == "planted") {
          spec.planted_effects = links_from(entry.value, "planted");
        } else if (entry.key == "confounders") {
          spec.confounder_links = links_from(entry.value, "confounders");
        } else {
          spec_error(fmt::format("line {}: unknown key '{}' in [effects]", entry.value.line, entry.key));
        }
      }
    } else {
      spec_error(fmt::format("{}:{}: unknown section [{}]", doc.source, sec.line, sec.name));
    }
  }
  return spec;
}

GeneratorSpec load_spec(const std::filesystem::path& path) { return spec_from_config(config::load(path)); }

}  // namespace n1sleep::synth
