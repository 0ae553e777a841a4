#include "n1sleep/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "n1sleep/error.hpp"

namespace n1sleep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, 10> kSchemeNames = {
    "latency_min",   "awake_min",          "awakenings_gt5", "efficiency", "exercise_day",
    "exercise_week", "eat_sleep_interval", "awake_between",  "start_temp", "start_humidity"};

Bin closed_open(double lo, double hi, std::string label) { return {lo, hi, true, false, std::move(label)}; }
Bin closed(double lo, double hi, std::string label) { return {lo, hi, true, true, std::move(label)}; }
Bin open_closed(double lo, double hi, std::string label) { return {lo, hi, false, true, std::move(label)}; }
Bin open(double lo, double hi, std::string label) { return {lo, hi, false, false, std::move(label)}; }

struct Domain {
  double lo;
  double hi;
};

Domain domain_for(std::string_view scheme) {
  if (scheme == "efficiency") return {0.0, 1.0};
  if (scheme == "start_humidity") return {0.0, 100.0};
  return {0.0, kInf};
}

Scheme default_scheme(std::string_view name) {
  const auto d = domain_for(name);
  auto make = [&](std::vector<Bin> bins, std::vector<SpecialValue> specials = {},
                  std::vector<std::string> order = {}) {
    return Scheme(std::string(name), std::move(bins), std::move(specials), std::move(order), d.lo, d.hi);
  };
  if (name == "latency_min")
    return make({closed(0, 15, "Good"), open_closed(15, 30, "Average"), open(30, kInf, "Poor")});
  if (name == "awake_min") return make({closed(0, 20, "Good"), open(20, kInf, "Poor")});
  if (name == "awakenings_gt5") return make({closed(0, 1, "Good"), open(1, kInf, "Poor")});
  if (name == "efficiency") return make({closed(0.85, 1.0, "Good"), closed_open(0, 0.85, "Poor")});
  if (name == "exercise_day")
    return make({open_closed(0, 50, "Poor"), open_closed(50, 150, "Average"), open(150, kInf, "Good")},
                {{0.0, "None"}});
  if (name == "exercise_week")
    return make({closed(0, 150, "Poor"), open_closed(150, 300, "Average"), open(300, kInf, "Good")});
  if (name == "eat_sleep_interval")
    return make({open_closed(0, 180, "Poor"), open(180, kInf, "Good")}, {{0.0, "Missing"}});
  if (name == "awake_between")
    return make({closed(0, 900, "Poor"), open_closed(900, 1020, "Average"), open(1020, kInf, "Good")});
  if (name == "start_temp")
    return make({closed(0, 60, "Cold"), open_closed(60, 67, "Comfortable"), open(67, kInf, "Warm")});
  if (name == "start_humidity")
    return make({closed(0, 30, "Low"), open_closed(30, 50, "Ideal"), open_closed(50, 100, "High")});
  throw Error(ErrorKind::UnknownName, fmt::format("unknown scheme '{}'", name));
}

bool is_closed_token(const std::string& s, std::string_view closed_tok, std::string_view open_tok,
                     std::size_t line) {
  if (s == closed_tok) return true;
  if (s == open_tok) return false;
  throw Error(ErrorKind::Spec, fmt::format("line {}: expected \"{}\" or \"{}\", got \"{}\"", line,
                                           closed_tok, open_tok, s));
}

Scheme scheme_from_section(std::string_view name, const config::Section& sec) {
  std::vector<Bin> bins;
  std::vector<SpecialValue> specials;
  std::vector<std::string> order;
  // Without an explicit `order`, categories follow key order in the section.
  std::vector<std::string> natural;

  for (const auto& entry : sec.entries) {
    const auto& v = entry.value;
    if (entry.key == "bins") {
      for (const auto& item : v.as_array("bins")) {
        const auto& b = item.as_array("bins entry");
        if (b.size() != 5)
          throw Error(ErrorKind::Spec,
                      fmt::format("line {}: bins entry needs [lo, hi, \"lc|lo\", \"rc|ro\", \"Label\"]", item.line));
        Bin bin{b[0].as_number("bin lower"), b[1].as_number("bin upper"),
                is_closed_token(b[2].as_string("lower closedness"), "lc", "lo", item.line),
                is_closed_token(b[3].as_string("upper closedness"), "rc", "ro", item.line),
                b[4].as_string("bin label")};
        natural.push_back(bin.label);
        bins.push_back(std::move(bin));
      }
    } else if (entry.key == "special") {
      for (const auto& item : v.as_array("special")) {
        const auto& s = item.as_array("special entry");
        if (s.size() != 2)
          throw Error(ErrorKind::Spec, fmt::format("line {}: special entry needs [value, \"Label\"]", item.line));
        SpecialValue sv{s[0].as_number("special value"), s[1].as_string("special label")};
        natural.push_back(sv.label);
        specials.push_back(std::move(sv));
      }
    } else if (entry.key == "order") {
      for (const auto& item : v.as_array("order")) order.push_back(item.as_string("order entry"));
    } else {
      throw Error(ErrorKind::Spec, fmt::format("line {}: unknown key '{}' in [{}]", v.line, entry.key, sec.name));
    }
  }
  if (order.empty()) order = std::move(natural);
  const auto d = domain_for(name);
  return Scheme(std::string(name), std::move(bins), std::move(specials), std::move(order), d.lo, d.hi);
}

}  // namespace

bool Bin::contains(double x) const noexcept {
  const bool above = lower_closed ? x >= lower : x > lower;
  const bool below = upper_closed ? x <= upper : x < upper;
  return above && below;
}

Scheme::Scheme(std::string name, std::vector<Bin> bins, std::vector<SpecialValue> specials,
               std::vector<std::string> order, double domain_lo, double domain_hi)
    : name_(std::move(name)),
      bins_(std::move(bins)),
      specials_(std::move(specials)),
      domain_lo_(domain_lo),
      domain_hi_(domain_hi) {
  auto fail = [this](const std::string& why) {
    throw Error(ErrorKind::Spec, fmt::format("scheme '{}': {}", name_, why));
  };

  std::vector<std::string> all;
  for (const auto& s : specials_) all.push_back(s.label);
  for (const auto& b : bins_) all.push_back(b.label);
  if (all.empty()) fail("no categories");
  for (const auto& l : all)
    if (l.empty()) fail("empty category label");
  {
    auto sorted = all;
    std::sort(sorted.begin(), sorted.end());
    if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end())
      fail(fmt::format("duplicate label '{}'", *dup));
  }

  labels_ = order.empty() ? all : std::move(order);
  {
    auto a = labels_, b = all;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) fail("order must list every category label exactly once");
  }
  for (const auto& b : bins_) bin_category_.push_back(*index_of(b.label));
  for (const auto& s : specials_) special_category_.push_back(*index_of(s.label));

  for (const auto& b : bins_) {
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper ||
        (b.lower == b.upper && !(b.lower_closed && b.upper_closed)))
      fail(fmt::format("bin '{}' is empty or malformed", b.label));
    if ((std::isinf(b.lower) && b.lower_closed) || (std::isinf(b.upper) && b.upper_closed))
      fail(fmt::format("bin '{}' closes an infinite endpoint", b.label));
  }
  for (const auto& s : specials_)
    if (!std::isfinite(s.value)) fail(fmt::format("special '{}' is not finite", s.label));

  // Disjointness: sweep bins and degenerate special "bins" in order of lower bound.
  std::vector<Bin> pieces = bins_;
  for (const auto& s : specials_) pieces.push_back(Bin{s.value, s.value, true, true, s.label});
  std::sort(pieces.begin(), pieces.end(), [](const Bin& x, const Bin& y) {
    if (x.lower != y.lower) return x.lower < y.lower;
    return x.lower_closed && !y.lower_closed;
  });
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    const auto& p = pieces[i - 1];
    const auto& q = pieces[i];
    if (p.upper > q.lower || (p.upper == q.lower && p.upper_closed && q.lower_closed))
      fail(fmt::format("categories '{}' and '{}' overlap", p.label, q.label));
  }

  // Coverage of [domain_lo, domain_hi]: walk the sorted pieces without gaps.
  double reach = domain_lo_;
  bool reach_closed = false;  // whether `reach` itself is already covered
  bool started = false;
  for (const auto& p : pieces) {
    if (p.upper < domain_lo_ || (p.upper == domain_lo_ && !p.upper_closed)) continue;
    if (p.lower > domain_hi_) break;
    if (!started) {
      if (p.lower > domain_lo_ || (p.lower == domain_lo_ && !p.lower_closed))
        fail(fmt::format("domain lower bound {} is not covered", domain_lo_));
      started = true;
    } else if (p.lower > reach || (p.lower == reach && !reach_closed && !p.lower_closed)) {
      fail(fmt::format("gap in coverage at {}", reach));
    }
    reach = p.upper;
    reach_closed = p.upper_closed;
  }
  const bool covers_hi = started && (reach > domain_hi_ || (reach == domain_hi_ &&
                                                            (reach_closed || std::isinf(domain_hi_))));
  if (!covers_hi) fail(fmt::format("coverage stops at {}", reach));
}

std::optional<CategoryIndex> Scheme::index_of(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return static_cast<CategoryIndex>(i);
  return std::nullopt;
}

std::optional<CategoryIndex> Scheme::try_categorize(double value) const noexcept {
  if (std::isnan(value)) return std::nullopt;
  for (std::size_t i = 0; i < specials_.size(); ++i)
    if (specials_[i].value == value) return special_category_[i];
  for (std::size_t i = 0; i < bins_.size(); ++i)
    if (bins_[i].contains(value)) return bin_category_[i];
  return std::nullopt;
}

CategoryIndex Scheme::categorize(double value) const {
  if (auto c = try_categorize(value)) return *c;
  throw Error(ErrorKind::Domain, fmt::format("value {} is outside every category of scheme '{}'", value, name_));
}

CategoryIndex categorize(double value, const Scheme& scheme) { return scheme.categorize(value); }

std::span<const std::string_view> scheme_names() noexcept { return kSchemeNames; }

SchemeSet SchemeSet::defaults() {
  SchemeSet set;
  for (auto name : kSchemeNames) set.schemes_.push_back(default_scheme(name));
  set.relink();
  return set;
}

SchemeSet SchemeSet::from_config(const config::Document& doc) {
  SchemeSet set = defaults();
  constexpr std::string_view prefix = "scheme.";
  for (const auto& sec : doc.sections) {
    if (!sec.name.starts_with(prefix))
      throw Error(ErrorKind::Spec, fmt::format("{}:{}: unexpected section [{}]", doc.source, sec.line, sec.name));
    const std::string_view name = std::string_view(sec.name).substr(prefix.size());
    set.slot(name) = scheme_from_section(name, sec);
  }
  set.relink();
  return set;
}

SchemeSet SchemeSet::load(const std::filesystem::path& path) { return from_config(config::load(path)); }

Scheme& SchemeSet::slot(std::string_view name) {
  for (auto& s : schemes_)
    if (s.name() == name) return s;
  throw Error(ErrorKind::UnknownName, fmt::format("unknown scheme '{}'", name));
}

const Scheme& SchemeSet::by_name(std::string_view name) const {
  for (const auto& s : schemes_)
    if (s.name() == name) return s;
  throw Error(ErrorKind::UnknownName, fmt::format("unknown scheme '{}'", name));
}

const Scheme& SchemeSet::for_input(InputEvent e) const noexcept {
  return schemes_[inputs_[static_cast<std::size_t>(e)]];
}

void SchemeSet::relink() {
  auto index = [this](std::string_view name) {
    return static_cast<std::size_t>(&by_name(name) - schemes_.data());
  };
  for (auto m : kAllOutputs) outputs_[static_cast<std::size_t>(m)] = index(name_of(m));
  for (auto e : kAllInputs) {
    auto lag = lagged_output(e);
    inputs_[static_cast<std::size_t>(e)] = lag ? outputs_[static_cast<std::size_t>(*lag)] : index(name_of(e));
  }
}

std::vector<FeatureRow> derive_features(std::span<const DayRecord> records, const SchemeSet& schemes) {
  std::vector<FeatureRow> rows;
  if (records.size() < 2) return rows;
  rows.reserve(records.size() - 1);

  auto output_categories = [&](const DayRecord& r) {
    std::array<CategoryIndex, kOutputCount> cats{};
    for (auto m : kAllOutputs)
      cats[static_cast<std::size_t>(m)] = schemes.for_output(m).categorize(output_value(r.sleep, m));
    return cats;
  };

  auto prev_cats = output_categories(records[0]);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const DayRecord& prev = records[i - 1];
    const DayRecord& cur = records[i];
    const auto cur_cats = output_categories(cur);
    if (cur.night_date == next_day(prev.night_date)) {
      FeatureRow row;
      row.night_date = cur.night_date;
      row.output_categories = cur_cats;
      for (auto m : kAllOutputs) row.outputs[static_cast<std::size_t>(m)] = output_value(cur.sleep, m);

      auto set = [&row](InputEvent e, CategoryIndex c) { row.inputs[static_cast<std::size_t>(e)] = c; };
      set(InputEvent::PrevLatency, prev_cats[static_cast<std::size_t>(OutputMeasure::Latency)]);
      set(InputEvent::PrevAwakeMin, prev_cats[static_cast<std::size_t>(OutputMeasure::AwakeMin)]);
      set(InputEvent::PrevAwakenings, prev_cats[static_cast<std::size_t>(OutputMeasure::Awakenings)]);
      set(InputEvent::PrevEfficiency, prev_cats[static_cast<std::size_t>(OutputMeasure::Efficiency)]);
      set(InputEvent::ExerciseDay, schemes.for_input(InputEvent::ExerciseDay).categorize(cur.exercise_day_min));
      set(InputEvent::ExerciseWeek, schemes.for_input(InputEvent::ExerciseWeek).categorize(cur.exercise_week_min));

      const auto& eat = schemes.for_input(InputEvent::EatSleepInterval);
      if (cur.eat_sleep_interval_min) {
        set(InputEvent::EatSleepInterval, eat.categorize(*cur.eat_sleep_interval_min));
      } else {
        set(InputEvent::EatSleepInterval, eat.index_of("Missing").value_or(kUnavailable));
      }

      auto optional_input = [&](InputEvent e, const std::optional<double>& v) {
        std::optional<CategoryIndex> c;
        if (v) c = schemes.for_input(e).try_categorize(*v);
        set(e, c.value_or(kUnavailable));
      };
      if (cur.awake_between_min) {
        set(InputEvent::AwakeBetween, schemes.for_input(InputEvent::AwakeBetween).categorize(*cur.awake_between_min));
      } else {
        set(InputEvent::AwakeBetween, kUnavailable);
      }
      optional_input(InputEvent::StartTemp, cur.start_temp_f);
      optional_input(InputEvent::StartHumidity, cur.start_humidity_pct);
      rows.push_back(row);
    }
    prev_cats = cur_cats;
  }
  return rows;
}

}  // namespace n1sleep
