#include "n1sleep/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "n1sleep/error.hpp"

namespace n1sleep {

namespace chr = std::chrono;

double minutes_between(LocalTime from, LocalTime to) noexcept {
  return static_cast<double>((to - from).count()) / 60.0;
}

Date date_of(LocalTime t) noexcept { return Date{chr::floor<chr::days>(t)}; }

Date next_day(Date d) noexcept { return add_days(d, 1); }

Date add_days(Date d, int n) noexcept {
  return Date{chr::local_days{d} + chr::days{n}};
}

LocalTime midnight_of(Date d) noexcept { return LocalTime{chr::local_days{d}}; }

namespace {

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  if (!std::all_of(first, last, [](char c) { return c >= '0' && c <= '9'; })) return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!parse_fixed(text, 0, 4, y) || !parse_fixed(text, 5, 2, m) || !parse_fixed(text, 8, 2, d))
    return std::nullopt;
  Date date{chr::year{y}, chr::month{static_cast<unsigned>(m)}, chr::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::optional<LocalTime> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!parse_fixed(text, 11, 2, hh) || !parse_fixed(text, 14, 2, mm)) return std::nullopt;
  if (text.size() == 19 && (text[16] != ':' || !parse_fixed(text, 17, 2, ss))) return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  return midnight_of(*date) + chr::hours{hh} + chr::minutes{mm} + chr::seconds{ss};
}

std::string format_date(Date d) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

std::string format_timestamp(LocalTime t) {
  const auto day = chr::floor<chr::days>(t);
  const chr::hh_mm_ss hms{t - day};
  std::string out = fmt::format("{}T{:02d}:{:02d}", format_date(Date{day}), hms.hours().count(),
                                hms.minutes().count());
  if (hms.seconds().count() != 0) out += fmt::format(":{:02d}", hms.seconds().count());
  return out;
}

std::vector<std::string> validate_sleep_session(const SleepSession& s) {
  std::vector<std::string> v;
  if (!(s.wake > s.onset)) v.emplace_back("wake: not after onset");
  if (!std::isfinite(s.latency_min) || s.latency_min < 0) v.emplace_back("latency_min: negative or non-finite");
  if (!std::isfinite(s.awake_min) || s.awake_min < 0) {
    v.emplace_back("awake_min: negative or non-finite");
  } else if (s.wake > s.onset && s.awake_min > s.in_bed_min()) {
    v.emplace_back("awake_min: exceeds in-bed minutes");
  }
  if (s.awakenings_gt5 < 0) v.emplace_back("awakenings_gt5: negative");
  if (!(s.efficiency >= 0.0 && s.efficiency <= 1.0)) v.emplace_back("efficiency: out of [0,1]");
  return v;
}

std::vector<std::string> validate_day_record(const DayRecord& rec) {
  std::vector<std::string> v;
  if (!rec.night_date.ok()) {
    v.emplace_back("night_date: invalid calendar date");
  } else if (rec.night_date != date_of(rec.sleep.onset)) {
    v.emplace_back("night_date: differs from date of sleep onset");
  }
  auto session = validate_sleep_session(rec.sleep);
  v.insert(v.end(), session.begin(), session.end());

  const bool day_ok = std::isfinite(rec.exercise_day_min) && rec.exercise_day_min >= 0;
  const bool week_ok = std::isfinite(rec.exercise_week_min) && rec.exercise_week_min >= 0;
  if (!day_ok) v.emplace_back("exercise_day_min: negative or non-finite");
  if (!week_ok) v.emplace_back("exercise_week_min: negative or non-finite");
  if (day_ok && week_ok && rec.exercise_week_min < rec.exercise_day_min)
    v.emplace_back("exercise_week_min: weekly < daily");

  auto nonneg = [&v](const std::optional<double>& x, const char* field) {
    if (x && !(std::isfinite(*x) && *x >= 0)) v.emplace_back(fmt::format("{}: negative or non-finite", field));
  };
  nonneg(rec.eat_sleep_interval_min, "eat_sleep_interval_min");
  nonneg(rec.awake_between_min, "awake_between_min");
  if (rec.start_temp_f && !std::isfinite(*rec.start_temp_f))
    v.emplace_back("start_temp_f: non-finite");
  if (rec.start_humidity_pct && !(*rec.start_humidity_pct >= 0 && *rec.start_humidity_pct <= 100))
    v.emplace_back("start_humidity_pct: out of [0,100]");
  return v;
}

namespace {

constexpr std::array<std::string_view, kInputCount> kInputNames = {
    "prev_latency",       "prev_awake_min", "prev_awakenings", "prev_efficiency",
    "exercise_day",       "exercise_week",  "eat_sleep_interval", "awake_between",
    "start_temp",         "start_humidity"};

constexpr std::array<std::string_view, kOutputCount> kOutputNames = {
    "latency_min", "awake_min", "awakenings_gt5", "efficiency"};

}  // namespace

std::string_view name_of(InputEvent e) noexcept { return kInputNames[static_cast<std::size_t>(e)]; }

std::string_view name_of(OutputMeasure m) noexcept {
  return kOutputNames[static_cast<std::size_t>(m)];
}

std::optional<InputEvent> input_from_name(std::string_view name) noexcept {
  for (auto e : kAllInputs)
    if (name_of(e) == name) return e;
  return std::nullopt;
}

std::optional<OutputMeasure> output_from_name(std::string_view name) noexcept {
  for (auto m : kAllOutputs)
    if (name_of(m) == name) return m;
  return std::nullopt;
}

InputEvent input_by_name(std::string_view name) {
  if (auto e = input_from_name(name)) return *e;
  throw Error(ErrorKind::UnknownName, fmt::format("unknown input event '{}'", name));
}

OutputMeasure output_by_name(std::string_view name) {
  if (auto m = output_from_name(name)) return *m;
  throw Error(ErrorKind::UnknownName, fmt::format("unknown output measure '{}'", name));
}

std::optional<OutputMeasure> lagged_output(InputEvent e) noexcept {
  switch (e) {
    case InputEvent::PrevLatency: return OutputMeasure::Latency;
    case InputEvent::PrevAwakeMin: return OutputMeasure::AwakeMin;
    case InputEvent::PrevAwakenings: return OutputMeasure::Awakenings;
    case InputEvent::PrevEfficiency: return OutputMeasure::Efficiency;
    default: return std::nullopt;
  }
}

const std::array<InputEvent, kInputCount>& inputs_by_name() noexcept {
  static const auto sorted = [] {
    auto a = kAllInputs;
    std::sort(a.begin(), a.end(), [](auto x, auto y) { return name_of(x) < name_of(y); });
    return a;
  }();
  return sorted;
}

const std::array<OutputMeasure, kOutputCount>& outputs_by_name() noexcept {
  static const auto sorted = [] {
    auto a = kAllOutputs;
    std::sort(a.begin(), a.end(), [](auto x, auto y) { return name_of(x) < name_of(y); });
    return a;
  }();
  return sorted;
}

double output_value(const SleepSession& s, OutputMeasure m) noexcept {
  switch (m) {
    case OutputMeasure::Latency: return s.latency_min;
    case OutputMeasure::AwakeMin: return s.awake_min;
    case OutputMeasure::Awakenings: return static_cast<double>(s.awakenings_gt5);
    case OutputMeasure::Efficiency: return s.efficiency;
  }
  return 0.0;
}

}  // namespace n1sleep
