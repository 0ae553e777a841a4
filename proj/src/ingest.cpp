#include "n1sleep/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "n1sleep/error.hpp"

namespace n1sleep {

namespace chr = std::chrono;

std::string read_text_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorKind::File, fmt::format("cannot open '{}': no such file", path.string()));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::File, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::File, fmt::format("read failed for '{}'", path.string()));
  return buf.str();
}

std::string format_real(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

struct CsvRow {
  std::size_t line;
  std::vector<std::string> fields;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// RFC 4180 style fields; quoted fields may contain commas and doubled quotes but not newlines.
std::vector<std::string> split_csv_line(std::string_view line, const std::string& source, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && trim(cur).empty()) {
      quoted = true;
      was_quoted = true;
      cur.clear();
    } else if (c == ',') {
      out.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError(source, lineno, "", "unterminated quoted field");
  out.push_back(was_quoted ? cur : std::string(trim(cur)));
  return out;
}

// Header plus data rows; blank lines are skipped. An entirely empty input has no rows.
std::vector<CsvRow> read_csv(std::string_view text, const std::string& source, std::span<const std::string_view> header) {
  std::vector<CsvRow> rows;
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::size_t lineno = 0;
  bool saw_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, source, lineno);
    if (!saw_header) {
      saw_header = true;
      bool ok = fields.size() == header.size();
      for (std::size_t i = 0; ok && i < header.size(); ++i) ok = fields[i] == header[i];
      if (!ok) {
        std::string expected;
        for (auto h : header) expected += expected.empty() ? std::string(h) : "," + std::string(h);
        throw ParseError(source, lineno, "", fmt::format("expected header '{}'", expected));
      }
      continue;
    }
    if (fields.size() != header.size())
      throw ParseError(source, lineno, "",
                       fmt::format("expected {} fields, found {}", header.size(), fields.size()));
    rows.push_back({lineno, std::move(fields)});
  }
  return rows;
}

class RowReader {
 public:
  RowReader(const CsvRow& row, const std::string& source, std::span<const std::string_view> header)
      : row_(row), source_(source), header_(header) {}

  [[noreturn]] void fail(std::size_t col, const std::string& reason) const {
    throw ParseError(source_, row_.line, std::string(header_[col]), reason);
  }

  [[noreturn]] void fail_row(const std::string& reason) const {
    throw ParseError(source_, row_.line, "", reason);
  }

  bool empty(std::size_t col) const { return row_.fields[col].empty(); }

  LocalTime timestamp(std::size_t col) const {
    auto t = parse_timestamp(row_.fields[col]);
    if (!t) fail(col, fmt::format("invalid timestamp '{}'", row_.fields[col]));
    return *t;
  }

  Date date(std::size_t col) const {
    auto d = parse_date(row_.fields[col]);
    if (!d) fail(col, fmt::format("invalid date '{}'", row_.fields[col]));
    return *d;
  }

  double real(std::size_t col) const {
    const std::string& s = row_.fields[col];
    std::string_view v = s;
    if (!v.empty() && v.front() == '+') v.remove_prefix(1);
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(d))
      fail(col, fmt::format("invalid number '{}'", s));
    return d;
  }

  std::optional<double> optional_real(std::size_t col) const {
    if (empty(col)) return std::nullopt;
    return real(col);
  }

  int count(std::size_t col) const {
    const double d = real(col);
    if (d != std::floor(d) || d < 0 || d > 1e9) fail(col, fmt::format("expected a non-negative integer, got '{}'", row_.fields[col]));
    return static_cast<int>(d);
  }

  const std::string& text(std::size_t col) const { return row_.fields[col]; }

 private:
  const CsvRow& row_;
  const std::string& source_;
  std::span<const std::string_view> header_;
};

constexpr std::string_view kSleepHeader[] = {"onset", "wake", "latency_min", "awake_min", "awakenings_gt5", "efficiency"};
constexpr std::string_view kActivityHeader[] = {"start", "duration_min", "kind"};
constexpr std::string_view kEnvHeader[] = {"at", "temperature_f", "humidity_pct"};
constexpr std::string_view kMealHeader[] = {"at"};
constexpr std::string_view kRecordHeader[] = {
    "night_date",        "onset",          "wake",         "latency_min",
    "awake_min",         "awakenings_gt5", "efficiency",   "exercise_day_min",
    "exercise_week_min", "eat_sleep_interval_min", "awake_between_min", "start_temp_f",
    "start_humidity_pct"};

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += out.empty() ? p : "; " + p;
  return out;
}

template <class T, class Key>
void require_sorted(std::span<const T> xs, Key key, const char* what) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (key(xs[i]) < key(xs[i - 1]))
      throw Error(ErrorKind::InvalidArgument, fmt::format("{} must be sorted by time", what));
}

}  // namespace

std::vector<SleepSession> parse_sleep_csv(std::string_view text, const std::string& source) {
  std::vector<SleepSession> out;
  for (const auto& row : read_csv(text, source, kSleepHeader)) {
    RowReader r(row, source, kSleepHeader);
    SleepSession s{r.timestamp(0), r.timestamp(1), r.real(2), r.real(3), r.count(4), r.real(5)};
    if (auto v = validate_sleep_session(s); !v.empty()) r.fail_row(join(v));
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const SleepSession& a, const SleepSession& b) {
    return std::tie(a.onset, a.wake, a.latency_min, a.awake_min, a.awakenings_gt5, a.efficiency) <
           std::tie(b.onset, b.wake, b.latency_min, b.awake_min, b.awakenings_gt5, b.efficiency);
  });
  return out;
}

std::vector<ActivityEvent> parse_activity_csv(std::string_view text, const std::string& source) {
  std::vector<ActivityEvent> out;
  for (const auto& row : read_csv(text, source, kActivityHeader)) {
    RowReader r(row, source, kActivityHeader);
    ActivityEvent a{r.timestamp(0), r.real(1), r.text(2)};
    if (!(a.duration_min > 0)) r.fail(1, "duration must be positive");
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), [](const ActivityEvent& a, const ActivityEvent& b) {
    return std::tie(a.start, a.duration_min, a.kind) < std::tie(b.start, b.duration_min, b.kind);
  });
  return out;
}

std::vector<EnvSample> parse_environment_csv(std::string_view text, const std::string& source) {
  std::vector<EnvSample> out;
  for (const auto& row : read_csv(text, source, kEnvHeader)) {
    RowReader r(row, source, kEnvHeader);
    EnvSample e{r.timestamp(0), r.real(1), r.real(2)};
    if (!(e.humidity_pct >= 0 && e.humidity_pct <= 100)) r.fail(2, "humidity out of [0,100]");
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const EnvSample& a, const EnvSample& b) {
    return std::tie(a.at, a.temperature_f, a.humidity_pct) < std::tie(b.at, b.temperature_f, b.humidity_pct);
  });
  return out;
}

std::vector<MealEvent> parse_meal_csv(std::string_view text, const std::string& source) {
  std::vector<MealEvent> out;
  for (const auto& row : read_csv(text, source, kMealHeader)) {
    RowReader r(row, source, kMealHeader);
    out.push_back({r.timestamp(0)});
  }
  std::sort(out.begin(), out.end(), [](const MealEvent& a, const MealEvent& b) { return a.at < b.at; });
  return out;
}

std::vector<SleepSession> parse_sleep_log(const std::filesystem::path& path) {
  return parse_sleep_csv(read_text_file(path), path.string());
}
std::vector<ActivityEvent> parse_activity_log(const std::filesystem::path& path) {
  return parse_activity_csv(read_text_file(path), path.string());
}
std::vector<EnvSample> parse_environment_log(const std::filesystem::path& path) {
  return parse_environment_csv(read_text_file(path), path.string());
}
std::vector<MealEvent> parse_meal_log(const std::filesystem::path& path) {
  return parse_meal_csv(read_text_file(path), path.string());
}

std::vector<DayRecord> merge_day_records(std::span<const SleepSession> sessions,
                                         std::span<const ActivityEvent> activities,
                                         std::span<const EnvSample> env,
                                         std::span<const MealEvent> meals,
                                         const MergePolicy& policy) {
  if (!policy.valid()) throw Error(ErrorKind::InvalidArgument, "merge policy values must be positive");
  require_sorted(sessions, [](const SleepSession& s) { return s.onset; }, "sleep sessions");
  require_sorted(activities, [](const ActivityEvent& a) { return a.start; }, "activities");
  require_sorted(env, [](const EnvSample& e) { return e.at; }, "environment samples");
  require_sorted(meals, [](const MealEvent& m) { return m.at; }, "meals");

  for (std::size_t i = 1; i < sessions.size(); ++i)
    if (sessions[i].onset < sessions[i - 1].wake)
      throw Error(ErrorKind::Overlap,
                  fmt::format("sleep sessions starting {} and {} overlap", format_timestamp(sessions[i - 1].onset),
                              format_timestamp(sessions[i].onset)));

  // Sum of durations of activities starting in [from, to).
  auto exercise_in = [&](LocalTime from, LocalTime to) {
    auto lo = std::lower_bound(activities.begin(), activities.end(), from,
                               [](const ActivityEvent& a, LocalTime t) { return a.start < t; });
    double total = 0.0;
    for (auto it = lo; it != activities.end() && it->start < to; ++it) total += it->duration_min;
    return total;
  };

  const auto lookback = chr::duration_cast<chr::seconds>(chr::duration<double, std::ratio<3600>>(policy.meal_lookback_h));
  const double env_window_min = policy.env_window_min;

  std::vector<DayRecord> out;
  out.reserve(sessions.size());
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const SleepSession& s = sessions[i];
    DayRecord rec;
    rec.sleep = s;
    rec.night_date = date_of(s.onset);

    const LocalTime waking_start = i == 0 ? s.onset - chr::hours{24} : sessions[i - 1].wake;
    rec.exercise_day_min = exercise_in(waking_start, s.onset);
    const LocalTime week_start =
        std::min(midnight_of(add_days(rec.night_date, -(policy.week_window_days - 1))), waking_start);
    rec.exercise_week_min = exercise_in(week_start, s.onset);

    // Latest meal at or before onset within the lookback.
    auto meal_end = std::upper_bound(meals.begin(), meals.end(), s.onset,
                                     [](LocalTime t, const MealEvent& m) { return t < m.at; });
    if (meal_end != meals.begin()) {
      const auto& last = *std::prev(meal_end);
      if (last.at >= s.onset - lookback) rec.eat_sleep_interval_min = minutes_between(last.at, s.onset);
    }

    // Nearest environment sample within the window; ties go to the earlier sample.
    auto env_it = std::lower_bound(env.begin(), env.end(), s.onset,
                                   [](const EnvSample& e, LocalTime t) { return e.at < t; });
    const EnvSample* best = nullptr;
    double best_gap = 0.0;
    auto consider = [&](const EnvSample& e) {
      const double gap = std::fabs(minutes_between(e.at, s.onset));
      if (gap <= env_window_min && (!best || gap < best_gap)) {
        best = &e;
        best_gap = gap;
      }
    };
    if (env_it != env.begin()) consider(*std::prev(env_it));
    if (env_it != env.end()) consider(*env_it);
    if (best) {
      rec.start_temp_f = best->temperature_f;
      rec.start_humidity_pct = best->humidity_pct;
    }

    if (i > 0 && date_of(sessions[i - 1].onset) == add_days(rec.night_date, -1))
      rec.awake_between_min = minutes_between(sessions[i - 1].wake, s.onset);

    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<DayRecord> filter_consecutive(std::span<const DayRecord> records, int min_run) {
  if (min_run < 2) throw Error(ErrorKind::InvalidArgument, fmt::format("min_run must be >= 2, got {}", min_run));
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto prev = chr::local_days{records[i - 1].night_date};
    const auto cur = chr::local_days{records[i].night_date};
    if (cur == prev)
      throw Error(ErrorKind::DuplicateDate,
                  fmt::format("two records share night_date {}", format_date(records[i].night_date)));
    if (cur < prev) throw Error(ErrorKind::InvalidArgument, "records must be sorted by night_date");
  }

  std::vector<DayRecord> out;
  std::size_t run_start = 0;
  for (std::size_t i = 1; i <= records.size(); ++i) {
    const bool breaks = i == records.size() || records[i].night_date != next_day(records[i - 1].night_date);
    if (!breaks) continue;
    if (i - run_start >= static_cast<std::size_t>(min_run))
      out.insert(out.end(), records.begin() + static_cast<std::ptrdiff_t>(run_start),
                 records.begin() + static_cast<std::ptrdiff_t>(i));
    run_start = i;
  }
  return out;
}

std::string write_day_records_csv(std::span<const DayRecord> records) {
  std::string out(kDayRecordHeader);
  out += '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", format_date(r.night_date),
                       format_timestamp(r.sleep.onset), format_timestamp(r.sleep.wake),
                       format_real(r.sleep.latency_min), format_real(r.sleep.awake_min),
                       r.sleep.awakenings_gt5, format_real(r.sleep.efficiency),
                       format_real(r.exercise_day_min), format_real(r.exercise_week_min),
                       opt(r.eat_sleep_interval_min), opt(r.awake_between_min), opt(r.start_temp_f),
                       opt(r.start_humidity_pct));
  }
  return out;
}

void write_day_records(const std::filesystem::path& path, std::span<const DayRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::File, fmt::format("cannot write '{}'", path.string()));
  out << write_day_records_csv(records);
  if (!out) throw Error(ErrorKind::File, fmt::format("write failed for '{}'", path.string()));
}

std::vector<DayRecord> parse_day_records_csv(std::string_view text, const std::string& source) {
  std::vector<DayRecord> out;
  for (const auto& row : read_csv(text, source, kRecordHeader)) {
    RowReader r(row, source, kRecordHeader);
    DayRecord rec;
    rec.night_date = r.date(0);
    rec.sleep = SleepSession{r.timestamp(1), r.timestamp(2), r.real(3), r.real(4), r.count(5), r.real(6)};
    rec.exercise_day_min = r.real(7);
    rec.exercise_week_min = r.real(8);
    rec.eat_sleep_interval_min = r.optional_real(9);
    rec.awake_between_min = r.optional_real(10);
    rec.start_temp_f = r.optional_real(11);
    rec.start_humidity_pct = r.optional_real(12);
    if (auto v = validate_day_record(rec); !v.empty()) r.fail_row(join(v));
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<DayRecord> read_day_records(const std::filesystem::path& path) {
  return parse_day_records_csv(read_text_file(path), path.string());
}

}  // namespace n1sleep
