#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "n1sleep/model.hpp"

namespace n1sleep {

struct MergePolicy {
  double env_window_min = 30.0;
  double meal_lookback_h = 24.0;
  int week_window_days = 7;

  bool valid() const noexcept {
    return env_window_min > 0 && meal_lookback_h > 0 && week_window_days > 0;
  }
};

// Source parsers. Each expects a header row naming the fixed columns, returns rows
// sorted by time, and rejects invalid rows with a ParseError carrying the line number.
// Missing or unreadable files raise FileError.
std::vector<SleepSession> parse_sleep_log(const std::filesystem::path& path);
std::vector<ActivityEvent> parse_activity_log(const std::filesystem::path& path);
std::vector<EnvSample> parse_environment_log(const std::filesystem::path& path);
std::vector<MealEvent> parse_meal_log(const std::filesystem::path& path);

// Same parsers over in-memory text; `source` names the input in error messages.
std::vector<SleepSession> parse_sleep_csv(std::string_view text, const std::string& source = "sleep.csv");
std::vector<ActivityEvent> parse_activity_csv(std::string_view text, const std::string& source = "activity.csv");
std::vector<EnvSample> parse_environment_csv(std::string_view text, const std::string& source = "environment.csv");
std::vector<MealEvent> parse_meal_csv(std::string_view text, const std::string& source = "meals.csv");

// One DayRecord per session. Inputs must be time-sorted; overlapping sessions raise OverlapError.
std::vector<DayRecord> merge_day_records(std::span<const SleepSession> sessions,
                                         std::span<const ActivityEvent> activities,
                                         std::span<const EnvSample> env,
                                         std::span<const MealEvent> meals,
                                         const MergePolicy& policy = {});

// Keeps maximal runs of consecutive calendar nights with length >= min_run.
// Duplicate night dates raise DuplicateDateError.
std::vector<DayRecord> filter_consecutive(std::span<const DayRecord> records, int min_run = 2);

// dayrecords.csv: fixed column order, absent values as empty fields.
inline constexpr std::string_view kDayRecordHeader =
    "night_date,onset,wake,latency_min,awake_min,awakenings_gt5,efficiency,exercise_day_min,"
    "exercise_week_min,eat_sleep_interval_min,awake_between_min,start_temp_f,start_humidity_pct";

std::string write_day_records_csv(std::span<const DayRecord> records);
void write_day_records(const std::filesystem::path& path, std::span<const DayRecord> records);
// Rows are validated with validate_day_record; violations raise ParseError.
std::vector<DayRecord> parse_day_records_csv(std::string_view text, const std::string& source = "dayrecords.csv");
std::vector<DayRecord> read_day_records(const std::filesystem::path& path);

// Shortest round-trip decimal form used by every CSV writer.
std::string format_real(double v);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace n1sleep
