#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace n1sleep {

// Local civil time, no zone arithmetic. Single user, single location.
using LocalTime = std::chrono::local_seconds;
using Date = std::chrono::year_month_day;

double minutes_between(LocalTime from, LocalTime to) noexcept;
Date date_of(LocalTime t) noexcept;
Date next_day(Date d) noexcept;
Date add_days(Date d, int n) noexcept;
LocalTime midnight_of(Date d) noexcept;

// "YYYY-MM-DDTHH:MM[:SS]" (a space is accepted in place of 'T').
std::optional<LocalTime> parse_timestamp(std::string_view text);
std::optional<Date> parse_date(std::string_view text);
std::string format_timestamp(LocalTime t);
std::string format_date(Date d);

struct SleepSession {
  LocalTime onset;
  LocalTime wake;
  double latency_min = 0.0;
  double awake_min = 0.0;
  int awakenings_gt5 = 0;
  double efficiency = 0.0;

  double in_bed_min() const noexcept { return minutes_between(onset, wake); }
};

struct ActivityEvent {
  LocalTime start;
  double duration_min = 0.0;
  std::string kind;
};

struct EnvSample {
  LocalTime at;
  double temperature_f = 0.0;
  double humidity_pct = 0.0;
};

struct MealEvent {
  LocalTime at;
};

struct DayRecord {
  Date night_date;
  SleepSession sleep;
  double exercise_day_min = 0.0;
  double exercise_week_min = 0.0;
  std::optional<double> eat_sleep_interval_min;
  std::optional<double> awake_between_min;
  std::optional<double> start_temp_f;
  std::optional<double> start_humidity_pct;
};

// Violation strings name the field and the broken rule; empty means valid.
std::vector<std::string> validate_day_record(const DayRecord& rec);
std::vector<std::string> validate_sleep_session(const SleepSession& s);

// The ten input/confounder events. Enumerator order is the canonical table order.
enum class InputEvent : std::uint8_t {
  PrevLatency,
  PrevAwakeMin,
  PrevAwakenings,
  PrevEfficiency,
  ExerciseDay,
  ExerciseWeek,
  EatSleepInterval,
  AwakeBetween,
  StartTemp,
  StartHumidity,
};

enum class OutputMeasure : std::uint8_t {
  Latency,
  AwakeMin,
  Awakenings,
  Efficiency,
};

inline constexpr std::size_t kInputCount = 10;
inline constexpr std::size_t kOutputCount = 4;

inline constexpr std::array<InputEvent, kInputCount> kAllInputs = {
    InputEvent::PrevLatency,  InputEvent::PrevAwakeMin,     InputEvent::PrevAwakenings,
    InputEvent::PrevEfficiency, InputEvent::ExerciseDay,    InputEvent::ExerciseWeek,
    InputEvent::EatSleepInterval, InputEvent::AwakeBetween, InputEvent::StartTemp,
    InputEvent::StartHumidity};

inline constexpr std::array<OutputMeasure, kOutputCount> kAllOutputs = {
    OutputMeasure::Latency, OutputMeasure::AwakeMin, OutputMeasure::Awakenings,
    OutputMeasure::Efficiency};

std::string_view name_of(InputEvent e) noexcept;
std::string_view name_of(OutputMeasure m) noexcept;
std::optional<InputEvent> input_from_name(std::string_view name) noexcept;
std::optional<OutputMeasure> output_from_name(std::string_view name) noexcept;

// Same throw-on-miss lookups, raising ErrorKind::UnknownName.
InputEvent input_by_name(std::string_view name);
OutputMeasure output_by_name(std::string_view name);

// Previous-night inputs mirror an output measure; the rest are lifestyle inputs.
std::optional<OutputMeasure> lagged_output(InputEvent e) noexcept;

// Sorted by name: the order used by every sweep.
const std::array<InputEvent, kInputCount>& inputs_by_name() noexcept;
const std::array<OutputMeasure, kOutputCount>& outputs_by_name() noexcept;

double output_value(const SleepSession& s, OutputMeasure m) noexcept;

// Category index into the owning scheme; kUnavailable when the source value is absent.
using CategoryIndex = std::int16_t;
inline constexpr CategoryIndex kUnavailable = -1;

struct FeatureRow {
  Date night_date;
  std::array<CategoryIndex, kInputCount> inputs{};
  std::array<double, kOutputCount> outputs{};
  std::array<CategoryIndex, kOutputCount> output_categories{};

  CategoryIndex input(InputEvent e) const noexcept {
    return inputs[static_cast<std::size_t>(e)];
  }
  double output(OutputMeasure m) const noexcept { return outputs[static_cast<std::size_t>(m)]; }
  CategoryIndex output_category(OutputMeasure m) const noexcept {
    return output_categories[static_cast<std::size_t>(m)];
  }
};

struct RuleTuple {
  InputEvent input_event;
  OutputMeasure output_measure;
  InputEvent confounder;

  bool valid() const noexcept { return input_event != confounder; }
  friend bool operator==(const RuleTuple&, const RuleTuple&) = default;
};

}  // namespace n1sleep
