#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "n1sleep/error.hpp"
#include "n1sleep/ingest.hpp"
#include "test_util.hpp"

using namespace n1sleep;
using n1test::at;
using n1test::fixture;
using n1test::ymd;

namespace {

std::vector<DayRecord> merge_basic() {
  return merge_day_records(parse_sleep_log(fixture("basic/sleep.csv")),
                           parse_activity_log(fixture("basic/activity.csv")),
                           parse_environment_log(fixture("basic/environment.csv")),
                           parse_meal_log(fixture("basic/meals.csv")));
}

std::vector<unsigned> days_of(const std::vector<DayRecord>& rs) {
  std::vector<unsigned> out;
  for (const auto& r : rs) out.push_back(static_cast<unsigned>(r.night_date.day()));
  return out;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ParseSleep, ReadsFixtureRow) {
  const auto s = parse_sleep_log(fixture("basic/sleep.csv"));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].onset, at("2021-03-01T23:10"));
  EXPECT_EQ(s[0].wake, at("2021-03-02T07:05"));
  EXPECT_DOUBLE_EQ(s[0].latency_min, 12);
  EXPECT_DOUBLE_EQ(s[0].awake_min, 18);
  EXPECT_EQ(s[0].awakenings_gt5, 1);
  EXPECT_DOUBLE_EQ(s[0].efficiency, 0.91);
}

TEST(ParseSleep, WakeBeforeOnsetNamesTheRow) {
  try {
    parse_sleep_log(fixture("bad/sleep_wake_before_onset.csv"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("sleep_wake_before_onset.csv:3"), std::string::npos);
  }
}

TEST(ParseSources, HeaderOnlyIsEmpty) { EXPECT_TRUE(parse_meal_log(fixture("bad/meals_header_only.csv")).empty()); }

TEST(ParseSources, HumidityOutOfRangeRejected) {
  EXPECT_THROW(parse_environment_log(fixture("bad/environment_humidity.csv")), ParseError);
}

TEST(ParseSources, RowsReturnedInTimeOrder) {
  const auto acts = parse_activity_log(fixture("basic/activity.csv"));
  ASSERT_EQ(acts.size(), 6u);
  EXPECT_TRUE(std::is_sorted(acts.begin(), acts.end(), [](auto& a, auto& b) { return a.start < b.start; }));
  EXPECT_EQ(acts[2].kind, "walk");

  const auto env = parse_environment_csv("at,temperature_f,humidity_pct\n2021-03-02T10:00,70,40\n"
                                         "2021-03-01T10:00,68,45\n2021-03-01T12:00,69,44\n");
  ASSERT_EQ(env.size(), 3u);
  EXPECT_EQ(env.front().at, at("2021-03-01T10:00"));
  EXPECT_EQ(env.back().at, at("2021-03-02T10:00"));
}

TEST(ParseSources, HeaderAndFieldErrors) {
  EXPECT_THROW(parse_meal_csv("time\n2021-03-01T10:00\n"), ParseError);
  EXPECT_THROW(parse_activity_csv("start,duration_min,kind\n2021-03-01T10:00,-5,run\n"), ParseError);
  EXPECT_THROW(parse_activity_csv("start,duration_min,kind\n2021-03-01T10:00,abc,run\n"), ParseError);
  EXPECT_THROW(parse_sleep_csv("onset,wake,latency_min,awake_min,awakenings_gt5,efficiency\n"
                               "2021-03-01T23:00,2021-03-02T07:00,1,2,3\n"),
               ParseError);
  EXPECT_EQ(kind_of([] { parse_sleep_log("/nonexistent/sleep.csv"); }), ErrorKind::File);
}

TEST(ParseSources, QuotedFieldsAndBom) {
  const auto acts = parse_activity_csv("\xEF\xBB\xBFstart,duration_min,kind\n2021-03-01T10:00,30,\"run, easy\"\n");
  ASSERT_EQ(acts.size(), 1u);
  EXPECT_EQ(acts[0].kind, "run, easy");
}

TEST(Merge, EmptyJoins) {
  SleepSession s;
  s.onset = at("2021-03-01T23:00");
  s.wake = at("2021-03-02T07:00");
  s.efficiency = 0.9;
  const std::vector<SleepSession> sessions{s};
  const auto out = merge_day_records(sessions, {}, {}, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].exercise_day_min, 0);
  EXPECT_EQ(out[0].exercise_week_min, 0);
  EXPECT_FALSE(out[0].eat_sleep_interval_min);
  EXPECT_FALSE(out[0].start_temp_f);
  EXPECT_FALSE(out[0].awake_between_min);
}

TEST(Merge, MealInterval) {
  SleepSession s;
  s.onset = at("2021-03-01T23:00");
  s.wake = at("2021-03-02T07:00");
  const std::vector<SleepSession> sessions{s};
  const std::vector<MealEvent> meals{{at("2021-03-01T19:30")}};
  const auto out = merge_day_records(sessions, {}, {}, meals);
  ASSERT_TRUE(out[0].eat_sleep_interval_min);
  EXPECT_DOUBLE_EQ(*out[0].eat_sleep_interval_min, 210);
}

TEST(Merge, ThreeNightFixtureMatchesHandComputedRecords) {
  const auto merged = merge_basic();
  EXPECT_EQ(write_day_records_csv(merged), n1test::slurp(fixture("basic/expected_dayrecords.csv")));
}

TEST(Merge, OverlapRejected) {
  SleepSession a, b;
  a.onset = at("2021-03-01T23:00");
  a.wake = at("2021-03-02T07:00");
  b.onset = at("2021-03-02T06:00");
  b.wake = at("2021-03-02T09:00");
  const std::vector<SleepSession> sessions{a, b};
  EXPECT_EQ(kind_of([&] { merge_day_records(sessions, {}, {}, {}); }), ErrorKind::Overlap);
}

TEST(Merge, PermutationInvariant) {
  const auto text = n1test::slurp(fixture("basic/activity.csv"));
  const auto header_end = text.find('\n') + 1;
  std::vector<std::string> lines;
  for (std::size_t pos = header_end; pos < text.size();) {
    const auto nl = text.find('\n', pos);
    lines.push_back(text.substr(pos, nl - pos + 1));
    pos = nl + 1;
  }
  const auto sessions = parse_sleep_log(fixture("basic/sleep.csv"));
  const auto env = parse_environment_log(fixture("basic/environment.csv"));
  const auto meals = parse_meal_log(fixture("basic/meals.csv"));
  const auto reference = write_day_records_csv(merge_basic());
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string shuffled = text.substr(0, header_end);
    for (const auto& l : lines) shuffled += l;
    const auto acts = parse_activity_csv(shuffled);
    EXPECT_EQ(write_day_records_csv(merge_day_records(sessions, acts, env, meals)), reference);
  }
}

TEST(Merge, OutputPassesValidation) {
  for (const auto& r : merge_basic()) EXPECT_TRUE(validate_day_record(r).empty());
}

TEST(Filter, BothRunsKept) {
  EXPECT_EQ(days_of(filter_consecutive(n1test::records_on_days({1, 2, 3, 7, 8}), 2)),
            (std::vector<unsigned>{1, 2, 3, 7, 8}));
}

TEST(Filter, NoConsecutivePair) { EXPECT_TRUE(filter_consecutive(n1test::records_on_days({1, 3, 5}), 2).empty()); }

TEST(Filter, RunLengthThreshold) {
  EXPECT_EQ(days_of(filter_consecutive(n1test::records_on_days({1, 2, 3, 7, 8, 9, 10}), 4)),
            (std::vector<unsigned>{7, 8, 9, 10}));
}

TEST(Filter, Idempotent) {
  for (int min_run : {2, 3, 4}) {
    const auto once = filter_consecutive(n1test::records_on_days({1, 2, 3, 5, 7, 8, 9, 10, 12, 13}), min_run);
    const auto twice = filter_consecutive(once, min_run);
    EXPECT_EQ(write_day_records_csv(once), write_day_records_csv(twice));
  }
}

TEST(Filter, KeptRunsHaveAwakeBetweenAfterFirst) {
  const auto kept = filter_consecutive(merge_basic(), 2);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_FALSE(kept[0].awake_between_min);
  EXPECT_TRUE(kept[1].awake_between_min);
  EXPECT_TRUE(kept[2].awake_between_min);
}

TEST(Filter, Errors) {
  EXPECT_EQ(kind_of([] { filter_consecutive(n1test::records_on_days({1, 2, 2}), 2); }), ErrorKind::DuplicateDate);
  EXPECT_EQ(kind_of([] { filter_consecutive(n1test::records_on_days({1, 2}), 1); }), ErrorKind::InvalidArgument);
}

TEST(DayRecordsCsv, RoundTrip) {
  const auto merged = merge_basic();
  const auto text = write_day_records_csv(merged);
  EXPECT_EQ(write_day_records_csv(parse_day_records_csv(text)), text);
}

TEST(DayRecordsCsv, InvalidRowRejected) {
  EXPECT_THROW(read_day_records(fixture("bad/malformed_records.csv")), ParseError);
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.0), "0");
  EXPECT_EQ(format_real(-0.0), "0");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(925), "925");
}
