#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "n1sleep/n1sleep.h"
#include "test_util.hpp"

namespace {

std::string fx(const char* rel) { return n1test::fixture(rel).string(); }

}  // namespace

TEST(CApi, IngestFixture) {
  n1_records* recs = nullptr;
  n1_ingest_stats stats{};
  ASSERT_EQ(n1_ingest(fx("basic/sleep.csv").c_str(), fx("basic/activity.csv").c_str(),
                      fx("basic/environment.csv").c_str(), fx("basic/meals.csv").c_str(), nullptr, 2, &recs, &stats),
            N1_OK)
      << n1_last_error();
  EXPECT_EQ(stats.sleep_rows, 3u);
  EXPECT_EQ(stats.activity_rows, 6u);
  EXPECT_EQ(stats.kept_records, 3u);
  EXPECT_EQ(n1_records_count(recs), 3u);
  char* csv = nullptr;
  ASSERT_EQ(n1_records_to_csv(recs, &csv), N1_OK);
  EXPECT_EQ(std::string(csv), n1test::slurp(n1test::fixture("basic/expected_dayrecords.csv")));
  n1_string_free(csv);
  n1_records_free(recs);
}

TEST(CApi, ErrorsMapToStatusAndMessage) {
  n1_records* recs = nullptr;
  EXPECT_EQ(n1_records_read("/nonexistent/day.csv", &recs), N1_ERR_FILE);
  EXPECT_EQ(recs, nullptr);
  EXPECT_NE(std::string(n1_last_error()).find("/nonexistent/day.csv"), std::string::npos);
  EXPECT_EQ(n1_records_read(fx("bad/malformed_records.csv").c_str(), &recs), N1_ERR_PARSE);
  EXPECT_EQ(n1_records_read(nullptr, &recs), N1_ERR_INVALID_ARGUMENT);
  EXPECT_STREQ(n1_status_name(N1_ERR_PARSE), "parse error");

  ASSERT_EQ(n1_records_read(fx("bad/single_night_records.csv").c_str(), &recs), N1_OK);
  EXPECT_STREQ(n1_last_error(), "");
  n1_analysis* an = nullptr;
  EXPECT_EQ(n1_analyze(recs, nullptr, nullptr, &an), N1_ERR_NO_FEATURE_ROWS);
  EXPECT_EQ(an, nullptr);
  n1_records_free(recs);
}

TEST(CApi, SchemesAndCategorize) {
  n1_schemes* s = nullptr;
  ASSERT_EQ(n1_schemes_default(&s), N1_OK);
  char buf[32];
  ASSERT_EQ(n1_categorize(s, "awake_between", 1020, buf, sizeof buf), N1_OK);
  EXPECT_STREQ(buf, "Average");
  EXPECT_EQ(n1_categorize(s, "latency_min", -1, buf, sizeof buf), N1_ERR_DOMAIN);
  EXPECT_EQ(n1_categorize(s, "coffee", 1, buf, sizeof buf), N1_ERR_UNKNOWN_NAME);
  char tiny[3];
  ASSERT_EQ(n1_categorize(s, "start_temp", 64, tiny, sizeof tiny), N1_OK);
  EXPECT_STREQ(tiny, "Co");
  n1_schemes_free(s);
  EXPECT_EQ(n1_schemes_load("/nonexistent/schemes.toml", &s), N1_ERR_FILE);
}

TEST(CApi, StatsKernel) {
  const double a[] = {1, 2, 3, 4, 5};
  n1_test_result r{};
  ASSERT_EQ(n1_welch_t(a, 5, a, 5, &r), N1_OK);
  EXPECT_EQ(r.p, 1.0);
  EXPECT_EQ(n1_welch_t(a, 1, a, 5, &r), N1_ERR_INSUFFICIENT_DATA);
  double c = 0;
  ASSERT_EQ(n1_student_t_cdf(1, 1, &c), N1_OK);
  EXPECT_NEAR(c, 0.75, 1e-15);
  EXPECT_EQ(n1_student_t_cdf(1, 0, &c), N1_ERR_DOMAIN);
  ASSERT_EQ(n1_reg_inc_beta(0.5, 1, 1, &c), N1_OK);
  EXPECT_NEAR(c, 0.5, 1e-15);
}

TEST(CApi, SynthAnalyzeAndReports) {
  n1_records* recs = nullptr;
  const uint64_t seed = 7;
  ASSERT_EQ(n1_synth(nullptr, &seed, nullptr, &recs), N1_OK);
  EXPECT_EQ(n1_records_count(recs), 365u);
  n1_analyze_options opts;
  n1_analyze_options_default(&opts);
  EXPECT_EQ(opts.alpha, 0.05);
  EXPECT_EQ(opts.min_n, 3u);
  n1_analysis* an = nullptr;
  ASSERT_EQ(n1_analyze(recs, nullptr, &opts, &an), N1_OK) << n1_last_error();
  EXPECT_EQ(n1_analysis_feature_rows(an), 364u);
  EXPECT_EQ(n1_analysis_screening_count(an), 360u);
  EXPECT_EQ(n1_analysis_effect_count(an), 72u);
  const auto dir = std::filesystem::temp_directory_path() / "n1sleep_c_api_reports";
  std::filesystem::remove_all(dir);
  ASSERT_EQ(n1_analysis_write_reports(an, dir.string().c_str()), N1_OK);
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.txt"));
  std::filesystem::remove_all(dir);
  n1_analysis_free(an);

  opts.min_n = 1;
  EXPECT_EQ(n1_analyze(recs, nullptr, &opts, &an), N1_ERR_INVALID_ARGUMENT);
  n1_records_free(recs);

  const int one_day = 1;
  EXPECT_EQ(n1_synth(nullptr, nullptr, &one_day, &recs), N1_ERR_SPEC);
  EXPECT_EQ(n1_synth(fx("bad/bad_spec.toml").c_str(), nullptr, nullptr, &recs), N1_ERR_SPEC);
}

TEST(CApi, ParseFromBuffer) {
  const std::string text = n1test::slurp(n1test::fixture("basic/expected_dayrecords.csv"));
  n1_records* recs = nullptr;
  ASSERT_EQ(n1_records_parse(text.data(), text.size(), &recs), N1_OK);
  EXPECT_EQ(n1_records_count(recs), 3u);
  n1_records_free(recs);
  EXPECT_EQ(n1_records_parse("garbage", 7, &recs), N1_ERR_PARSE);
}
