#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string err;
};

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("n1sleep_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with `args` (shell syntax), capturing stderr.
Run cli(const std::string& args, const fs::path& dir) {
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + N1_CLI_PATH + "\" " + args + " 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, n1test::slurp(err)};
}

std::string fx(const char* rel) { return "\"" + n1test::fixture(rel).string() + "\""; }

std::string ingest_args(const char* sleep, const fs::path& out) {
  return std::string("ingest --sleep ") + fx(sleep) + " --activity " + fx("basic/activity.csv") + " --env " +
         fx("basic/environment.csv") + " --meals " + fx("basic/meals.csv") + " --out \"" + out.string() + "\"";
}

}  // namespace

TEST(Cli, IngestValidFixtures) {
  const auto dir = scratch("ingest_ok");
  const auto r = cli(ingest_args("basic/sleep.csv", dir / "day.csv"), dir);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(n1test::slurp(dir / "day.csv"), n1test::slurp(n1test::fixture("basic/expected_dayrecords.csv")));
  EXPECT_NE(r.err.find("kept 3"), std::string::npos) << r.err;
}

TEST(Cli, IngestMissingFileExitsTwo) {
  const auto dir = scratch("ingest_missing");
  const auto r = cli(ingest_args("basic/nope.csv", dir / "day.csv"), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.csv"), std::string::npos) << r.err;
}

TEST(Cli, IngestParseErrorExitsOne) {
  const auto dir = scratch("ingest_bad");
  const auto r = cli(ingest_args("bad/sleep_wake_before_onset.csv", dir / "day.csv"), dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(":3"), std::string::npos) << r.err;
}

TEST(Cli, IngestNonConsecutiveWarnsWithEmptyOutput) {
  const auto dir = scratch("ingest_empty");
  const auto r = cli(ingest_args("bad/sleep_nonconsecutive.csv", dir / "day.csv"), dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos) << r.err;
  const auto out = n1test::slurp(dir / "day.csv");
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 1);  // header only
}

TEST(Cli, SynthAnalyzeEndToEnd) {
  const auto dir = scratch("e2e");
  ASSERT_EQ(cli("synth --seed 3 --out \"" + (dir / "day.csv").string() + "\"", dir).code, 0);
  const auto r = cli("analyze --records \"" + (dir / "day.csv").string() + "\" --out-dir \"" +
                         (dir / "reports").string() + "\"",
                     dir);
  EXPECT_EQ(r.code, 0) << r.err;
  for (const char* f : {"screen_latency_min.svg", "screen_latency_min.csv", "screen_awake_min.csv",
                        "screen_awakenings_gt5.csv", "screen_efficiency.svg", "effects.csv", "effects.txt",
                        "summary.txt", "joint_start_temp_awake_min.svg"})
    EXPECT_TRUE(fs::exists(dir / "reports" / f)) << f;
}

TEST(Cli, PipeThroughStdio) {
  const auto dir = scratch("pipe");
  const std::string cmd = std::string("\"") + N1_CLI_PATH + "\" synth --seed 7 --n-days 60 | \"" + N1_CLI_PATH +
                          "\" analyze --records - --out-dir \"" + (dir / "reports").string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  EXPECT_TRUE(WIFEXITED(status) && WEXITSTATUS(status) == 0);
  EXPECT_TRUE(fs::exists(dir / "reports" / "summary.txt"));
}

TEST(Cli, AlphaZeroEmptySummaryBody) {
  const auto dir = scratch("alpha0");
  ASSERT_EQ(cli("synth --seed 3 --out \"" + (dir / "day.csv").string() + "\"", dir).code, 0);
  const auto r = cli("analyze --alpha 0 --records \"" + (dir / "day.csv").string() + "\" --out-dir \"" +
                         (dir / "reports").string() + "\"",
                     dir);
  EXPECT_EQ(r.code, 0) << r.err;
  const auto summary = n1test::slurp(dir / "reports" / "summary.txt");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1) << summary;
}

TEST(Cli, SingleNightExitsThree) {
  const auto dir = scratch("one_night");
  const auto r = cli("analyze --records " + fx("bad/single_night_records.csv") + " --out-dir \"" +
                         (dir / "reports").string() + "\"",
                     dir);
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, MalformedRecordsExitOne) {
  const auto dir = scratch("malformed");
  EXPECT_EQ(cli("analyze --records " + fx("bad/malformed_records.csv"), dir).code, 1);
  EXPECT_EQ(cli("analyze --records \"" + (dir / "missing.csv").string() + "\"", dir).code, 2);
}

TEST(Cli, SynthDeterministicAndSpecErrors) {
  const auto dir = scratch("synth");
  const auto a = dir / "a.csv", b = dir / "b.csv";
  ASSERT_EQ(cli("synth --seed 11 --n-days 90 --out \"" + a.string() + "\"", dir).code, 0);
  ASSERT_EQ(cli("synth --seed 11 --n-days 90 --out \"" + b.string() + "\"", dir).code, 0);
  EXPECT_EQ(n1test::slurp(a), n1test::slurp(b));
  EXPECT_EQ(cli("synth --spec " + fx("bad/bad_spec.toml"), dir).code, 1);
  EXPECT_EQ(cli("synth --n-days 1", dir).code, 1);
  EXPECT_EQ(cli("bogus", dir).code, 1);
}

TEST(Cli, SampleConfigsWork) {
  const auto dir = scratch("configs");
  const auto cfg = n1test::source_dir().parent_path() / "configs";
  const auto day = dir / "day.csv";
  EXPECT_EQ(cli("synth --spec \"" + (cfg / "synth_planted.toml").string() + "\" --out \"" + day.string() + "\"", dir).code,
            0);
  EXPECT_EQ(cli("analyze --records \"" + day.string() + "\" --schemes \"" + (cfg / "schemes_default.toml").string() +
                    "\" --out-dir \"" + (dir / "r").string() + "\"",
                dir)
                .code,
            0);
}
