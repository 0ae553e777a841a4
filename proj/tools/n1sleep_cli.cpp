// n1sleep: ingest raw logs, mine lifestyle -> sleep rules, and generate synthetic records.
//
// Exit codes: 0 success, 1 malformed input / spec / arguments, 2 I/O failure,
// 3 nothing to analyze (zero feature rows).

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "n1sleep/n1sleep.h"

namespace {

enum Exit { kOk = 0, kBadInput = 1, kIo = 2, kNothing = 3 };

struct RecordsDeleter {
  void operator()(n1_records* r) const { n1_records_free(r); }
};
struct SchemesDeleter {
  void operator()(n1_schemes* s) const { n1_schemes_free(s); }
};
struct AnalysisDeleter {
  void operator()(n1_analysis* a) const { n1_analysis_free(a); }
};
using Records = std::unique_ptr<n1_records, RecordsDeleter>;
using Schemes = std::unique_ptr<n1_schemes, SchemesDeleter>;
using AnalysisPtr = std::unique_ptr<n1_analysis, AnalysisDeleter>;

int report(n1_status status) {
  std::cerr << "error: " << n1_last_error() << '\n';
  switch (status) {
    case N1_ERR_FILE: return kIo;
    case N1_ERR_NO_FEATURE_ROWS: return kNothing;
    default: return kBadInput;
  }
}

int write_records(const n1_records* records, const std::string& out) {
  if (out == "-") {
    char* text = nullptr;
    if (const auto st = n1_records_to_csv(records, &text); st != N1_OK) return report(st);
    std::fputs(text, stdout);
    n1_string_free(text);
    return std::fflush(stdout) == 0 ? kOk : kIo;
  }
  if (const auto st = n1_records_write(records, out.c_str()); st != N1_OK) return report(st);
  return kOk;
}

struct IngestArgs {
  std::string sleep, activity, env, meals, out = "dayrecords.csv";
  int min_run = 2;
  double env_window = 30.0;
};

int run_ingest(const IngestArgs& a) {
  n1_merge_policy policy;
  n1_merge_policy_default(&policy);
  policy.env_window_min = a.env_window;
  n1_records* raw = nullptr;
  n1_ingest_stats stats{};
  const auto st = n1_ingest(a.sleep.c_str(), a.activity.c_str(), a.env.c_str(), a.meals.c_str(), &policy, a.min_run,
                            &raw, &stats);
  if (st != N1_OK) return report(st);
  Records records(raw);
  std::cerr << "parsed: sleep=" << stats.sleep_rows << " activity=" << stats.activity_rows
            << " environment=" << stats.environment_rows << " meals=" << stats.meal_rows << '\n'
            << "merged: " << stats.merged_records << " day records\n"
            << "consecutive filter (min run " << a.min_run << "): kept " << stats.kept_records << ", dropped "
            << (stats.merged_records - stats.kept_records) << '\n';
  if (stats.kept_records == 0) std::cerr << "warning: no day records survived the consecutive-night filter\n";
  return write_records(records.get(), a.out);
}

struct AnalyzeArgs {
  std::string records, schemes, out_dir = "reports";
  double alpha = 0.05;
  std::size_t min_n = 3;
  unsigned threads = 1;
};

int run_analyze(const AnalyzeArgs& a) {
  n1_records* raw = nullptr;
  n1_status st;
  if (a.records == "-") {
    const std::string text{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    st = n1_records_parse(text.data(), text.size(), &raw);
  } else {
    st = n1_records_read(a.records.c_str(), &raw);
  }
  if (st != N1_OK) return report(st);
  Records records(raw);

  Schemes schemes;
  if (!a.schemes.empty()) {
    n1_schemes* s = nullptr;
    if ((st = n1_schemes_load(a.schemes.c_str(), &s)) != N1_OK) return report(st);
    schemes.reset(s);
  }

  n1_analyze_options opts;
  n1_analyze_options_default(&opts);
  opts.alpha = a.alpha;
  opts.min_n = a.min_n;
  opts.threads = a.threads;
  n1_analysis* an = nullptr;
  if ((st = n1_analyze(records.get(), schemes.get(), &opts, &an)) != N1_OK) return report(st);
  AnalysisPtr analysis(an);
  if ((st = n1_analysis_write_reports(analysis.get(), a.out_dir.c_str())) != N1_OK) return report(st);
  std::cerr << "feature rows: " << n1_analysis_feature_rows(analysis.get())
            << "\nrules screened: " << n1_analysis_screening_count(analysis.get())
            << "\nsignificant cells: " << n1_analysis_significant_cells(analysis.get())
            << "\neffect estimates: " << n1_analysis_effect_count(analysis.get()) << "\nreports written to "
            << a.out_dir << '\n';
  return kOk;
}

struct SynthArgs {
  std::string spec, out = "-";
  std::optional<std::uint64_t> seed;
  std::optional<int> n_days;
};

int run_synth(const SynthArgs& a) {
  n1_records* raw = nullptr;
  const std::uint64_t* seed = a.seed ? &*a.seed : nullptr;
  const int* n_days = a.n_days ? &*a.n_days : nullptr;
  const auto st = n1_synth(a.spec.empty() ? nullptr : a.spec.c_str(), seed, n_days, &raw);
  if (st != N1_OK) return report(st);
  Records records(raw);
  return write_records(records.get(), a.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-subject sleep event mining"};
  app.set_version_flag("--version", n1_version());
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Merge raw logs into consecutive-night day records");
  ingest_cmd->add_option("--sleep", ingest.sleep, "sleep.csv")->required();
  ingest_cmd->add_option("--activity", ingest.activity, "activity.csv")->required();
  ingest_cmd->add_option("--env", ingest.env, "environment.csv")->required();
  ingest_cmd->add_option("--meals", ingest.meals, "meals.csv")->required();
  ingest_cmd->add_option("--out", ingest.out, "Output dayrecords.csv ('-' for stdout)")->capture_default_str();
  ingest_cmd->add_option("--min-run", ingest.min_run, "Minimum consecutive-night run length")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 30));
  ingest_cmd->add_option("--env-window", ingest.env_window, "Environment matching window (minutes)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Screen rules, estimate effects and write reports");
  analyze_cmd->add_option("--records", analyze.records, "dayrecords.csv ('-' for stdin)")->required();
  analyze_cmd->add_option("--schemes", analyze.schemes, "Discretization scheme overrides (TOML)");
  analyze_cmd->add_option("--alpha", analyze.alpha, "Significance level")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  analyze_cmd->add_option("--min-n", analyze.min_n, "Minimum group size for a test")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
  analyze_cmd->add_option("--out-dir", analyze.out_dir, "Report directory")->capture_default_str();
  analyze_cmd->add_option("--threads", analyze.threads, "Worker threads (0 = hardware)")->capture_default_str();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic day records");
  synth_cmd->add_option("--spec", synth.spec, "Generator spec (TOML); omit for the null spec");
  synth_cmd->add_option("--seed", synth.seed, "Override the spec seed");
  synth_cmd->add_option("--n-days", synth.n_days, "Override the number of days")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", synth.out, "Output dayrecords.csv ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  if (*ingest_cmd) return run_ingest(ingest);
  if (*analyze_cmd) return run_analyze(analyze);
  return run_synth(synth);
}
