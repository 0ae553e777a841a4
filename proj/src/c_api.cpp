#include "n1sleep/n1sleep.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "n1sleep/discretize.hpp"
#include "n1sleep/error.hpp"
#include "n1sleep/ingest.hpp"
#include "n1sleep/report.hpp"
#include "n1sleep/stats.hpp"
#include "n1sleep/synth.hpp"

struct n1_records {
  std::vector<n1sleep::DayRecord> records;
};

struct n1_schemes {
  n1sleep::SchemeSet schemes;
};

struct n1_analysis {
  n1sleep::report::Analysis analysis;
  n1sleep::SchemeSet schemes;
};

namespace {

thread_local std::string g_last_error;

n1_status status_for(n1sleep::ErrorKind kind) {
  using n1sleep::ErrorKind;
  switch (kind) {
    case ErrorKind::File: return N1_ERR_FILE;
    case ErrorKind::Parse: return N1_ERR_PARSE;
    case ErrorKind::Overlap: return N1_ERR_OVERLAP;
    case ErrorKind::DuplicateDate: return N1_ERR_DUPLICATE_DATE;
    case ErrorKind::Domain: return N1_ERR_DOMAIN;
    case ErrorKind::InsufficientData: return N1_ERR_INSUFFICIENT_DATA;
    case ErrorKind::Spec: return N1_ERR_SPEC;
    case ErrorKind::UnknownName: return N1_ERR_UNKNOWN_NAME;
    case ErrorKind::BaseCategoryQuery: return N1_ERR_BASE_CATEGORY;
    case ErrorKind::EmptyMatrix: return N1_ERR_EMPTY_MATRIX;
    case ErrorKind::MixedMeasures: return N1_ERR_MIXED_MEASURES;
    case ErrorKind::InvalidArgument: return N1_ERR_INVALID_ARGUMENT;
  }
  return N1_ERR_INTERNAL;
}

n1_status fail(n1_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, translating exceptions into status codes and the thread-local message.
template <class Fn>
n1_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    return fn();
  } catch (const n1sleep::Error& e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(N1_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(N1_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(N1_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

#define N1_REQUIRE(cond, what) \
  if (!(cond)) return fail(N1_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* n1_version(void) { return "1.0.0"; }

const char* n1_status_name(n1_status status) {
  switch (status) {
    case N1_OK: return "ok";
    case N1_ERR_FILE: return "file error";
    case N1_ERR_PARSE: return "parse error";
    case N1_ERR_OVERLAP: return "overlapping sleep sessions";
    case N1_ERR_DUPLICATE_DATE: return "duplicate night date";
    case N1_ERR_DOMAIN: return "domain error";
    case N1_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case N1_ERR_SPEC: return "invalid specification";
    case N1_ERR_UNKNOWN_NAME: return "unknown name";
    case N1_ERR_BASE_CATEGORY: return "base category query";
    case N1_ERR_EMPTY_MATRIX: return "empty matrix";
    case N1_ERR_MIXED_MEASURES: return "mixed output measures";
    case N1_ERR_INVALID_ARGUMENT: return "invalid argument";
    case N1_ERR_NO_FEATURE_ROWS: return "no usable feature rows";
    case N1_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* n1_last_error(void) { return g_last_error.c_str(); }

void n1_string_free(char* s) { std::free(s); }

void n1_merge_policy_default(n1_merge_policy* policy) {
  if (!policy) return;
  const n1sleep::MergePolicy d;
  policy->env_window_min = d.env_window_min;
  policy->meal_lookback_h = d.meal_lookback_h;
  policy->week_window_days = d.week_window_days;
}

n1_status n1_ingest(const char* sleep_path, const char* activity_path, const char* env_path, const char* meals_path,
                    const n1_merge_policy* policy, int min_run, n1_records** out, n1_ingest_stats* stats) {
  return guarded([&] {
    N1_REQUIRE(sleep_path && activity_path && env_path && meals_path && out, "null argument to n1_ingest");
    *out = nullptr;
    n1sleep::MergePolicy p;
    if (policy) p = {policy->env_window_min, policy->meal_lookback_h, policy->week_window_days};
    const auto sessions = n1sleep::parse_sleep_log(sleep_path);
    const auto activities = n1sleep::parse_activity_log(activity_path);
    const auto env = n1sleep::parse_environment_log(env_path);
    const auto meals = n1sleep::parse_meal_log(meals_path);
    const auto merged = n1sleep::merge_day_records(sessions, activities, env, meals, p);
    auto kept = n1sleep::filter_consecutive(merged, min_run);
    if (stats) *stats = {sessions.size(), activities.size(), env.size(), meals.size(), merged.size(), kept.size()};
    *out = new n1_records{std::move(kept)};
    return N1_OK;
  });
}

n1_status n1_records_read(const char* path, n1_records** out) {
  return guarded([&] {
    N1_REQUIRE(path && out, "null argument to n1_records_read");
    *out = nullptr;
    *out = new n1_records{n1sleep::read_day_records(path)};
    return N1_OK;
  });
}

n1_status n1_records_parse(const char* text, size_t len, n1_records** out) {
  return guarded([&] {
    N1_REQUIRE((text || len == 0) && out, "null argument to n1_records_parse");
    *out = nullptr;
    *out = new n1_records{n1sleep::parse_day_records_csv(std::string_view(text ? text : "", len), "<stdin>")};
    return N1_OK;
  });
}

n1_status n1_records_write(const n1_records* records, const char* path) {
  return guarded([&] {
    N1_REQUIRE(records && path, "null argument to n1_records_write");
    n1sleep::write_day_records(path, records->records);
    return N1_OK;
  });
}

n1_status n1_records_to_csv(const n1_records* records, char** out) {
  return guarded([&] {
    N1_REQUIRE(records && out, "null argument to n1_records_to_csv");
    *out = dup_string(n1sleep::write_day_records_csv(records->records));
    return N1_OK;
  });
}

size_t n1_records_count(const n1_records* records) { return records ? records->records.size() : 0; }

void n1_records_free(n1_records* records) { delete records; }

n1_status n1_schemes_default(n1_schemes** out) {
  return guarded([&] {
    N1_REQUIRE(out, "null argument to n1_schemes_default");
    *out = new n1_schemes{n1sleep::SchemeSet::defaults()};
    return N1_OK;
  });
}

n1_status n1_schemes_load(const char* path, n1_schemes** out) {
  return guarded([&] {
    N1_REQUIRE(path && out, "null argument to n1_schemes_load");
    *out = nullptr;
    *out = new n1_schemes{n1sleep::SchemeSet::load(path)};
    return N1_OK;
  });
}

void n1_schemes_free(n1_schemes* schemes) { delete schemes; }

n1_status n1_categorize(const n1_schemes* schemes, const char* scheme_name, double value, char* buf, size_t buf_len) {
  return guarded([&] {
    N1_REQUIRE(schemes && scheme_name && buf && buf_len > 0, "null argument to n1_categorize");
    const auto& scheme = schemes->schemes.by_name(scheme_name);
    const std::string& label = scheme.label(scheme.categorize(value));
    const size_t n = std::min(label.size(), buf_len - 1);
    std::memcpy(buf, label.data(), n);
    buf[n] = '\0';
    return N1_OK;
  });
}

n1_status n1_synth(const char* spec_path, const uint64_t* seed, const int* n_days, n1_records** out) {
  return guarded([&] {
    N1_REQUIRE(out, "null argument to n1_synth");
    *out = nullptr;
    n1sleep::synth::GeneratorSpec spec;
    if (spec_path) spec = n1sleep::synth::load_spec(spec_path);
    if (seed) spec.seed = *seed;
    if (n_days) spec.n_days = *n_days;
    *out = new n1_records{n1sleep::synth::generate(spec).records};
    return N1_OK;
  });
}

n1_status n1_welch_t(const double* a, size_t n_a, const double* b, size_t n_b, n1_test_result* out) {
  return guarded([&] {
    N1_REQUIRE((a || n_a == 0) && (b || n_b == 0) && out, "null argument to n1_welch_t");
    const auto r = n1sleep::stats::welch_t(std::span<const double>(a, n_a), std::span<const double>(b, n_b));
    *out = {r.t, r.df, r.p, r.mean_a, r.mean_b, r.mean_diff, r.n_a, r.n_b, r.degenerate_variance ? 1 : 0};
    return N1_OK;
  });
}

n1_status n1_student_t_cdf(double t, double df, double* out) {
  return guarded([&] {
    N1_REQUIRE(out, "null argument to n1_student_t_cdf");
    *out = n1sleep::stats::student_t_cdf(t, df);
    return N1_OK;
  });
}

n1_status n1_reg_inc_beta(double x, double a, double b, double* out) {
  return guarded([&] {
    N1_REQUIRE(out, "null argument to n1_reg_inc_beta");
    *out = n1sleep::stats::reg_inc_beta(x, a, b);
    return N1_OK;
  });
}

void n1_analyze_options_default(n1_analyze_options* options) {
  if (!options) return;
  const n1sleep::mining::Options d;
  options->alpha = d.alpha;
  options->min_n = d.min_n;
  options->threads = d.threads;
}

n1_status n1_analyze(const n1_records* records, const n1_schemes* schemes, const n1_analyze_options* options,
                     n1_analysis** out) {
  return guarded([&] {
    N1_REQUIRE(records && out, "null argument to n1_analyze");
    *out = nullptr;
    n1sleep::mining::Options opts;
    if (options) opts = {options->alpha, options->min_n, options->threads};
    N1_REQUIRE(opts.alpha >= 0.0 && opts.alpha <= 1.0, "alpha must be in [0,1]");
    N1_REQUIRE(opts.min_n >= 2, "min_n must be >= 2");
    auto set = schemes ? schemes->schemes : n1sleep::SchemeSet::defaults();
    auto analysis = n1sleep::report::analyze(records->records, set, opts);
    if (analysis.rows.empty())
      return fail(N1_ERR_NO_FEATURE_ROWS, "no night follows a previous consecutive night; nothing to analyze");
    *out = new n1_analysis{std::move(analysis), std::move(set)};
    return N1_OK;
  });
}

size_t n1_analysis_feature_rows(const n1_analysis* a) { return a ? a->analysis.rows.size() : 0; }
size_t n1_analysis_screening_count(const n1_analysis* a) { return a ? a->analysis.screenings.size() : 0; }
size_t n1_analysis_effect_count(const n1_analysis* a) { return a ? a->analysis.effects.size() : 0; }

size_t n1_analysis_significant_cells(const n1_analysis* a) {
  if (!a) return 0;
  size_t n = 0;
  for (const auto& s : a->analysis.screenings) n += s.significant_cells();
  return n;
}

n1_status n1_analysis_write_reports(const n1_analysis* analysis, const char* out_dir) {
  return guarded([&] {
    N1_REQUIRE(analysis && out_dir, "null argument to n1_analysis_write_reports");
    n1sleep::report::write_reports(analysis->analysis, analysis->schemes, out_dir);
    return N1_OK;
  });
}

void n1_analysis_free(n1_analysis* analysis) { delete analysis; }

}  // extern "C"
