#include <gtest/gtest.h>

#include <cmath>

#include "n1sleep/config.hpp"
#include "n1sleep/error.hpp"
#include "n1sleep/ingest.hpp"
#include "n1sleep/synth.hpp"
#include "test_util.hpp"

using namespace n1sleep;
using namespace n1sleep::synth;

namespace {

const SchemeSet& defaults() {
  static const SchemeSet s = SchemeSet::defaults();
  return s;
}

struct Moments {
  double mean = 0, sd = 0;
  std::size_t n = 0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  m.n = v.size();
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.sd += (x - m.mean) * (x - m.mean);
  m.sd = std::sqrt(m.sd / static_cast<double>(v.size() - 1));
  return m;
}

ErrorKind spec_kind(const GeneratorSpec& spec) {
  try {
    generate(spec);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Generate, NullSpecMeansWithinThreeStandardErrors) {
  GeneratorSpec spec;
  spec.n_days = 1000;
  spec.seed = 17;
  const auto data = generate(spec);
  ASSERT_EQ(data.records.size(), 1000u);
  for (auto m : kAllOutputs) {
    std::vector<double> v;
    for (const auto& r : data.records) v.push_back(output_value(r.sleep, m));
    const auto mo = moments(v);
    const auto k = static_cast<std::size_t>(m);
    EXPECT_NEAR(mo.mean, spec.baseline_means[k], 3 * mo.sd / std::sqrt(1000.0)) << name_of(m);
  }
}

TEST(Generate, PlantedGroupGap) {
  GeneratorSpec spec;
  spec.n_days = 1000;
  spec.seed = 4;
  spec.planted_effects.push_back({InputEvent::ExerciseDay, "Good", OutputMeasure::AwakeMin, 12.0});
  const auto data = generate(spec);
  const auto& scheme = defaults().for_input(InputEvent::ExerciseDay);
  std::vector<double> good, rest;
  for (const auto& r : data.records)
    (scheme.label(scheme.categorize(r.exercise_day_min)) == "Good" ? good : rest).push_back(r.sleep.awake_min);
  const auto g = moments(good), o = moments(rest);
  const double se = std::sqrt(g.sd * g.sd / g.n + o.sd * o.sd / o.n);
  EXPECT_NEAR(g.mean - o.mean, 12.0, 3 * se);
}

TEST(Generate, SameSeedSameBytes) {
  GeneratorSpec spec;
  spec.seed = 99;
  spec.carryover = 0.4;
  EXPECT_EQ(write_day_records_csv(generate(spec).records), write_day_records_csv(generate(spec).records));
  auto other = spec;
  other.seed = 100;
  EXPECT_NE(write_day_records_csv(generate(spec).records), write_day_records_csv(generate(other).records));
}

TEST(Generate, ValidConsecutiveRecords) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.carryover = 0.5;
    const auto recs = generate(spec).records;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      ASSERT_TRUE(validate_day_record(recs[i]).empty()) << i;
      if (i > 0) {
        EXPECT_EQ(recs[i].night_date, next_day(recs[i - 1].night_date));
        EXPECT_TRUE(recs[i].awake_between_min);
        EXPECT_LT(recs[i - 1].sleep.wake, recs[i].sleep.onset);
      }
    }
    EXPECT_EQ(filter_consecutive(recs, 2).size(), recs.size());
    // The CSV form round-trips through the record reader.
    const auto csv = write_day_records_csv(recs);
    EXPECT_EQ(write_day_records_csv(parse_day_records_csv(csv)), csv);
  }
}

TEST(Generate, MarginalsConverge) {
  GeneratorSpec spec;
  spec.n_days = 1000;
  spec.seed = 8;
  spec.input_marginals[InputEvent::StartTemp] = {0.2, 0.5, 0.3};
  spec.input_marginals[InputEvent::EatSleepInterval] = {0.1, 0.3, 0.6};
  const auto data = generate(spec);
  const auto rows = derive_features(data.records, defaults());
  for (auto [event, probs] : spec.input_marginals) {
    std::vector<double> counts(probs.size(), 0.0);
    std::size_t n = 0;
    for (const auto& r : rows) {
      if (r.input(event) == kUnavailable) continue;
      counts[static_cast<std::size_t>(r.input(event))] += 1;
      ++n;
    }
    for (std::size_t c = 0; c < probs.size(); ++c) {
      const double sd = std::sqrt(n * probs[c] * (1 - probs[c]));
      EXPECT_NEAR(counts[c], n * probs[c], 3 * sd) << name_of(event) << " " << c;
    }
  }
}

TEST(Generate, EfficiencyClampRateBelowOnePercent) {
  GeneratorSpec spec;
  spec.n_days = 1000;
  spec.seed = 21;
  const auto data = generate(spec);
  EXPECT_LT(data.clamp_rate(OutputMeasure::Efficiency), 0.01);
  for (const auto& r : data.records) {
    EXPECT_GE(r.sleep.efficiency, 0.0);
    EXPECT_LE(r.sleep.efficiency, 1.0);
  }
}

TEST(Generate, CarryoverCorrelatesConsecutiveNights) {
  GeneratorSpec spec;
  spec.n_days = 2000;
  spec.seed = 5;
  spec.carryover = 0.8;
  const auto recs = generate(spec).records;
  double num = 0, den = 0;
  const double mean = spec.baseline_means[0];
  for (std::size_t i = 1; i < recs.size(); ++i) {
    num += (recs[i].sleep.latency_min - mean) * (recs[i - 1].sleep.latency_min - mean);
    den += (recs[i].sleep.latency_min - mean) * (recs[i].sleep.latency_min - mean);
  }
  EXPECT_GT(num / den, 0.6);
}

TEST(Validate, RejectsBadSpecs) {
  GeneratorSpec spec;
  spec.input_marginals[InputEvent::StartTemp] = {0.5, 0.6, 0.1};
  EXPECT_EQ(spec_kind(spec), ErrorKind::Spec);
  spec = {};
  spec.noise_sd[1] = 0;
  EXPECT_EQ(spec_kind(spec), ErrorKind::Spec);
  spec = {};
  spec.n_days = 1;
  EXPECT_EQ(spec_kind(spec), ErrorKind::Spec);
  spec = {};
  spec.carryover = 1.0;
  EXPECT_EQ(spec_kind(spec), ErrorKind::Spec);
  spec = {};
  spec.planted_effects.push_back({InputEvent::StartTemp, "Freezing", OutputMeasure::Latency, 3});
  EXPECT_EQ(spec_kind(spec), ErrorKind::Spec);
  spec = {};
  spec.input_marginals[InputEvent::PrevLatency] = {0.2, 0.3, 0.5};
  EXPECT_EQ(spec_kind(spec), ErrorKind::Spec);
}

TEST(SpecConfig, ParsesAllSections) {
  const auto spec = spec_from_config(config::parse(R"(
[generator]
n_days = 120
seed = 42
carryover = 0.25
start_date = "2022-06-01"

[baseline_means]
awake_min = 25

[noise_sd]
efficiency = 0.03

[input_marginals]
start_temp = [0.2, 0.5, 0.3]

[effects]
planted = [["exercise_day", "Good", "awake_min", -6.5]]
confounders = [["start_humidity", "High", "latency_min", 4]]
)"));
  EXPECT_EQ(spec.n_days, 120);
  EXPECT_EQ(spec.seed, 42u);
  EXPECT_DOUBLE_EQ(spec.carryover, 0.25);
  EXPECT_EQ(spec.start_date, n1test::ymd(2022, 6, 1));
  EXPECT_DOUBLE_EQ(spec.baseline_means[1], 25);
  EXPECT_DOUBLE_EQ(spec.baseline_means[0], 15);
  EXPECT_DOUBLE_EQ(spec.noise_sd[3], 0.03);
  EXPECT_EQ(spec.input_marginals.at(InputEvent::StartTemp), (std::vector<double>{0.2, 0.5, 0.3}));
  ASSERT_EQ(spec.planted_effects.size(), 1u);
  EXPECT_EQ(spec.planted_effects[0].event, InputEvent::ExerciseDay);
  EXPECT_DOUBLE_EQ(spec.planted_effects[0].delta, -6.5);
  ASSERT_EQ(spec.confounder_links.size(), 1u);
  EXPECT_EQ(spec.confounder_links[0].output, OutputMeasure::Latency);
}

TEST(SpecConfig, UnknownNamesRejected) {
  EXPECT_THROW(spec_from_config(config::parse("[baseline_means]\nmood = 3\n")), Error);
  EXPECT_THROW(spec_from_config(config::parse("[effects]\nplanted = [[\"coffee\", \"Good\", \"awake_min\", 1]]\n")),
               Error);
  EXPECT_THROW(spec_from_config(config::parse("[weather]\nx = 1\n")), Error);
  EXPECT_THROW(generate(load_spec(n1test::fixture("bad/bad_spec.toml"))), Error);
}
