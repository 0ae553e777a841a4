#include "n1sleep/mining.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "n1sleep/error.hpp"
#include "parallel.hpp"

namespace n1sleep::mining {

namespace {

void check_min_n(std::size_t min_n) {
  if (min_n < 2) throw Error(ErrorKind::InvalidArgument, fmt::format("min_n must be >= 2, got {}", min_n));
}

std::size_t idx(CategoryIndex c) { return static_cast<std::size_t>(c); }

}  // namespace

const ScreeningCell& ScreeningResult::cell(CategoryIndex input_category, CategoryIndex confounder_category) const {
  for (const auto& c : cells)
    if (c.input_category == input_category && c.confounder_category == confounder_category) return c;
  throw Error(ErrorKind::InvalidArgument,
              fmt::format("no cell ({}, {}) in screening result", input_category, confounder_category));
}

bool ScreeningResult::flagged() const noexcept {
  return std::any_of(min_p_per_input_category.begin(), min_p_per_input_category.end(),
                     [this](const auto& p) { return p && *p < alpha; });
}

std::size_t ScreeningResult::significant_cells() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [this](const ScreeningCell& c) { return c.significant(alpha); }));
}

std::size_t ScreeningResult::tested_cells() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const ScreeningCell& c) { return c.test.has_value(); }));
}

std::size_t JointMatrix::total() const noexcept {
  std::size_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::vector<double> baseline_sample(std::span<const FeatureRow> rows, InputEvent input_event,
                                    CategoryIndex input_category, OutputMeasure output_measure) {
  std::vector<double> out;
  if (input_category == kUnavailable) return out;
  for (const auto& r : rows)
    if (r.input(input_event) == input_category) out.push_back(r.output(output_measure));
  return out;
}

std::vector<double> baseline_sample(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                                    std::string_view input_event, std::string_view input_category,
                                    std::string_view output_measure) {
  const InputEvent e = input_by_name(input_event);
  const OutputMeasure m = output_by_name(output_measure);
  const auto c = schemes.for_input(e).index_of(input_category);
  if (!c)
    throw Error(ErrorKind::UnknownName,
                fmt::format("unknown category '{}' for input event '{}'", input_category, input_event));
  return baseline_sample(rows, e, *c, m);
}

ScreeningResult screen_confounder(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                                  const RuleTuple& rule, double alpha, std::size_t min_n) {
  if (!rule.valid())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("rule input and confounder are both '{}'", name_of(rule.input_event)));
  check_min_n(min_n);
  const std::size_t n_in = schemes.categories(rule.input_event);
  const std::size_t n_cf = schemes.categories(rule.confounder);

  // Outputs bucketed by (input category, confounder category).
  std::vector<std::vector<double>> buckets(n_in * n_cf);
  for (const auto& r : rows) {
    const auto ic = r.input(rule.input_event);
    const auto cc = r.input(rule.confounder);
    if (ic == kUnavailable || cc == kUnavailable) continue;
    buckets[idx(ic) * n_cf + idx(cc)].push_back(r.output(rule.output_measure));
  }
  // Sorted samples make every sum, and hence every result bit, independent of row order.
  for (auto& b : buckets) std::sort(b.begin(), b.end());

  ScreeningResult result;
  result.rule = rule;
  result.alpha = alpha;
  result.cells.reserve(n_in * n_cf);
  result.min_p_per_input_category.assign(n_in, std::nullopt);
  for (std::size_t i = 0; i < n_in; ++i) {
    std::vector<double> baseline;
    for (std::size_t c = 0; c < n_cf; ++c) {
      const auto& b = buckets[i * n_cf + c];
      baseline.insert(baseline.end(), b.begin(), b.end());
    }
    for (std::size_t c = 0; c < n_cf; ++c) {
      const auto& conditioned = buckets[i * n_cf + c];
      ScreeningCell cell;
      cell.input_category = static_cast<CategoryIndex>(i);
      cell.confounder_category = static_cast<CategoryIndex>(c);
      cell.n_baseline = baseline.size();
      cell.n_conditioned = conditioned.size();
      if (baseline.size() >= min_n && conditioned.size() >= min_n) {
        cell.test = stats::welch_t(baseline, conditioned);
        auto& best = result.min_p_per_input_category[i];
        if (!best || cell.test->p < *best) best = cell.test->p;
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

std::vector<ScreeningResult> screen_all(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                                        const Options& options) {
  check_min_n(options.min_n);
  std::vector<RuleTuple> rules;
  for (auto input : inputs_by_name())
    for (auto output : outputs_by_name())
      for (auto confounder : inputs_by_name())
        if (confounder != input) rules.push_back({input, output, confounder});

  std::vector<ScreeningResult> results(rules.size());
  detail::parallel_for(rules.size(), options.threads, [&](std::size_t i) {
    results[i] = screen_confounder(rows, schemes, rules[i], options.alpha, options.min_n);
  });
  return results;
}

EffectEstimate estimate_effect(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                               InputEvent input_event, CategoryIndex input_category,
                               OutputMeasure output_measure, double alpha, std::size_t min_n) {
  check_min_n(min_n);
  const Scheme& scheme = schemes.for_input(input_event);
  constexpr CategoryIndex base = 0;
  if (input_category == base)
    throw Error(ErrorKind::BaseCategoryQuery,
                fmt::format("'{}' is the base category of '{}'", scheme.base_label(), name_of(input_event)));
  if (input_category < 0 || idx(input_category) >= scheme.category_count())
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("category index {} out of range for '{}'", input_category, name_of(input_event)));

  EffectEstimate est{input_event, input_category, output_measure, base, std::nullopt, 0, 0, {}};
  double sum = 0.0;
  for (auto confounder : inputs_by_name()) {
    if (confounder == input_event) continue;
    const std::size_t n_cf = schemes.categories(confounder);
    std::vector<std::vector<double>> base_by_cf(n_cf), cat_by_cf(n_cf);
    for (const auto& r : rows) {
      const auto ic = r.input(input_event);
      const auto cc = r.input(confounder);
      if (cc == kUnavailable) continue;
      if (ic == base) {
        base_by_cf[idx(cc)].push_back(r.output(output_measure));
      } else if (ic == input_category) {
        cat_by_cf[idx(cc)].push_back(r.output(output_measure));
      }
    }
    for (std::size_t c = 0; c < n_cf; ++c) {
      if (base_by_cf[c].size() < min_n || cat_by_cf[c].size() < min_n) continue;
      std::sort(base_by_cf[c].begin(), base_by_cf[c].end());
      std::sort(cat_by_cf[c].begin(), cat_by_cf[c].end());
      const auto test = stats::welch_t(base_by_cf[c], cat_by_cf[c]);
      ++est.n_tested;
      if (test.p < alpha) {
        est.contributing.push_back({confounder, static_cast<CategoryIndex>(c), test.mean_diff, test.p});
        sum += test.mean_diff;
      }
    }
  }
  est.n_significant = est.contributing.size();
  if (est.n_significant > 0) est.avg_effect = sum / static_cast<double>(est.n_significant);
  return est;
}

std::vector<EffectEstimate> effects_all(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                                        const Options& options) {
  check_min_n(options.min_n);
  struct Job {
    InputEvent input;
    CategoryIndex category;
    OutputMeasure output;
  };
  std::vector<Job> jobs;
  for (auto input : inputs_by_name())
    for (std::size_t c = 1; c < schemes.categories(input); ++c)
      for (auto output : outputs_by_name()) jobs.push_back({input, static_cast<CategoryIndex>(c), output});

  std::vector<EffectEstimate> out(jobs.size());
  detail::parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
    out[i] = estimate_effect(rows, schemes, jobs[i].input, jobs[i].category, jobs[i].output, options.alpha,
                             options.min_n);
  });
  return out;
}

JointMatrix joint_distribution(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                               InputEvent input_event, OutputMeasure output_measure) {
  JointMatrix m;
  m.input_event = input_event;
  m.output_measure = output_measure;
  m.rows = schemes.categories(input_event);
  m.cols = schemes.for_output(output_measure).category_count();
  m.counts.assign(m.rows * m.cols, 0);
  for (const auto& r : rows) {
    const auto ic = r.input(input_event);
    if (ic == kUnavailable) continue;
    ++m.counts[idx(ic) * m.cols + idx(r.output_category(output_measure))];
  }
  return m;
}

}  // namespace n1sleep::mining
