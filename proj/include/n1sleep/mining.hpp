#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "n1sleep/discretize.hpp"
#include "n1sleep/model.hpp"
#include "n1sleep/stats.hpp"

namespace n1sleep::mining {

struct Options {
  double alpha = 0.05;
  std::size_t min_n = 3;
  // Worker threads for the sweeps; results are identical for any value.
  unsigned threads = 1;
};

// One conditioned-vs-baseline comparison of a screening rule.
struct ScreeningCell {
  CategoryIndex input_category = 0;
  CategoryIndex confounder_category = 0;
  std::size_t n_baseline = 0;
  std::size_t n_conditioned = 0;
  // Absent when either sample is below min_n (InsufficientData).
  std::optional<stats::TestResult> test;

  bool significant(double alpha) const noexcept { return test && test->p < alpha; }
};

struct ScreeningResult {
  RuleTuple rule;
  double alpha = 0.05;
  // Input-category major, confounder category minor: every pair exactly once.
  std::vector<ScreeningCell> cells;
  // Indexed by input category; absent when no cell in that row was testable.
  std::vector<std::optional<double>> min_p_per_input_category;

  const ScreeningCell& cell(CategoryIndex input_category, CategoryIndex confounder_category) const;
  bool flagged() const noexcept;
  std::size_t significant_cells() const noexcept;
  std::size_t tested_cells() const noexcept;
};

struct Contribution {
  InputEvent confounder;
  CategoryIndex confounder_category;
  double mean_diff;
  double p;
};

struct EffectEstimate {
  InputEvent input_event;
  CategoryIndex input_category;
  OutputMeasure output_measure;
  CategoryIndex base_category = 0;
  // Absent is the no-relation sentinel: no conditioned comparison was significant.
  std::optional<double> avg_effect;
  std::size_t n_significant = 0;
  // Conditioned comparisons with both samples >= min_n.
  std::size_t n_tested = 0;
  std::vector<Contribution> contributing;
};

struct JointMatrix {
  InputEvent input_event;
  OutputMeasure output_measure;
  std::size_t rows = 0;  // input categories
  std::size_t cols = 0;  // output categories
  std::vector<std::size_t> counts;  // row-major

  std::size_t at(std::size_t r, std::size_t c) const { return counts.at(r * cols + c); }
  std::size_t total() const noexcept;
};

// Outputs of rows whose input_event falls in input_category; unavailable inputs are skipped.
std::vector<double> baseline_sample(std::span<const FeatureRow> rows, InputEvent input_event,
                                    CategoryIndex input_category, OutputMeasure output_measure);
// Name-based form; unknown event, measure or category names raise UnknownName.
std::vector<double> baseline_sample(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                                    std::string_view input_event, std::string_view input_category,
                                    std::string_view output_measure);

// Stage 1: for every input category, baseline sample A against A restricted to each
// confounder category. Rows with either event unavailable are left out of the rule.
ScreeningResult screen_confounder(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                                  const RuleTuple& rule, double alpha = 0.05, std::size_t min_n = 3);

// All 10 x 4 x 9 rules ordered by input, output and confounder name.
std::vector<ScreeningResult> screen_all(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                                        const Options& options = {});

// Stage 2: within each category of each of the 9 other events, compare input_category
// against the base category and average the significant mean differences.
// Raises BaseCategoryQuery when input_category is the base.
EffectEstimate estimate_effect(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                               InputEvent input_event, CategoryIndex input_category,
                               OutputMeasure output_measure, double alpha = 0.05, std::size_t min_n = 3);

// One estimate per (input event, non-base category, output), ordered by input name,
// category order, output name.
std::vector<EffectEstimate> effects_all(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                                        const Options& options = {});

JointMatrix joint_distribution(std::span<const FeatureRow> rows, const SchemeSet& schemes,
                               InputEvent input_event, OutputMeasure output_measure);

}  // namespace n1sleep::mining
