#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "n1sleep/discretize.hpp"
#include "n1sleep/mining.hpp"

namespace n1sleep::report {

struct Rendered {
  std::string svg;
  std::string csv;
};

struct TableRendered {
  std::string csv;
  std::string text;
};

// Heatmap with fill intensity linear in count / max count. Raises EmptyMatrix when the
// matrix has no cells or the label counts do not match its shape.
Rendered render_joint_heatmap(const mining::JointMatrix& matrix, std::span<const std::string> row_labels,
                              std::span<const std::string> col_labels, const std::string& title = "");
Rendered render_joint_heatmap(const mining::JointMatrix& matrix, const SchemeSet& schemes);

// Side length of a significance square for min-p `p` in a cell of side `cell`:
// proportional to -log10(p), reaching the full cell at p = 1e-6.
double square_side(double p, double cell) noexcept;

// Rows are (input event, input category), columns are confounders; each cell holds the
// rule's minimum p over confounder categories. A square is drawn only when p < alpha.
// Raises MixedMeasures when the results do not all target `output_measure`.
Rendered render_significance_grid(std::span<const mining::ScreeningResult> results, const SchemeSet& schemes,
                                  OutputMeasure output_measure);

// Sentinel cells render as 0; everything else as a signed value with 2 decimals.
TableRendered render_effects_table(std::span<const mining::EffectEstimate> estimates, const SchemeSet& schemes);

std::string format_effect(const std::optional<double>& avg_effect);

// One line per significant screening cell, sorted by p.
std::string render_summary(std::span<const mining::ScreeningResult> results, const SchemeSet& schemes,
                           const mining::Options& options, std::size_t feature_rows);

struct Analysis {
  std::vector<FeatureRow> rows;
  std::vector<mining::ScreeningResult> screenings;
  std::vector<mining::EffectEstimate> effects;
  mining::Options options;
};

Analysis analyze(std::span<const DayRecord> records, const SchemeSet& schemes, const mining::Options& options);

// Writes joint_<input>_<output>.{svg,csv}, screen_<output>.{svg,csv}, effects.{csv,txt}
// and summary.txt into `out_dir`, creating it when needed. Returns the file names written.
std::vector<std::string> write_reports(const Analysis& analysis, const SchemeSet& schemes,
                                       const std::filesystem::path& out_dir);

}  // namespace n1sleep::report
