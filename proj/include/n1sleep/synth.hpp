#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "n1sleep/config.hpp"
#include "n1sleep/discretize.hpp"
#include "n1sleep/model.hpp"

namespace n1sleep::synth {

// Additive shift of an output measure on nights where an event takes a category.
struct Link {
  InputEvent event;
  std::string category;
  OutputMeasure output;
  double delta;
};

struct GeneratorSpec {
  int n_days = 365;
  std::uint64_t seed = 1;
  Date start_date{std::chrono::year{2021}, std::chrono::January, std::chrono::day{1}};
  // Indexed by OutputMeasure.
  std::array<double, kOutputCount> baseline_means{15.0, 30.0, 1.5, 0.88};
  std::array<double, kOutputCount> noise_sd{6.0, 8.0, 0.8, 0.04};
  std::vector<Link> planted_effects;
  std::vector<Link> confounder_links;
  // AR(1) coefficient on the previous night's noise.
  double carryover = 0.0;
  // Category probabilities in scheme order for the six lifestyle inputs; unlisted
  // events are uniform. Previous-night inputs follow from the generated outputs.
  std::map<InputEvent, std::vector<double>> input_marginals;
};

struct GeneratedData {
  std::vector<DayRecord> records;
  // Nights whose raw output fell outside the measure's domain and was clamped.
  std::array<std::size_t, kOutputCount> clamped{};

  double clamp_rate(OutputMeasure m) const noexcept {
    return records.empty() ? 0.0
                           : static_cast<double>(clamped[static_cast<std::size_t>(m)]) /
                                 static_cast<double>(records.size());
  }
};

// Throws SpecError on invalid probabilities, unknown names/labels or out-of-range values.
void validate(const GeneratorSpec& spec, const SchemeSet& schemes);

// n_days consecutive nights, reproducible from spec.seed. Lifestyle values are drawn
// uniformly inside the chosen bin (shifted exponential for unbounded bins). When the
// drawn weekly exercise category cannot hold the day's minutes it is redrawn among the
// categories that can.
GeneratedData generate(const GeneratorSpec& spec, const SchemeSet& schemes = SchemeSet::defaults());

// Sections: [generator] n_days, seed, carryover, start_date; [baseline_means] and
// [noise_sd] keyed by output name; [input_marginals] keyed by input name;
// [effects] planted = [[event, "Category", output, delta], ...] and confounders = [...].
GeneratorSpec spec_from_config(const config::Document& doc);
GeneratorSpec load_spec(const std::filesystem::path& path);

}  // namespace n1sleep::synth
