#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "n1sleep/config.hpp"
#include "n1sleep/model.hpp"

namespace n1sleep {

struct Bin {
  double lower;
  double upper;
  bool lower_closed;
  bool upper_closed;
  std::string label;

  bool contains(double x) const noexcept;
};

struct SpecialValue {
  double value;
  std::string label;
};

// Ordered categories over a measure. Category 0 is the base category used by
// stage-2 effect estimation.
class Scheme {
 public:
  // `order` lists every label once; empty means specials first, then bins as given.
  // Throws SpecError when bins overlap, labels repeat, or [domain_lo, domain_hi] is not covered.
  Scheme(std::string name, std::vector<Bin> bins, std::vector<SpecialValue> specials,
         std::vector<std::string> order, double domain_lo, double domain_hi);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Bin>& bins() const noexcept { return bins_; }
  const std::vector<SpecialValue>& specials() const noexcept { return specials_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t category_count() const noexcept { return labels_.size(); }
  double domain_lo() const noexcept { return domain_lo_; }
  double domain_hi() const noexcept { return domain_hi_; }

  const std::string& label(CategoryIndex c) const { return labels_.at(static_cast<std::size_t>(c)); }
  std::optional<CategoryIndex> index_of(std::string_view label) const noexcept;
  const std::string& base_label() const noexcept { return labels_.front(); }

  // Throws DomainError when no bin or special value covers `value`.
  CategoryIndex categorize(double value) const;
  std::optional<CategoryIndex> try_categorize(double value) const noexcept;

 private:
  std::string name_;
  std::vector<Bin> bins_;
  std::vector<SpecialValue> specials_;
  std::vector<std::string> labels_;
  std::vector<CategoryIndex> bin_category_;
  std::vector<CategoryIndex> special_category_;
  double domain_lo_;
  double domain_hi_;
};

// The ten schemes, named after the four output measures and the six lifestyle inputs.
// Previous-night inputs share the scheme of the measure they lag.
class SchemeSet {
 public:
  static SchemeSet defaults();
  // Sections `[scheme.<name>]` replace the matching default; unknown names raise UnknownName.
  static SchemeSet from_config(const config::Document& doc);
  static SchemeSet load(const std::filesystem::path& path);

  const Scheme& for_output(OutputMeasure m) const noexcept {
    return schemes_[outputs_[static_cast<std::size_t>(m)]];
  }
  const Scheme& for_input(InputEvent e) const noexcept;
  const Scheme& by_name(std::string_view name) const;

  std::size_t categories(InputEvent e) const noexcept { return for_input(e).category_count(); }

 private:
  SchemeSet() = default;
  Scheme& slot(std::string_view name);

  std::vector<Scheme> schemes_;
  // Indices into schemes_, so copies stay self-contained.
  std::array<std::size_t, kOutputCount> outputs_{};
  std::array<std::size_t, kInputCount> inputs_{};

  void relink();
};

// Scheme names in table order (outputs first, then lifestyle inputs).
std::span<const std::string_view> scheme_names() noexcept;

CategoryIndex categorize(double value, const Scheme& scheme);

// One FeatureRow per record that directly follows its previous calendar night.
// Absent temperature/humidity (or values outside the scheme domain) become kUnavailable;
// an absent eating interval maps to the scheme's "Missing" label when it has one.
std::vector<FeatureRow> derive_features(std::span<const DayRecord> records, const SchemeSet& schemes);

}  // namespace n1sleep
