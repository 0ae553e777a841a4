#include "n1sleep/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "n1sleep/error.hpp"
#include "n1sleep/ingest.hpp"

namespace n1sleep::report {

namespace {

struct Rgb {
  int r, g, b;
};

constexpr Rgb kLow{247, 251, 255};
constexpr Rgb kHigh{8, 48, 107};
constexpr Rgb kSignificant{203, 24, 29};

std::string fill_for(double intensity) {
  auto mix = [intensity](int lo, int hi) {
    return static_cast<int>(std::lround(lo + (hi - lo) * intensity));
  };
  return fmt::format("#{:02x}{:02x}{:02x}", mix(kLow.r, kHigh.r), mix(kLow.g, kHigh.g), mix(kLow.b, kHigh.b));
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// Fixed 2-decimal coordinates keep the SVG text stable.
std::string num(double v) { return fmt::format("{:.2f}", v); }

std::string svg_open(double width, double height) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      num(width), num(height));
}

std::vector<std::string> labels_of(const Scheme& s) { return s.labels(); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::File, fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(ErrorKind::File, fmt::format("write failed for '{}'", path.string()));
}

}  // namespace

Rendered render_joint_heatmap(const mining::JointMatrix& matrix, std::span<const std::string> row_labels,
                              std::span<const std::string> col_labels, const std::string& title) {
  if (matrix.rows == 0 || matrix.cols == 0 || matrix.counts.size() != matrix.rows * matrix.cols)
    throw Error(ErrorKind::EmptyMatrix, "joint distribution matrix has no cells");
  if (row_labels.size() != matrix.rows || col_labels.size() != matrix.cols)
    throw Error(ErrorKind::EmptyMatrix, "label counts do not match the matrix shape");

  const std::size_t max_count = *std::max_element(matrix.counts.begin(), matrix.counts.end());
  constexpr double cell_w = 90, cell_h = 40, left = 140, top = 60;
  const double width = left + cell_w * static_cast<double>(matrix.cols) + 20;
  const double height = top + cell_h * static_cast<double>(matrix.rows) + 40;

  Rendered out;
  std::string& svg = out.svg;
  svg = svg_open(width, height);
  if (!title.empty())
    svg += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">{}</text>\n", num(left), xml_escape(title));
  for (std::size_t c = 0; c < matrix.cols; ++c)
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       num(left + cell_w * (static_cast<double>(c) + 0.5)), num(top - 8), xml_escape(col_labels[c]));
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    const double y = top + cell_h * static_cast<double>(r);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", num(left - 8),
                       num(y + cell_h / 2 + 4), xml_escape(row_labels[r]));
    for (std::size_t c = 0; c < matrix.cols; ++c) {
      const std::size_t count = matrix.at(r, c);
      const double intensity =
          max_count == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(max_count);
      const double x = left + cell_w * static_cast<double>(c);
      svg += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#999999\" "
          "data-count=\"{}\"/>\n",
          num(x), num(y), num(cell_w), num(cell_h), fill_for(intensity), count);
      svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{}\">{}</text>\n",
                         num(x + cell_w / 2), num(y + cell_h / 2 + 4), intensity > 0.5 ? "#ffffff" : "#000000",
                         count);
    }
  }
  svg += "</svg>\n";

  std::string& csv = out.csv;
  csv = "category";
  for (const auto& l : col_labels) csv += "," + csv_field(l);
  csv += '\n';
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    csv += csv_field(row_labels[r]);
    for (std::size_t c = 0; c < matrix.cols; ++c) csv += fmt::format(",{}", matrix.at(r, c));
    csv += '\n';
  }
  return out;
}

Rendered render_joint_heatmap(const mining::JointMatrix& matrix, const SchemeSet& schemes) {
  const auto rows = labels_of(schemes.for_input(matrix.input_event));
  const auto cols = labels_of(schemes.for_output(matrix.output_measure));
  return render_joint_heatmap(matrix, rows, cols,
                              fmt::format("{} vs {}", name_of(matrix.input_event), name_of(matrix.output_measure)));
}

double square_side(double p, double cell) noexcept {
  if (!(p < 1.0)) return 0.0;
  if (p <= 0.0) return cell;
  return cell * std::min(1.0, -std::log10(p) / 6.0);
}

Rendered render_significance_grid(std::span<const mining::ScreeningResult> results, const SchemeSet& schemes,
                                  OutputMeasure output_measure) {
  for (const auto& r : results)
    if (r.rule.output_measure != output_measure)
      throw Error(ErrorKind::MixedMeasures,
                  fmt::format("screening results span '{}' and '{}'", name_of(output_measure),
                              name_of(r.rule.output_measure)));

  auto find = [&](InputEvent input, InputEvent confounder) -> const mining::ScreeningResult* {
    for (const auto& r : results)
      if (r.rule.input_event == input && r.rule.confounder == confounder) return &r;
    return nullptr;
  };

  struct Row {
    InputEvent input;
    CategoryIndex category;
  };
  std::vector<Row> rows;
  for (auto input : kAllInputs)
    for (std::size_t c = 0; c < schemes.categories(input); ++c) rows.push_back({input, static_cast<CategoryIndex>(c)});

  constexpr double cell = 36, left = 260, top = 150;
  const double width = left + cell * static_cast<double>(kInputCount) + 20;
  const double height = top + cell * static_cast<double>(rows.size()) + 20;

  Rendered out;
  std::string& svg = out.svg;
  svg = svg_open(width, height);
  svg += fmt::format("<text x=\"10\" y=\"20\" font-size=\"14\">Most significant confounder effect on {}</text>\n",
                     xml_escape(name_of(output_measure)));
  for (std::size_t c = 0; c < kInputCount; ++c) {
    const double x = left + cell * (static_cast<double>(c) + 0.5);
    svg += fmt::format("<text x=\"{0}\" y=\"{1}\" transform=\"rotate(-60 {0} {1})\">{2}</text>\n", num(x),
                       num(top - 6), xml_escape(name_of(kAllInputs[c])));
  }

  std::string& csv = out.csv;
  csv = "input_event,input_category";
  for (auto c : kAllInputs) csv += fmt::format(",{}", name_of(c));
  csv += '\n';

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string& label = schemes.for_input(row.input).label(row.category);
    const double y = top + cell * static_cast<double>(r);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}={}</text>\n", num(left - 6),
                       num(y + cell / 2 + 4), xml_escape(name_of(row.input)), xml_escape(label));
    csv += fmt::format("{},{}", name_of(row.input), csv_field(label));
    for (std::size_t c = 0; c < kInputCount; ++c) {
      const double x = left + cell * static_cast<double>(c);
      svg += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#dddddd\"/>\n", num(x), num(y),
          num(cell), num(cell));
      const auto* res = find(row.input, kAllInputs[c]);
      std::optional<double> p;
      if (res && static_cast<std::size_t>(row.category) < res->min_p_per_input_category.size())
        p = res->min_p_per_input_category[static_cast<std::size_t>(row.category)];
      csv += p ? "," + format_real(*p) : std::string(",");
      if (p && *p < res->alpha) {
        const double side = square_side(*p, cell);
        svg += fmt::format(
            "<rect class=\"sig\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#{:02x}{:02x}{:02x}\" "
            "data-p=\"{}\"/>\n",
            num(x + (cell - side) / 2), num(y + (cell - side) / 2), num(side), num(side), kSignificant.r,
            kSignificant.g, kSignificant.b, format_real(*p));
      }
    }
    csv += '\n';
  }
  svg += "</svg>\n";
  return out;
}

namespace {

// Signed, two decimals; values that round to zero print as +0.00.
std::string signed_2dp(double v) {
  std::string s = fmt::format("{:+.2f}", v);
  if (s == "-0.00") s = "+0.00";
  return s;
}

}  // namespace

std::string format_effect(const std::optional<double>& avg_effect) {
  return avg_effect ? signed_2dp(*avg_effect) : std::string("0");
}

TableRendered render_effects_table(std::span<const mining::EffectEstimate> estimates, const SchemeSet& schemes) {
  TableRendered out;
  out.csv = "input_event,input_category,base_category,output_measure,avg_effect,relation,n_significant,n_tested\n";
  struct Line {
    InputEvent input;
    CategoryIndex category;
    std::array<std::optional<std::string>, kOutputCount> cells;
  };
  std::vector<Line> lines;
  for (const auto& e : estimates) {
    const auto& scheme = schemes.for_input(e.input_event);
    out.csv += fmt::format("{},{},{},{},{},{},{},{}\n", name_of(e.input_event), csv_field(scheme.label(e.input_category)),
                           csv_field(scheme.label(e.base_category)), name_of(e.output_measure),
                           e.avg_effect ? format_real(*e.avg_effect) : std::string("0"),
                           e.avg_effect ? "significant" : "none", e.n_significant, e.n_tested);
    auto it = std::find_if(lines.begin(), lines.end(), [&](const Line& l) {
      return l.input == e.input_event && l.category == e.input_category;
    });
    if (it == lines.end()) {
      lines.push_back({e.input_event, e.input_category, {}});
      it = std::prev(lines.end());
    }
    it->cells[static_cast<std::size_t>(e.output_measure)] = format_effect(e.avg_effect);
  }

  std::vector<std::array<std::string, 2 + kOutputCount>> table;
  std::array<std::string, 2 + kOutputCount> header{"input_event", "input_category"};
  for (auto m : kAllOutputs) header[2 + static_cast<std::size_t>(m)] = std::string(name_of(m));
  table.push_back(header);
  for (const auto& l : lines) {
    std::array<std::string, 2 + kOutputCount> row;
    row[0] = std::string(name_of(l.input));
    const auto& scheme = schemes.for_input(l.input);
    row[1] = fmt::format("{} (vs {})", scheme.label(l.category), scheme.base_label());
    for (std::size_t m = 0; m < kOutputCount; ++m) row[2 + m] = l.cells[m].value_or("");
    table.push_back(std::move(row));
  }
  std::array<std::size_t, 2 + kOutputCount> widths{};
  for (const auto& row : table)
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  for (const auto& row : table) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) line += "  ";
      line += i < 2 ? fmt::format("{:<{}}", row[i], widths[i]) : fmt::format("{:>{}}", row[i], widths[i]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out.text += line + '\n';
  }
  return out;
}

std::string render_summary(std::span<const mining::ScreeningResult> results, const SchemeSet& schemes,
                           const mining::Options& options, std::size_t feature_rows) {
  struct Hit {
    const mining::ScreeningResult* result;
    const mining::ScreeningCell* cell;
  };
  std::vector<Hit> hits;
  for (const auto& r : results)
    for (const auto& c : r.cells)
      if (c.significant(r.alpha)) hits.push_back({&r, &c});
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.cell->test->p < b.cell->test->p; });

  std::string out = fmt::format("# significant rules: {} (alpha={}, min_n={}, feature_rows={}, rules={})\n",
                                hits.size(), format_real(options.alpha), options.min_n, feature_rows, results.size());
  for (const auto& h : hits) {
    const auto& rule = h.result->rule;
    const auto& t = *h.cell->test;
    out += fmt::format("{}={} -> {} | C={}={} | dmean={} | p={:.3g}\n", name_of(rule.input_event),
                       schemes.for_input(rule.input_event).label(h.cell->input_category), name_of(rule.output_measure),
                       name_of(rule.confounder), schemes.for_input(rule.confounder).label(h.cell->confounder_category),
                       signed_2dp(t.mean_diff), t.p);
  }
  return out;
}

Analysis analyze(std::span<const DayRecord> records, const SchemeSet& schemes, const mining::Options& options) {
  Analysis a;
  a.options = options;
  a.rows = derive_features(records, schemes);
  a.screenings = mining::screen_all(a.rows, schemes, options);
  a.effects = mining::effects_all(a.rows, schemes, options);
  return a;
}

std::vector<std::string> write_reports(const Analysis& analysis, const SchemeSet& schemes,
                                       const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::File, fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(out_dir / name, content);
    written.push_back(name);
  };

  for (auto input : kAllInputs)
    for (auto output : kAllOutputs) {
      const auto matrix = mining::joint_distribution(analysis.rows, schemes, input, output);
      const auto r = render_joint_heatmap(matrix, schemes);
      const auto stem = fmt::format("joint_{}_{}", name_of(input), name_of(output));
      emit(stem + ".svg", r.svg);
      emit(stem + ".csv", r.csv);
    }

  for (auto output : kAllOutputs) {
    std::vector<mining::ScreeningResult> subset;
    for (const auto& s : analysis.screenings)
      if (s.rule.output_measure == output) subset.push_back(s);
    const auto r = render_significance_grid(subset, schemes, output);
    emit(fmt::format("screen_{}.svg", name_of(output)), r.svg);
    emit(fmt::format("screen_{}.csv", name_of(output)), r.csv);
  }

  const auto effects = render_effects_table(analysis.effects, schemes);
  emit("effects.csv", effects.csv);
  emit("effects.txt", effects.text);
  emit("summary.txt", render_summary(analysis.screenings, schemes, analysis.options, analysis.rows.size()));
  return written;
}

}  // namespace n1sleep::report
