#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace n1sleep::config {

// Flat TOML-like documents: `[section.name]` headers, `key = value` lines, '#' comments.
// Values are numbers (including inf/-inf), "strings", true/false, and nested [arrays]
// that may span lines.
struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, std::string, bool, Array> data;
  std::size_t line = 0;

  bool is_number() const noexcept { return std::holds_alternative<double>(data); }
  bool is_string() const noexcept { return std::holds_alternative<std::string>(data); }
  bool is_bool() const noexcept { return std::holds_alternative<bool>(data); }
  bool is_array() const noexcept { return std::holds_alternative<Array>(data); }

  // Throw SpecError naming `what` on type mismatch.
  double as_number(std::string_view what) const;
  const std::string& as_string(std::string_view what) const;
  bool as_bool(std::string_view what) const;
  const Array& as_array(std::string_view what) const;
};

struct Entry {
  std::string key;
  Value value;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::vector<Entry> entries;

  const Value* find(std::string_view key) const noexcept;
};

struct Document {
  std::string source;
  std::vector<Section> sections;

  const Section* find(std::string_view name) const noexcept;
};

// Syntax errors raise ParseError with the physical line number.
Document parse(std::string_view text, std::string source = "<config>");
Document load(const std::filesystem::path& path);

}  // namespace n1sleep::config
