#include "n1sleep/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "n1sleep/error.hpp"

namespace n1sleep::config {

namespace {

const char* type_name(const Value& v) {
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_bool()) return "boolean";
  return "array";
}

[[noreturn]] void type_mismatch(const Value& v, std::string_view what, const char* expected) {
  throw Error(ErrorKind::Spec, fmt::format("line {}: {} must be a {}, got {}", v.line, what,
                                           expected, type_name(v)));
}

class Parser {
 public:
  Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  Document run() {
    Document doc;
    doc.source = source_;
    // Keys before any header land in an unnamed section.
    doc.sections.push_back(Section{"", 1, {}});
    while (true) {
      skip_blank_and_comments();
      if (at_end()) break;
      if (peek() == '[') {
        doc.sections.push_back(parse_header());
      } else {
        doc.sections.back().entries.push_back(parse_entry());
      }
    }
    if (doc.sections.front().entries.empty()) doc.sections.erase(doc.sections.begin());
    return doc;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& reason, std::string column = "") const {
    throw ParseError(source_, line_, std::move(column), reason);
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  void skip_comment() {
    while (!at_end() && peek() != '\n') advance();
  }

  // Whitespace, newlines and comments; used inside arrays and between statements.
  void skip_blank_and_comments() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_inline_space();
    if (!at_end() && peek() == '#') skip_comment();
    if (!at_end() && peek() != '\n') fail(fmt::format("unexpected character '{}'", peek()));
  }

  Section parse_header() {
    Section s;
    s.line = line_;
    advance();  // '['
    const std::size_t start = pos_;
    while (!at_end() && peek() != ']' && peek() != '\n') advance();
    if (at_end() || peek() != ']') fail("unterminated section header");
    std::string_view name = text_.substr(start, pos_ - start);
    advance();
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (name.empty()) fail("empty section name");
    for (char c : name)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
        fail(fmt::format("invalid character '{}' in section name", c));
    s.name = std::string(name);
    expect_line_end();
    return s;
  }

  Entry parse_entry() {
    Entry e;
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-'))
      advance();
    e.key = std::string(text_.substr(start, pos_ - start));
    if (e.key.empty()) fail(fmt::format("expected key, found '{}'", peek()));
    skip_inline_space();
    if (at_end() || peek() != '=') fail("expected '=' after key", e.key);
    advance();
    skip_inline_space();
    e.value = parse_value(e.key);
    expect_line_end();
    return e;
  }

  Value parse_value(const std::string& key) {
    if (at_end() || peek() == '\n') fail("missing value", key);
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '[') {
      advance();
      Array items;
      while (true) {
        skip_blank_and_comments();
        if (at_end()) fail("unterminated array", key);
        if (peek() == ']') {
          advance();
          break;
        }
        items.push_back(parse_value(key));
        skip_blank_and_comments();
        if (at_end()) fail("unterminated array", key);
        if (peek() == ',') {
          advance();
        } else if (peek() != ']') {
          fail(fmt::format("expected ',' or ']' in array, found '{}'", peek()), key);
        }
      }
      v.data = std::move(items);
    } else if (c == '"') {
      advance();
      std::string s;
      while (true) {
        if (at_end() || peek() == '\n') fail("unterminated string", key);
        char ch = peek();
        advance();
        if (ch == '"') break;
        if (ch == '\\') {
          if (at_end()) fail("unterminated string", key);
          const char esc = peek();
          advance();
          switch (esc) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '"': s += '"'; break;
            case '\\': s += '\\'; break;
            default: fail(fmt::format("unknown escape '\\{}'", esc), key);
          }
        } else {
          s += ch;
        }
      }
      v.data = std::move(s);
    } else {
      const std::size_t start = pos_;
      while (!at_end() && peek() != ',' && peek() != ']' && peek() != '\n' && peek() != '#' &&
             peek() != ' ' && peek() != '\t' && peek() != '\r')
        advance();
      const std::string_view tok = text_.substr(start, pos_ - start);
      if (tok == "true") {
        v.data = true;
      } else if (tok == "false") {
        v.data = false;
      } else if (tok == "inf" || tok == "+inf") {
        v.data = std::numeric_limits<double>::infinity();
      } else if (tok == "-inf") {
        v.data = -std::numeric_limits<double>::infinity();
      } else {
        std::string_view num = tok;
        if (!num.empty() && num.front() == '+') num.remove_prefix(1);
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), d);
        if (num.empty() || ec != std::errc{} || ptr != num.data() + num.size())
          fail(fmt::format("invalid value '{}'", tok), key);
        v.data = d;
      }
    }
    return v;
  }

  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

double Value::as_number(std::string_view what) const {
  if (!is_number()) type_mismatch(*this, what, "number");
  return std::get<double>(data);
}

const std::string& Value::as_string(std::string_view what) const {
  if (!is_string()) type_mismatch(*this, what, "string");
  return std::get<std::string>(data);
}

bool Value::as_bool(std::string_view what) const {
  if (!is_bool()) type_mismatch(*this, what, "boolean");
  return std::get<bool>(data);
}

const Array& Value::as_array(std::string_view what) const {
  if (!is_array()) type_mismatch(*this, what, "array");
  return std::get<Array>(data);
}

const Value* Section::find(std::string_view key) const noexcept {
  for (const auto& e : entries)
    if (e.key == key) return &e.value;
  return nullptr;
}

const Section* Document::find(std::string_view name) const noexcept {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

Document parse(std::string_view text, std::string source) {
  return Parser(text, std::move(source)).run();
}

Document load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::File, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

}  // namespace n1sleep::config
