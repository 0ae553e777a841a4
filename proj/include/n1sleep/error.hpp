#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace n1sleep {

enum class ErrorKind {
  File,
  Parse,
  Overlap,
  DuplicateDate,
  Domain,
  InsufficientData,
  Spec,
  UnknownName,
  BaseCategoryQuery,
  EmptyMatrix,
  MixedMeasures,
  InvalidArgument,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Row numbers are 1-based physical line numbers in the source file (the header is line 1).
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, std::string column, std::string reason);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string column_;
  std::string reason_;
};

}  // namespace n1sleep
