#include "n1sleep/error.hpp"

#include <fmt/format.h>

namespace n1sleep {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::File: return "FileError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Overlap: return "OverlapError";
    case ErrorKind::DuplicateDate: return "DuplicateDateError";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::Spec: return "SpecError";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::BaseCategoryQuery: return "BaseCategoryQuery";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::MixedMeasures: return "MixedMeasures";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

ParseError::ParseError(std::string source, std::size_t line, std::string column,
                       std::string reason)
    : Error(ErrorKind::Parse,
            column.empty() ? fmt::format("{}:{}: {}", source, line, reason)
                           : fmt::format("{}:{}: column '{}': {}", source, line, column, reason)),
      source_(std::move(source)),
      line_(line),
      column_(std::move(column)),
      reason_(std::move(reason)) {}

}  // namespace n1sleep
