#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hibreak {

enum class ErrorCode {
  InvalidArgument,
  DomainError,
  NotPositiveDefinite,
  RankDeficient,
  RankDeficientSubset,
  SingularSubset,
  AllStartsDegenerate,
  AllSubsetsDegenerate,
  ConstantColumn,
  TooFewRows,
  TooLarge,
  ColumnMismatch,
  LengthMismatch,
  FileNotFound,
  ParseError,
  MissingColumn,
  DuplicateLabel,
};

const char* to_string(ErrorCode code) noexcept;

// Input problems (bad files, missing columns, oversize oracle requests).
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A malformed CSV cell. `row` is the 1-based data row (header excluded).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& detail);

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace hibreak
