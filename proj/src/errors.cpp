#include "hibreak/errors.hpp"

namespace hibreak {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::RankDeficientSubset: return "RankDeficientSubset";
    case ErrorCode::SingularSubset: return "SingularSubset";
    case ErrorCode::AllStartsDegenerate: return "AllStartsDegenerate";
    case ErrorCode::AllSubsetsDegenerate: return "AllSubsetsDegenerate";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::ParseError:
    case ErrorCode::MissingColumn:
    case ErrorCode::DuplicateLabel:
    case ErrorCode::TooFewRows:
    case ErrorCode::TooLarge:
      return true;
    default:
      return false;
  }
}

ParseError::ParseError(std::size_t row, std::string column, const std::string& detail)
    : Error(ErrorCode::ParseError,
            "parse error at row " + std::to_string(row) + ", column '" + column + "': " + detail),
      row_(row),
      column_(std::move(column)) {}

}  // namespace hibreak
