#ifndef MCTAIL_ERROR_HPP
#define MCTAIL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mctail {

// Error categories surfaced to callers and, by the CLI, to scripts.
// The names are stable identifiers; do not rename casually.
enum class ErrorCode {
  DomainError,
  NotEnoughPositive,
  DegenerateTail,
  EmptyResult,
  LengthMismatch,
  GridDegenerate,
  FormatVersionMismatch,
  ChecksumMismatch,
  SpecIncompatible,
  NotDivisible,
  MissingColumn,
  UnparsableRow,
  TooShort,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // "<Category>: <message>", the single-line form the CLI prints.
  std::string tagged_message() const {
    return std::string(to_string(code_)) + ": " + what();
  }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NotEnoughPositive: return "NotEnoughPositive";
    case ErrorCode::DegenerateTail: return "DegenerateTail";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::GridDegenerate: return "GridDegenerate";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::SpecIncompatible: return "SpecIncompatible";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparsableRow: return "UnparsableRow";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace mctail

#endif  // MCTAIL_ERROR_HPP
