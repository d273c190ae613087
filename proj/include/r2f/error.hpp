#pragma once

#include <stdexcept>
#include <string>

namespace r2f {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyDocument,
  kEmptyCorpus,
  kDimensionMismatch,
  kZeroVector,
  kMissingEmbeddings,
  kEmptyHypothesis,
  kShapeMismatch,
  kParse,
  kDuplicateId,
  kEmptyField,
  kLengthMismatch,
  kVersionMismatch,
  kCorruptCheckpoint,
  kEmptyDataset,
  kNonFiniteLoss,
  kIo,
  kValidation,
};

const char* error_code_name(ErrorCode code);

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse error carrying the 1-based line number of the offending record.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace r2f
