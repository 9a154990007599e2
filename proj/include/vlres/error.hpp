#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vlres {

enum class ErrorCode {
  invalid_distribution,
  index_mismatch,
  prefix_violation,
  incomplete,
  duplicate_leaf,
  alphabet_mismatch,
  zero_probability_symbol,
  size_cap_exceeded,
  invalid_size,
  invalid_argument,
  instance_too_large,
  unbounded_ratio,
  precondition_violation,
  out_of_range,
  source_exhausted,
  parse_error,
  internal,
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_distribution: return "invalid distribution";
    case ErrorCode::index_mismatch: return "index-set mismatch";
    case ErrorCode::prefix_violation: return "prefix violation";
    case ErrorCode::incomplete: return "incomplete codebook";
    case ErrorCode::duplicate_leaf: return "duplicate leaf";
    case ErrorCode::alphabet_mismatch: return "alphabet mismatch";
    case ErrorCode::zero_probability_symbol: return "zero-probability symbol";
    case ErrorCode::size_cap_exceeded: return "size cap exceeded";
    case ErrorCode::invalid_size: return "invalid size";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::instance_too_large: return "instance too large";
    case ErrorCode::unbounded_ratio: return "unbounded ratio";
    case ErrorCode::precondition_violation: return "precondition violation";
    case ErrorCode::out_of_range: return "out of range";
    case ErrorCode::source_exhausted: return "bit source exhausted";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by validate_complete when the Kraft sum falls short of one.
/// The deficit is the exact reduced fraction, e.g. "1/2".
class IncompleteError : public Error {
 public:
  explicit IncompleteError(std::string deficit)
      : Error(ErrorCode::incomplete, "Kraft deficit " + deficit), deficit_(std::move(deficit)) {}

  const std::string& deficit() const noexcept { return deficit_; }

 private:
  std::string deficit_;
};

/// The bit source ran dry part way through a stream.
class SourceExhaustedError : public Error {
 public:
  SourceExhaustedError(std::size_t codewords, std::size_t symbols)
      : Error(ErrorCode::source_exhausted,
              "after " + std::to_string(codewords) + " codewords (" + std::to_string(symbols) +
                  " symbols)"),
        codewords_(codewords),
        symbols_(symbols) {}

  std::size_t codewords_emitted() const noexcept { return codewords_; }
  std::size_t symbols_emitted() const noexcept { return symbols_; }

 private:
  std::size_t codewords_;
  std::size_t symbols_;
};

}  // namespace vlres
