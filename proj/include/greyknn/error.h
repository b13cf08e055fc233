#pragma once

#include <stdexcept>
#include <string>

namespace greyknn {

enum class ErrorKind {
  parse_error,
  unknown_level,
  ragged_row,
  schema_error,
  schema_mismatch,
  empty_class,
  empty_input,
  too_few_rows,
  insufficient_candidates,
  empty_mask,
  degenerate_class,
  length_mismatch,
  predictor_missing,
  invalid_argument,
};

const char* to_string(ErrorKind kind);

/// Raised for malformed or degenerate input data. The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  DataError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace greyknn
