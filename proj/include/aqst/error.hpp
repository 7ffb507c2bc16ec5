#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace aqst {

enum class ErrorCode {
  invalid_rank,
  invalid_argument,
  shape,
  invalid_pattern_parameters,
  insufficient_block_size,
  invalid_basis,
  bound_inapplicable,
  non_converged,
  underdetermined_column,
  ill_conditioned_column,
  degenerate_eigvalue_system,
  step_size,
  io,
  parse,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is
/// stable and meant for programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the column-wise completion step; carries the 1-based column.
class ColumnError : public Error {
 public:
  ColumnError(ErrorCode code, int column, const std::string& what)
      : Error(code, what), column_(column) {}

  int column() const noexcept { return column_; }

 private:
  int column_;
};

/// Wraps an error raised inside one stage of a multi-stage pipeline.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& inner)
      : Error(inner.code(), "stage '" + stage + "': " + inner.what()),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace aqst
