#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hetassoc {

enum class ErrorCode
{
  parse,
  validation,
  size,
  dependence_order,
  degenerate_data,
  alignment,
  estimation_failure,
  degenerate_joint,
  insufficient_data,
  assumption_violation,
  division,
  numeric,
  degenerate_variance,
  configuration,
  domain,
  oracle_failure,
  coverage
};

std::string_view to_string(ErrorCode code);

//! Base exception for every failure raised by the library. The code lets
//! callers (and the CLI exit-code mapping) distinguish input problems from
//! numeric ones without parsing messages.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message)
    , code_(code)
  {}

  ErrorCode code() const noexcept { return code_; }

  //! True for errors caused by bad input or configuration (CLI exit 2).
  bool is_input_error() const noexcept;

private:
  ErrorCode code_;
};

//! Cell-level parse failure; row and column are 1-based positions in the
//! source text (row 1 is the header).
class ParseError : public Error
{
public:
  ParseError(std::size_t row, std::size_t column, const std::string& message)
    : Error(ErrorCode::parse, message)
    , row_(row)
    , column_(column)
  {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::size_t column_;
};

} // namespace hetassoc
