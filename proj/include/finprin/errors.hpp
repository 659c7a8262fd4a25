#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finprin {

/// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// DSL or text-format input that does not parse.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A caller broke an operation's precondition (bad index, wrong language, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A numeric hypothesis of an extension procedure does not hold.
/// The message names the violated inequality with the concrete numbers.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive search would exceed its node cap.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& msg, double estimate) : Error(msg), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

/// The adversary refuses further point queries.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace finprin
