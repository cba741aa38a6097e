#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace solvency {

// Malformed input stream (CSV or model file). `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string column = {})
      : std::runtime_error(format(what, line, column)), line_(line), column_(std::move(column)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, const std::string& column) {
    std::string out = "line " + std::to_string(line);
    if (!column.empty()) out += ", column '" + column + "'";
    return out + ": " + what;
  }

  std::size_t line_;
  std::string column_;
};

// A value outside the domain an operation accepts (e.g. a non-finite CAR).
class InvalidValue : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation called on data in the wrong state (e.g. unlabeled records).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Resampling asked to draw from a class with no members.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// SMOTE needs at least two members in every class it synthesizes for.
class InsufficientClassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace solvency
