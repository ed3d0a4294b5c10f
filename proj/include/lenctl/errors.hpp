#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lenctl {

// Base for every error the library raises on bad input or bad state.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (JSON, CSV, config). Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Structurally valid input with a missing or mistyped field.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what),
        line_(line),
        field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// A value that violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Arithmetic produced a non-finite or out-of-range value.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A rate or mean whose denominator is empty.
class UndefinedRateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// PolicyState that cannot arise from a legal action sequence.
class StateError : public Error {
 public:
  using Error::Error;
};

// A token source failed mid-generation.
class GeneratorError : public Error {
 public:
  GeneratorError(std::size_t step, const std::string& what)
      : Error("generator failed at step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace lenctl
