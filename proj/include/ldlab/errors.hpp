#ifndef LDLAB_ERRORS_HPP
#define LDLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ldlab {

/// An argument lies outside the domain of the function it was passed to.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Base for failures of an iterative numerical procedure.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class NoSignChange : public NumericError {
public:
  explicit NoSignChange(const std::string& what) : NumericError(what) {}
};

class NonConvergence : public NumericError {
public:
  explicit NonConvergence(const std::string& what) : NumericError(what) {}
};

/// Raised when an exact computation would exceed its enumeration budget.
class BudgetExceeded : public std::runtime_error {
public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed code file; carries the 1-based line number (0 when not applicable).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace ldlab

#endif // LDLAB_ERRORS_HPP
