#ifndef FHILL_ERROR_HPP
#define FHILL_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fhill {

/// Invalid argument to an operation (index ranges, probabilities, sizes).
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A value for which a logarithm or similar map is undefined.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Text input that cannot be parsed. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Parsed input that violates a data invariant (e.g. nonpositive sample value).
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ValidationError(const std::string& what) : std::runtime_error(what), line_(0) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class LookupError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Zero denominator in a ratio statistic: tied order statistics, zero kernel mass.
class DegenerateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Requested parameters do not match those of a supplied null table.
class ConfigurationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IntegrityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Index below the threshold where an asymptotic bracket is certified.
class ValidityError : public std::domain_error {
public:
  ValidityError(long threshold, const std::string& what)
      : std::domain_error(what), threshold_(threshold) {}
  long threshold() const noexcept { return threshold_; }

private:
  long threshold_;
};

}  // namespace fhill

#endif  // FHILL_ERROR_HPP
