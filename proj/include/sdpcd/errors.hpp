#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdpcd {

/// A parameter or argument outside its admissible range.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed graph file. Carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Internal data structures disagree with each other.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Filesystem failure while reading or writing experiment data.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdpcd
