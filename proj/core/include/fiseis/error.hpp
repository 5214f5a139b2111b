#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fiseis {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (CSV rows, JSON documents). `line` is 1-based, 0 if
// the problem is not tied to a single line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// inverse_cumulative target lies at or past the total mass of the process.
class BeyondExtinction : public Error {
 public:
  using Error::Error;
};

// Every posterior grid node evaluated to -inf.
class EvidenceUnderflow : public Error {
 public:
  using Error::Error;
};

// No start of the optimizer reached a finite likelihood.
class FitFailure : public Error {
 public:
  using Error::Error;
};

// Too few samples for a goodness-of-fit statistic.
class InsufficientSample : public Error {
 public:
  using Error::Error;
};

// Sample variance too large for a method-of-moments Beta fit.
class DegenerateMoments : public Error {
 public:
  using Error::Error;
};

// Online update rejected: out-of-order event or a second shut-in.
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace fiseis
