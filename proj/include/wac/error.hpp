#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wac {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input (edge lists, weight files, state files).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Operand sizes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value outside its admissible domain (non-positive weight, epsilon, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The convergence theorem's hypotheses do not hold for the requested
// operation (graph not strongly connected, epsilon not certified, ...).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

// An agent-level messaging contract was broken during a round.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace wac
