#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cogecon {

// Base of every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (stepping a terminal state,
// detaching a primary prototype, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class DuplicatePrototype : public Error {
 public:
  using Error::Error;
};

class EmptyRepresentation : public Error {
 public:
  EmptyRepresentation() : Error("representation has no regions") {}
};

class WrongKind : public Error {
 public:
  using Error::Error;
};

class NoEquilibrium : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line), detail_(what) {}

  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

}  // namespace cogecon
