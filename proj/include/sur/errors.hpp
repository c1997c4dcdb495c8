#ifndef SUR_ERRORS_HPP
#define SUR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sur {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// An argument is outside its documented domain (bad coordinates, nonpositive
// radius, malformed config value, ...).
class InvalidInputError : public Error {
public:
  using Error::Error;
};

// A constructed value would violate a type invariant (holes larger than the
// outer ring, all-zero weight vector, duplicate sample ids, ...).
class InvariantError : public Error {
public:
  using Error::Error;
};

// Geometry too degenerate to operate on (zero-area polygon and friends).
class DegenerateGeometryError : public Error {
public:
  using Error::Error;
};

// A byte stream could not be parsed (XML, JSON, config files). The message
// carries position information where the underlying parser provides it.
class ParseError : public Error {
public:
  using Error::Error;
};

// Input data is structurally fine but unusable for the requested operation
// (training sample without ground truth, missing manifest, ...).
class DataError : public Error {
public:
  using Error::Error;
};

} // namespace sur

#endif // SUR_ERRORS_HPP
