#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace funk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of a field, or a jet operation hit a
/// singularity (division by a jet with zero constant term, sqrt of a
/// non-positive constant term).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failures of the metric tensor (condition number above 1e12).
class SingularMetric : public Error {
 public:
  using Error::Error;
};

/// A field failed its Euler homogeneity check.
class HomogeneityError : public Error {
 public:
  using Error::Error;
};

class CompileError : public Error {
 public:
  using Error::Error;
};

/// A precondition of the obstruction chain is not met by the sampled data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// The rational ansatz has a denominator below the admissible floor.
class AnsatzDomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("parse error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset),
        message_(message) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t offset_;
  std::string message_;
};

}  // namespace funk
