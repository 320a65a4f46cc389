#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace transkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Raised with the byte offset of the offending token.
class SyntaxError : public InvalidInput {
 public:
  SyntaxError(std::size_t offset, const std::string& msg)
      : InvalidInput("syntax error at offset " + std::to_string(offset) + ": " + msg),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public DomainError {
 public:
  using DomainError::DomainError;
};

// exp/log/pow of a constant that the exact backend cannot represent.
class PartialConstant : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

class SummabilityViolation : public Error {
 public:
  using Error::Error;
};

class ContractionViolation : public SummabilityViolation {
 public:
  using SummabilityViolation::SummabilityViolation;
};

}  // namespace transkit
