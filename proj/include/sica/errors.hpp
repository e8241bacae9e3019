#pragma once

#include <stdexcept>
#include <string>

namespace sica {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation requested on a penalty that does not support it (e.g. the
// derivative of L0).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Enumeration or memory budget would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A certificate cannot be evaluated, typically because a Gram matrix is
// singular.
class NotCertifiableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sica
