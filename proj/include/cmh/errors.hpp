#pragma once

#include <stdexcept>
#include <string>

namespace cmh {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Domain violation by the caller (bad subset, wrong type class, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested certification failed at the working precision. Callers
/// retry at a higher precision (see with_escalation).
class PrecisionError : public Error {
 public:
  using Error::Error;
};

class ReducibleError : public Error {
 public:
  using Error::Error;
};

class NotCMError : public Error {
 public:
  using Error::Error;
};

class NotGaloisError : public Error {
 public:
  using Error::Error;
};

/// An enclosure that should contain an integer contains none.
class NonIntegralError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmh
