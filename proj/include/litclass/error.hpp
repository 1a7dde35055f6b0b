#pragma once

#include <stdexcept>
#include <string>

namespace litclass {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration or input value violates a documented invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Network-level failure that survived the retry policy.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status = 0) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Malformed service response, CSV row, or data file.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace litclass
