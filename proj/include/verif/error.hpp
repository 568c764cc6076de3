#pragma once

#include <stdexcept>
#include <string>

namespace verif {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input failed a precondition (bad URL, empty claim text, malformed record).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Image bytes could not be decoded into pixels.
class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace verif
