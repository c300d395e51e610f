// Error types shared by all avse modules.
#pragma once

#include <stdexcept>
#include <string>

namespace avse {

// Base for every data/validation failure raised by the library. The CLI maps
// these to exit code 2; anything else escaping a command is an internal error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidWeights : public Error {
 public:
  using Error::Error;
};

class InsufficientCalibrationData : public Error {
 public:
  using Error::Error;
};

class DegenerateCalibration : public Error {
 public:
  using Error::Error;
};

class InsufficientSignal : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace avse
