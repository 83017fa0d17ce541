#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace swiftband {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent dataset content.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A trial runner failed to produce a curve segment.
class RunnerError : public Error {
 public:
  RunnerError(std::int64_t trial_id, const std::string& what)
      : Error("trial " + std::to_string(trial_id) + ": " + what), trial_id_(trial_id) {}

  std::int64_t trial_id() const noexcept { return trial_id_; }

 private:
  std::int64_t trial_id_;
};

/// Wire frame could not be decoded.
class DecodeError : public Error {
 public:
  using Error::Error;
};

}  // namespace swiftband
