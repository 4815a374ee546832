#pragma once

#include <stdexcept>
#include <string>

namespace rydphon {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unreadable chain configuration. `key()` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Two atoms closer than the minimum separation guard.
class CoincidentAtoms : public Error {
 public:
  using Error::Error;
};

class NonConvergedCutoff : public Error {
 public:
  using Error::Error;
};

/// A squared frequency below the clamp window: the lattice is unstable.
class ImaginaryFrequency : public Error {
 public:
  using Error::Error;
};

class NonPositiveDiagonal : public Error {
 public:
  using Error::Error;
};

/// The quadratic boson form is not positive definite (complex Bogoliubov spectrum).
class DynamicalInstability : public Error {
 public:
  using Error::Error;
};

class ZeroFrequency : public Error {
 public:
  using Error::Error;
};

/// Model file failed schema validation (wrong version, missing sections or conventions).
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace rydphon
