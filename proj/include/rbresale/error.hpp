#pragma once

#include <stdexcept>
#include <string>

namespace rbresale {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Utility slope requested where the loss argument has reached d_max.
class DegenerateDomainError : public Error {
 public:
  using Error::Error;
};

class ZeroPriceError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A bracketing search (Brent, bisection) could not be set up.
class OptimizerError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class InfeasibleMeanError : public Error {
 public:
  using Error::Error;
};

/// Raised when a modified seller utility needs at least one other seller.
class InsufficientSellersError : public Error {
 public:
  using Error::Error;
};

class ZeroSupplyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace rbresale
