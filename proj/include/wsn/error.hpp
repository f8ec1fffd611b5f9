#pragma once

#include <stdexcept>
#include <string>

namespace wsn {

/// Runtime failure inside a simulation module (bad input, broken precondition).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration. The CLI maps this to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wsn
