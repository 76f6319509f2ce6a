#pragma once

#include <stdexcept>
#include <string>

namespace qgpt {

// Base for every error raised by the toolkit. Precondition violations on
// plain arguments use std::invalid_argument / std::out_of_range instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model output or input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Bad configuration detected at startup (missing credentials, bad config).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Provider failure: transport, auth, or an exhausted script.
class GatewayError : public Error {
 public:
  using Error::Error;
};

// No path exists between the requested cells.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

// Frontier search found nothing left to explore.
class ExplorationComplete : public Error {
 public:
  using Error::Error;
};

}  // namespace qgpt
