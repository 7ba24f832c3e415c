// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace vemqc {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
  using Error::Error;
};

struct TopologyError : Error {
  using Error::Error;
};

struct GenerationError : Error {
  using Error::Error;
};

struct SolveError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace vemqc
