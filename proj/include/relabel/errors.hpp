#pragma once

#include <stdexcept>
#include <string>

namespace relabel {

// Exit-code mapping: ConfigError -> 1, ParseError -> 2, NumericalError -> 3.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg, std::size_t offset = 0)
      : std::runtime_error(msg), offset(offset) {}
  std::size_t offset;
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace relabel
