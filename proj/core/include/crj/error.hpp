#pragma once

#include <stdexcept>
#include <string>

namespace crj {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A change-point configuration that violates the model's structural rules
// (duplicate or unordered locations, empty dwellings).
class Degenerate_configuration : public Error {
 public:
  using Error::Error;
};

// Malformed input file or document; carries a location string such as
// "traces/a.csv:12:3".
class Parse_error : public Error {
 public:
  Parse_error(std::string where, const std::string& what)
      : Error{where + ": " + what}, where_{std::move(where)} {}

  auto where() const -> const std::string& { return where_; }

 private:
  std::string where_;
};

}  // namespace crj
