#pragma once

#include <stdexcept>
#include <string>

namespace wtm {

/// Invalid argument passed to a library call (bad probability, range, width...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or truncated input file.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Header, Truncated, Label, Width, Symbol, Checksum, Io };

  ParseError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Inputs that are individually valid but inconsistent with each other
/// (model/dataset width mismatch, label out of range for a model...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wtm
