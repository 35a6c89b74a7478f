#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rpc {

/// Value outside the domain an operation accepts (e.g. a probability > 1).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A circuit or simulation was configured inconsistently.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Expression text could not be parsed. `position()` is a 0-based column.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An expression parsed but cannot be mapped to circuits (scale or range).
class CompileError : public std::runtime_error {
 public:
  CompileError(const std::string& what, std::string node)
      : std::runtime_error(what + " (node: " + node + ")"), node_(std::move(node)) {}
  const std::string& node() const noexcept { return node_; }

 private:
  std::string node_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpc
