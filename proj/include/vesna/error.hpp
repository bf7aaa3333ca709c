#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vesna {

/// Invalid configuration document: schema violation, duplicate name,
/// dangling reference. The message names the offending item.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Belief / plan term syntax error at a 0-based byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : std::runtime_error("parse error at position " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Template rendering failure (placeholder without a bound value).
class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vesna
