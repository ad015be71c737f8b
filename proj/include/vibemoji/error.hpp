#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vibemoji {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (syntax or schema shape).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that breaks a domain invariant. Carries every
/// violation found, one human-readable line each.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& line : lines) {
      if (!out.empty()) out += "; ";
      out += line;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vibemoji
