#pragma once

#include <stdexcept>
#include <string>

namespace heatcloak {

/// Configuration text that fails to parse or validate. Carries the 1-based line (0 if unknown)
/// and the "section.key" the problem refers to (empty if none).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0, std::string key = {})
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line),
        key_(std::move(key)),
        bare_(msg) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }
  const std::string& bare_message() const noexcept { return bare_; }

 private:
  int line_;
  std::string key_;
  std::string bare_;
};

/// The leading block of a boundary operator is numerically singular.
class IllConditionedOperator : public std::runtime_error {
 public:
  IllConditionedOperator(const std::string& msg, double condition)
      : std::runtime_error(msg), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace heatcloak
