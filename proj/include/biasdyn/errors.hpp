#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace biasdyn {

// Root of every error thrown by the library. The CLI maps ConfigError to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree (agent count, alternative count, node count).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A value lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An index (agent, community) is out of range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// The operation only exists for a specific number of alternatives.
class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

// Inputs hit a zero denominator in a closed-form expression.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// A computation produced a non-finite value or failed a numeric self-check.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Random graph generation gave up (e.g. never produced a connected graph).
class GenerationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed data file (CSV, edge list). Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Invalid user configuration: bad parameter, unknown key, missing file.
// `field` names the offending key when there is one; `line` is 1-based.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string field = {},
                       std::optional<std::size_t> line = std::nullopt)
      : Error(format(what, field, line)), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& what, const std::string& field,
                            std::optional<std::size_t> line) {
    std::string out;
    if (!field.empty()) out += "'" + field + "': ";
    out += what;
    if (line) out += " (line " + std::to_string(*line) + ")";
    return out;
  }

  std::string field_;
  std::optional<std::size_t> line_;
};

class ConfigFileError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConfigSyntaxError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConfigValueError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace biasdyn
