#pragma once

#include <stdexcept>
#include <string>

namespace semg {

/// Precondition or argument outside its valid domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent or unusable configuration (bad key, rate too low for a filter, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persisted-file problems. `kind()` distinguishes the failure so callers can
/// map it to an exit code or retry policy.
class FormatError : public std::runtime_error {
 public:
  enum class Kind {
    BadMagic,
    UnsupportedVersion,
    TruncatedFile,
    LengthMismatch,
    MalformedHeader,
    CorruptPayload,
    Io,
  };

  FormatError(Kind kind, const std::string& what);

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(FormatError::Kind kind) noexcept;

}  // namespace semg
