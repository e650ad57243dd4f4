#include "semg/errors.hpp"

namespace semg {

FormatError::FormatError(Kind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

const char* to_string(FormatError::Kind kind) noexcept {
  switch (kind) {
    case FormatError::Kind::BadMagic: return "BadMagic";
    case FormatError::Kind::UnsupportedVersion: return "UnsupportedVersion";
    case FormatError::Kind::TruncatedFile: return "TruncatedFile";
    case FormatError::Kind::LengthMismatch: return "LengthMismatch";
    case FormatError::Kind::MalformedHeader: return "MalformedHeader";
    case FormatError::Kind::CorruptPayload: return "CorruptPayload";
    case FormatError::Kind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace semg
