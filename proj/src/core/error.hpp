#pragma once

#include <stdexcept>
#include <string>

namespace vcnn {

// Error taxonomy shared with the C API; values are part of the ABI.
enum class ErrorCode : int {
    Ok = 0,
    InvalidArgument = 1,
    Io = 2,
    MalformedHeader = 3,
    UnsupportedField = 4,
    SizeMismatch = 5,
    DecodeError = 6,
    MalformedRow = 7,
    NoValidPlacement = 8,
    MalformedNpy = 9,
    ShapeMismatch = 10,
    ShapeIncompatible = 11,
    BadMagic = 12,
    VersionMismatch = 13,
    CrcMismatch = 14,
    VolumeTooSmall = 15,
    EmptyDataset = 16,
    DegenerateBatch = 17,
    ConfigError = 18,
    Internal = 19,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace vcnn
