#include "core/error.hpp"

namespace vcnn {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::UnsupportedField: return "UnsupportedField";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::DecodeError: return "DecodeError";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::NoValidPlacement: return "NoValidPlacement";
        case ErrorCode::MalformedNpy: return "MalformedNpy";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ShapeIncompatible: return "ShapeIncompatible";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CrcMismatch: return "CrcMismatch";
        case ErrorCode::VolumeTooSmall: return "VolumeTooSmall";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::DegenerateBatch: return "DegenerateBatch";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace vcnn
