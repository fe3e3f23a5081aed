#include "cpcl/error.hpp"

namespace cpcl {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::OverlappingAllocation: return "OverlappingAllocation";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::UnknownUser: return "UnknownUser";
        case ErrorCode::CoincidentNodes: return "CoincidentNodes";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::NarrowbandViolation: return "NarrowbandViolation";
        case ErrorCode::DelayExceedsCp: return "DelayExceedsCp";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyReference: return "EmptyReference";
        case ErrorCode::NotchTooWide: return "NotchTooWide";
        case ErrorCode::MapTooSmall: return "MapTooSmall";
        case ErrorCode::NegativeExcess: return "NegativeExcess";
        case ErrorCode::DegenerateEllipse: return "DegenerateEllipse";
        case ErrorCode::InsufficientMeasurements: return "InsufficientMeasurements";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::AmbiguousFix: return "AmbiguousFix";
        case ErrorCode::UnreadableMap: return "UnreadableMap";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace cpcl
