#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cpcl {

enum class ErrorCode {
    InvalidArgument,
    OverlappingAllocation,
    OutOfBounds,
    UnknownUser,
    CoincidentNodes,
    UnknownNode,
    NarrowbandViolation,
    DelayExceedsCp,
    DimensionMismatch,
    EmptyReference,
    NotchTooWide,
    MapTooSmall,
    NegativeExcess,
    DegenerateEllipse,
    InsufficientMeasurements,
    NoConvergence,
    AmbiguousFix,
    UnreadableMap,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this type so callers can branch
// on code() instead of parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cpcl
