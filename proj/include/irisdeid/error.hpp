#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irisdeid {

enum class ErrorCode {
    InsufficientPoints,
    DegenerateFit,
    GeometryInconsistent,
    EmptyRegion,
    DimensionMismatch,
    AllGlint,
    NoOverlap,
    LengthMismatch,
    EmptyAfterTrim,
    InvalidSpec,
    InvalidArgument,
    Io,
    Config,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (the batch pipeline in particular) can report a stable reason.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace irisdeid
