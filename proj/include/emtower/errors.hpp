#pragma once

#include <stdexcept>
#include <string>

namespace emtower {

enum class ErrorCode {
    InvalidArgument,
    DegreeOutOfRange,
    Unsupported,
    IllDefinedMap,
    OpaqueDifferential,
    Reliability,
    Parse,
};

const char* error_code_name(ErrorCode code);

class EngineError : public std::runtime_error {
public:
    EngineError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::DegreeOutOfRange: return "DEGREE_OUT_OF_RANGE";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::IllDefinedMap: return "ILL_DEFINED_MAP";
    case ErrorCode::OpaqueDifferential: return "OPAQUE_DIFFERENTIAL";
    case ErrorCode::Reliability: return "RELIABILITY";
    case ErrorCode::Parse: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

} // namespace emtower
