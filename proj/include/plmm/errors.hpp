#pragma once

#include <stdexcept>
#include <string>

namespace plmm {

enum class ErrorCode {
    ParseError,
    InvalidBox,
    ZeroSpacing,
    NonDivisibleExtent,
    OutOfDomain,
    NoPersistentOptimum,
    IrrationalScale,
    MisalignedChild,
    SpecValidation,
    IoError,
};

constexpr const char* error_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidBox: return "InvalidBox";
    case ErrorCode::ZeroSpacing: return "ZeroSpacing";
    case ErrorCode::NonDivisibleExtent: return "NonDivisibleExtent";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NoPersistentOptimum: return "NoPersistentOptimum";
    case ErrorCode::IrrationalScale: return "IrrationalScale";
    case ErrorCode::MisalignedChild: return "MisalignedChild";
    case ErrorCode::SpecValidation: return "SpecValidation";
    case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

/// Process exit code contract: 2 parse, 3 validation, 4 runtime.
constexpr int exit_code_for(ErrorCode c) {
    switch (c) {
    case ErrorCode::ParseError:
        return 2;
    case ErrorCode::OutOfDomain:
    case ErrorCode::IoError:
        return 4;
    default:
        return 3;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }
    int exit_code() const { return exit_code_for(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace plmm
