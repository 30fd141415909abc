#pragma once

#include <stdexcept>
#include <string>

namespace hldx {

enum class ErrorCode {
    MalformedInput,
    EmptyDocument,
    NoSegments,
    EmbedderUnavailable,
    NoFixtureMatch,
    TransportError,
    BackendRefused,
    StorageError,
    MissingMetadata,
    EmptySummary,
    NotANumber,
    AmbiguousNumber,
    EmptyOutcomes,
    DocumentNotFound,
    UndefinedRPD,
    InvalidConfig,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace hldx
