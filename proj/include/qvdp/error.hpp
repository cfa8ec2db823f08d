#pragma once

#include <stdexcept>
#include <string>

namespace qvdp {

enum class ErrorKind {
    InvalidArgument,
    InvalidDimension,
    TruncationOverflow,
    MissingDriveFrequency,
    NumericFailure,
    WrongRegime,
    Bracket,
    Domain,
    Instability,
    Resolution,
    InsufficientStatistics,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

// Process exit code for the command-line front end.
int exit_code(ErrorKind kind);

}  // namespace qvdp
