#include "qvdp/error.hpp"

namespace qvdp {

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::InvalidDimension: return "invalid-dimension";
        case ErrorKind::TruncationOverflow: return "truncation-overflow";
        case ErrorKind::MissingDriveFrequency: return "missing-drive-frequency";
        case ErrorKind::NumericFailure: return "numeric-failure";
        case ErrorKind::WrongRegime: return "wrong-regime";
        case ErrorKind::Bracket: return "bracket";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Instability: return "instability";
        case ErrorKind::Resolution: return "resolution";
        case ErrorKind::InsufficientStatistics: return "insufficient-statistics";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::InvalidDimension:
        case ErrorKind::MissingDriveFrequency:
        case ErrorKind::Resolution:
            return 2;
        case ErrorKind::Io:
            return 6;
        case ErrorKind::WrongRegime:
        case ErrorKind::Bracket:
            return 4;
        case ErrorKind::InsufficientStatistics:
            return 5;
        case ErrorKind::TruncationOverflow:
        case ErrorKind::NumericFailure:
        case ErrorKind::Domain:
        case ErrorKind::Instability:
            return 3;
    }
    return 3;
}

}  // namespace qvdp
