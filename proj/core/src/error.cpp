#include "tristable/error.hpp"

namespace tristable {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NotTriStable: return "NotTriStable";
        case ErrorCode::EnergyBelowMinimum: return "EnergyBelowMinimum";
        case ErrorCode::UnreachablePoint: return "UnreachablePoint";
        case ErrorCode::DegenerateEnergy: return "DegenerateEnergy";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::InvalidGridSpec: return "InvalidGridSpec";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::NonIntegrable: return "NonIntegrable";
        case ErrorCode::Divergence: return "Divergence";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::NoPeak: return "NoPeak";
        case ErrorCode::NoWidth: return "NoWidth";
        case ErrorCode::SupportMismatch: return "SupportMismatch";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace tristable
