#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hgr {

enum class ErrorKind {
    ParseError,
    AntisymmetryViolation,
    GradingViolation,
    JacobiViolation,
    DimensionMismatch,
    NonpositiveScale,
    UncalibratedNorm,
    CalibrationFailure,
    NotInFirstLayer,
    NotAbelian,
    DegenerateFrame,
    NoHorizontalSubgroup,
    ValidationFailure,
    SolverFailure,
    EmptyInput,
    ResolutionExceeded,
    EmptyNet,
    HypothesisUnmet,
    PreconditionFailed,
    ConeNotEmpty,
    NonconvergentResidual,
    OracleDisagreement,
    UnknownFixture,
    EmptyProfile,
    IoError,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::AntisymmetryViolation: return "AntisymmetryViolation";
    case ErrorKind::GradingViolation: return "GradingViolation";
    case ErrorKind::JacobiViolation: return "JacobiViolation";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonpositiveScale: return "NonpositiveScale";
    case ErrorKind::UncalibratedNorm: return "UncalibratedNorm";
    case ErrorKind::CalibrationFailure: return "CalibrationFailure";
    case ErrorKind::NotInFirstLayer: return "NotInFirstLayer";
    case ErrorKind::NotAbelian: return "NotAbelian";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::NoHorizontalSubgroup: return "NoHorizontalSubgroup";
    case ErrorKind::ValidationFailure: return "ValidationFailure";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ResolutionExceeded: return "ResolutionExceeded";
    case ErrorKind::EmptyNet: return "EmptyNet";
    case ErrorKind::HypothesisUnmet: return "HypothesisUnmet";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::ConeNotEmpty: return "ConeNotEmpty";
    case ErrorKind::NonconvergentResidual: return "NonconvergentResidual";
    case ErrorKind::OracleDisagreement: return "OracleDisagreement";
    case ErrorKind::UnknownFixture: return "UnknownFixture";
    case ErrorKind::EmptyProfile: return "EmptyProfile";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace hgr
