#include "nlsosc/error.hpp"

namespace nlsosc {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::NoGroundState: return "NoGroundState";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NodalSolution: return "NodalSolution";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::NonMonotoneGrid: return "NonMonotoneGrid";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::NoCriticalPoint: return "NoCriticalPoint";
    case ErrorCode::NoWell: return "NoWell";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SingularSolve: return "SingularSolve";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NotPeriodic: return "NotPeriodic";
    case ErrorCode::MuSolveFailed: return "MuSolveFailed";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::TailContamination: return "TailContamination";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::JacobianSingular: return "JacobianSingular";
    case ErrorCode::LostLock: return "LostLock";
    case ErrorCode::TimeGridMismatch: return "TimeGridMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace nlsosc
