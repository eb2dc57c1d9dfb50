#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlsosc {

enum class ErrorCode {
    ConfigInvalid,
    NoGroundState,
    NotConverged,
    NodalSolution,
    DomainTooSmall,
    NonMonotoneGrid,
    InsufficientPoints,
    NoCriticalPoint,
    NoWell,
    OutOfRange,
    SingularSolve,
    EigensolverFailure,
    StepTooLarge,
    NotPeriodic,
    MuSolveFailed,
    MassMismatch,
    LinearSolveFailure,
    TailContamination,
    NewtonDiverged,
    JacobianSingular,
    LostLock,
    TimeGridMismatch,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace nlsosc
