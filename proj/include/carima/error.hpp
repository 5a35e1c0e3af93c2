#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carima {

enum class ErrorCode {
    InvalidArgument,
    NegativeVariance,
    NonPositiveValue,
    SeriesTooShort,
    DegreesOfFreedomNonPositive,
    NonConvergence,
    SingularInformation,
    EstimabilityViolation,
    NonStationaryParams,
    MissingCovariate,
    AllSpecsFailed,
    HorizonExceedsData,
    InsufficientPsiWeights,
    TooFewResiduals,
    DateMisalignment,
    DateOutOfRange,
    InvalidSchedule,
    ExperimentAborted,
    GapInCalendar,
    UnparseableValue,
    DuplicateDate,
    InvalidBar,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's structured error output) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace carima
