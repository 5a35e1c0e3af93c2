#include "carima/error.hpp"

namespace carima {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NegativeVariance: return "NegativeVariance";
        case ErrorCode::NonPositiveValue: return "NonPositiveValue";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::DegreesOfFreedomNonPositive: return "DegreesOfFreedomNonPositive";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::SingularInformation: return "SingularInformation";
        case ErrorCode::EstimabilityViolation: return "EstimabilityViolation";
        case ErrorCode::NonStationaryParams: return "NonStationaryParams";
        case ErrorCode::MissingCovariate: return "MissingCovariate";
        case ErrorCode::AllSpecsFailed: return "AllSpecsFailed";
        case ErrorCode::HorizonExceedsData: return "HorizonExceedsData";
        case ErrorCode::InsufficientPsiWeights: return "InsufficientPsiWeights";
        case ErrorCode::TooFewResiduals: return "TooFewResiduals";
        case ErrorCode::DateMisalignment: return "DateMisalignment";
        case ErrorCode::DateOutOfRange: return "DateOutOfRange";
        case ErrorCode::InvalidSchedule: return "InvalidSchedule";
        case ErrorCode::ExperimentAborted: return "ExperimentAborted";
        case ErrorCode::GapInCalendar: return "GapInCalendar";
        case ErrorCode::UnparseableValue: return "UnparseableValue";
        case ErrorCode::DuplicateDate: return "DuplicateDate";
        case ErrorCode::InvalidBar: return "InvalidBar";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace carima
