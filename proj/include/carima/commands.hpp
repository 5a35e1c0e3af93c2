#pragma once

#include "carima/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace carima {

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::filesystem::path input;    // gk
    std::filesystem::path output;   // gk
};

/// Outcome and covariates as configured, with the outcome trimmed to the
/// first day on which every regressor is available.
struct AnalysisData {
    TimeSeries y;
    CovariateMatrix X;
};

[[nodiscard]] AnalysisData load_analysis_data(const AnalysisConfig& config);

/// Each command writes its outputs atomically and throws Error on failure.
void cmd_gk(const CommandOptions& options);
void cmd_fit(const CommandOptions& options);
void cmd_analyze(const CommandOptions& options);
void cmd_simulate(const CommandOptions& options);
void cmd_diagnose(const CommandOptions& options);

/// Dispatches by name; prints the structured error to `err` and returns a
/// nonzero status on failure.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& err);

}  // namespace carima
