#pragma once

#include "carima/causal.hpp"
#include "carima/diagnostics.hpp"
#include "carima/error.hpp"
#include "carima/sarima.hpp"
#include "carima/simulate.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace carima {

/// "***", "**", "*", "·" for p below 0.001, 0.01, 0.05, 0.1; empty otherwise or for NaN.
[[nodiscard]] std::string significance_stars(double p);

/// Fixed notation with thousands separators, e.g. 1,860.245.
[[nodiscard]] std::string format_fixed(double value, int decimals = 3);
[[nodiscard]] std::string format_count(std::size_t value);

struct ReportContext {
    std::string outcome;
    int n_boot = 0;
    std::uint64_t seed = 0;
};

/// Coefficient block with standard errors and stars, the effect block, the
/// fit statistics and the note, followed by a per-estimate listing.
[[nodiscard]] std::string render_report_txt(const CausalReport& report, const ReportContext& ctx,
                                            const CausalReport* adjusted = nullptr);

/// The full report as JSON (two-space indent, NaN as null).
[[nodiscard]] std::string report_json(const CausalReport& report, const ReportContext& ctx,
                                      const CausalReport* adjusted = nullptr);

/// One row per intervention and horizon day.
[[nodiscard]] std::string counterfactual_csv(const CausalReport& report);

[[nodiscard]] std::string fit_txt(const FittedModel& model, const std::string& outcome);
[[nodiscard]] std::string fit_json(const FittedModel& model, std::span<const CandidateRecord> candidates);

[[nodiscard]] std::string diagnostics_json(const TimeSeries& y, const FittedModel& model, std::size_t max_lag);
[[nodiscard]] std::string qq_csv(const FittedModel& model);

[[nodiscard]] std::string reps_csv(const ExperimentResult& result, const SimulationConfig& config);
[[nodiscard]] std::string summary_json(const ExperimentResult& result, const SimulationConfig& config);

[[nodiscard]] std::string error_json(const Error& error);

/// Writes through a temporary file in the same directory and renames it into
/// place. Creates missing parent directories. Throws Error(IoError).
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace carima
