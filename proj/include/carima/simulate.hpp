#pragma once

#include "carima/causal.hpp"
#include "carima/date.hpp"
#include "carima/sarima.hpp"
#include "carima/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace carima {

enum class ErrorDistribution { Gaussian, StudentT, Resample };

[[nodiscard]] const char* to_string(ErrorDistribution dist) noexcept;

struct ErrorModel {
    ErrorDistribution kind = ErrorDistribution::Gaussian;
    double df = 5.0;               // StudentT, must exceed 2
    std::vector<double> pool;      // Resample: centred and rescaled to sigma2 before drawing
};

struct InjectedEffect {
    InterventionKind kind = InterventionKind::Persistent;
    Date date;
    double magnitude = 0.0;
};

struct SimulationConfig {
    ModelSpec spec;
    Coefficients truth;
    std::size_t n = 500;
    Date start = Date::parse("2014-05-03");
    Date intervention_date = Date::parse("2015-08-01");
    std::optional<double> effect;  // magnitude on the simulated scale; none for H0
    InterventionKind effect_kind = InterventionKind::Persistent;
    ErrorModel errors;
    int n_reps = 1000;
    std::uint64_t seed = 20171218;
    std::vector<int> horizons{1, 7, 14};
    int n_boot = 0;                // 0 skips the bootstrap
    bool use_true_params = true;   // condition on truth instead of re-estimating
    bool use_selection = false;    // choose the order from `grid` by BIC
    std::vector<ModelSpec> grid;
    unsigned threads = 0;          // 0 picks the hardware concurrency

    /// Throws Error(InvalidArgument | ConfigError).
    void validate() const;
};

/// Path of length n: burn-in of 10(p + q + s(P + Q) + 1) steps discarded,
/// then integrated with zero initial conditions when d or D > 0.
/// Throws Error(NonStationaryParams).
[[nodiscard]] TimeSeries simulate_sarima(const ModelSpec& spec, const Coefficients& truth, std::size_t n,
                                         Date start, const ErrorModel& errors, std::uint64_t seed);
[[nodiscard]] TimeSeries simulate_sarima(const SimulationConfig& config);

/// Pulse adds the magnitude on one date, persistent from the date onward.
/// Throws Error(DateOutOfRange).
[[nodiscard]] TimeSeries inject_effect(const TimeSeries& ts, const InjectedEffect& effect);

struct RepRecord {
    std::size_t rep = 0;
    bool ok = false;
    std::string error;
    double sigma2 = 0.0;
    std::vector<EffectEstimate> estimates;   // horizons x {point, cumulative, temporal_average}
};

struct CellSummary {
    EffectKind kind = EffectKind::Point;
    int horizon = 1;
    std::size_t count = 0;
    double truth = 0.0;
    double mean = 0.0;
    double bias = 0.0;
    double rmse = 0.0;
    double empirical_variance = 0.0;
    double formula_variance = 0.0;       // mean of the per-rep null variances
    double rejection_normal = 0.0;       // at 5%
    double rejection_bootstrap = 0.0;    // NaN without bootstrap
    double empirical_q025 = 0.0;         // of the estimate minus the truth
    double empirical_q975 = 0.0;
    double normal_q025 = 0.0;            // +-1.96 sqrt(formula_variance)
    double normal_q975 = 0.0;
};

struct ExperimentResult {
    std::vector<RepRecord> reps;
    std::vector<CellSummary> cells;
    std::size_t failures = 0;
};

/// Simulates, injects, analyses and aggregates n_reps replications. Rep r uses
/// seeds derived from (seed, r) so thread count does not change results.
/// Throws Error(ExperimentAborted) when failures reach 1% of the reps.
[[nodiscard]] ExperimentResult run_experiment(const SimulationConfig& config);

}  // namespace carima
