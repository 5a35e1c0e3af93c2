#pragma once

#include "carima/covariates.hpp"
#include "carima/date.hpp"
#include "carima/diagnostics.hpp"
#include "carima/sarima.hpp"
#include "carima/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace carima {

enum class InterventionKind { Pulse, Persistent };

[[nodiscard]] const char* to_string(InterventionKind kind) noexcept;
[[nodiscard]] InterventionKind parse_intervention_kind(const std::string& text);

struct Intervention {
    Date date;
    InterventionKind kind = InterventionKind::Persistent;
    std::string label;
};

class InterventionSchedule {
public:
    InterventionSchedule() = default;
    /// Throws Error(InvalidSchedule) unless dates are strictly increasing.
    explicit InterventionSchedule(std::vector<Intervention> interventions);

    [[nodiscard]] std::span<const Intervention> interventions() const noexcept { return items_; }
    [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
    [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
    [[nodiscard]] const Intervention& operator[](std::size_t i) const { return items_[i]; }

    /// Intervention i must fall inside y with at least `min_pre` earlier
    /// observations, and each horizon must end before intervention i + 1.
    /// Throws Error(InvalidSchedule).
    void validate(const TimeSeries& y, std::span<const std::vector<int>> horizons,
                  std::size_t min_pre) const;

private:
    std::vector<Intervention> items_;
};

struct BCoefficients {
    std::vector<double> b{1.0};

    /// Throws Error(InvalidArgument) unless b[0] == 1.
    void validate() const;
    /// Zero beyond the stored coefficients.
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return i < b.size() ? b[i] : 0.0; }
};

enum class EffectKind { Point, Cumulative, TemporalAverage, Contemporaneous };

[[nodiscard]] const char* to_string(EffectKind kind) noexcept;

struct CriticalValues {
    double q025 = 0.0;
    double q05 = 0.0;
    double q95 = 0.0;
    double q975 = 0.0;
};

struct EffectEstimate {
    EffectKind kind = EffectKind::Point;
    int horizon = 1;
    double value = 0.0;                  // log/transformed scale
    double std_error_normal = 0.0;
    double p_value_normal = 1.0;
    double p_value_bootstrap = 0.0;      // NaN when the bootstrap was skipped
    CriticalValues bootstrap_critical;   // NaN when the bootstrap was skipped
    double multiplicative = 0.0;         // exp(value) - 1
};

/// tau_hat at each of the first k steps: observed minus forecast.
/// Throws Error(HorizonExceedsData) if observed does not cover
/// [t_n, t_n + k - 1] or the forecast is shorter than k.
[[nodiscard]] std::vector<double> point_effects(const TimeSeries& observed,
                                                const ForecastResult& counterfactual, Date t_n,
                                                std::size_t k);

[[nodiscard]] double cumulative_effect(std::span<const double> points);
[[nodiscard]] double temporal_average_effect(std::span<const double> points);

/// Weights w_1..w_k with estimate|H0 = sum_j w_j eps_{t_n - 1 + j}.
/// Throws Error(InsufficientPsiWeights) when psi has fewer than k weights.
[[nodiscard]] std::vector<double> effect_weights(const PsiWeights& psi, const BCoefficients& b,
                                                 std::size_t k, EffectKind kind);

/// sigma2 * sum_j w_j^2 for the weights above.
[[nodiscard]] double null_variance(const PsiWeights& psi, const BCoefficients& b, double sigma2,
                                   std::size_t k, EffectKind kind);

/// Two-sided Normal p-value of estimate / sqrt(variance).
[[nodiscard]] double normal_test(double estimate, double variance);

struct BootstrapResult {
    double p_value = 1.0;
    CriticalValues critical;
};

/// Residual bootstrap of the H0 statistic: centred residuals are resampled
/// iid into the linear form of effect_weights. Replicate r draws from its own
/// stream seeded by (seed, r). p = (#{|stat*| >= |estimate|} + 1)/(n_boot + 1).
/// Throws Error(TooFewResiduals) for empty residuals and Error(InvalidArgument)
/// for n_boot < 500.
[[nodiscard]] BootstrapResult bootstrap_test(std::span<const double> residuals, const PsiWeights& psi,
                                             const BCoefficients& b, std::size_t k, EffectKind kind,
                                             double estimate, int n_boot, std::uint64_t seed);
[[nodiscard]] BootstrapResult bootstrap_test(const FittedModel& model, const PsiWeights& psi,
                                             const BCoefficients& b, std::size_t k, EffectKind kind,
                                             double estimate, int n_boot, std::uint64_t seed);

/// Observed values before t_n followed by the forecast from t_n on. Returns
/// v_observed unchanged when t_n is past its end.
/// Throws Error(DateMisalignment) unless the forecast starts at t_n.
[[nodiscard]] TimeSeries counterfactual_covariate(const TimeSeries& v_observed,
                                                  const ForecastResult& v_counterfactual, Date t_n);

/// Columns (1-L)v_{t-i} for i = 1..lags named "<name>_d_lag<i>", NaN where
/// undefined, over v's dates.
[[nodiscard]] CovariateMatrix lagged_differences(const TimeSeries& v, const std::string& name,
                                                 int lags = 3);

[[nodiscard]] double multiplicative(double effect_log);

/// Deterministic stream seed from a base seed and up to two indices.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

struct ResidualDiagnostics {
    double mean = 0.0;
    double variance = 0.0;
    LjungBox ljung_box;
    std::vector<double> acf;   // lags 1..10
};

[[nodiscard]] ResidualDiagnostics residual_diagnostics(const FittedModel& model);

struct CounterfactualPath {
    std::vector<Date> dates;
    std::vector<double> observed;
    std::vector<double> forecast;
    std::vector<double> lower95;
    std::vector<double> upper95;
    std::vector<double> effect;
    std::vector<double> effect_lower95;
    std::vector<double> effect_upper95;
};

struct InterventionResult {
    Intervention intervention;
    bool ok = false;
    std::string error;
    std::optional<FittedModel> model;
    std::vector<CandidateRecord> candidates;
    std::vector<EffectEstimate> estimates;
    CounterfactualPath path;
    std::optional<ResidualDiagnostics> diagnostics;
};

struct CausalReport {
    std::optional<FittedModel> full_model;   // set when the schedule is empty
    std::vector<CandidateRecord> full_candidates;
    std::vector<InterventionResult> interventions;
};

struct AnalysisOptions {
    std::vector<ModelSpec> candidates;       // one spec fits directly, more go through select_order
    BCoefficients b;
    int n_boot = 10'000;                     // 0 skips the bootstrap
    std::uint64_t seed = 20171218;
    std::size_t min_pre_observations = 30;
    bool bootstrap_bands = false;
    FitOptions fit;
};

/// Fits on y up to t_n - 1, forecasts the largest horizon and evaluates the
/// estimands. Pulses yield only the contemporaneous estimate. Failures are
/// caught and reported in the result. `index` feeds the seed derivation.
[[nodiscard]] InterventionResult analyze_intervention(const TimeSeries& y, const CovariateMatrix& X,
                                                      const Intervention& intervention,
                                                      std::span<const int> horizons,
                                                      const AnalysisOptions& options,
                                                      std::size_t index);

/// Runs analyze_intervention for each scheduled intervention in order. With
/// an empty schedule only the full-sample model is fitted.
/// Throws Error(InvalidSchedule) for schedule violations.
[[nodiscard]] CausalReport analyze(const TimeSeries& y, const CovariateMatrix& X,
                                   const InterventionSchedule& schedule,
                                   std::span<const std::vector<int>> horizons,
                                   const AnalysisOptions& options);

}  // namespace carima
