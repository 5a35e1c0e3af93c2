#pragma once

#include "carima/covariates.hpp"
#include "carima/timeseries.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace carima {

/// Seasonal ARIMA(p,d,q)(P,D,Q)_s with a regression mean: after differencing
/// both sides, w_t = c + x~_t' beta + u_t where u_t is SARMA with
/// phi(L) Phi(L^s) u_t = theta(L) Theta(L^s) e_t. AR polynomials are written
/// 1 - phi_1 L - ..., MA polynomials 1 + theta_1 L + ....
struct ModelSpec {
    int p = 0;
    int q = 0;
    int P = 0;
    int Q = 0;
    DifferenceOrders ord;
    bool include_constant = true;
    std::vector<std::string> regressors;

    [[nodiscard]] int arma_count() const noexcept { return p + q + P + Q; }
    /// Mean-equation plus ARMA coefficients (excludes sigma^2).
    [[nodiscard]] int coefficient_count() const noexcept {
        return arma_count() + static_cast<int>(regressors.size()) + (include_constant ? 1 : 0);
    }
    /// (p, d, q, P, D, Q), used for deterministic tie-breaking.
    [[nodiscard]] std::array<int, 6> order_vector() const noexcept {
        return {p, ord.d, q, P, ord.D, Q};
    }
    /// e.g. "ARIMA(1,1,1)(0,0,2)[7]"; the seasonal block is dropped when empty.
    [[nodiscard]] std::string label() const;

    /// Throws Error(InvalidArgument) on negative orders or s < 2 with seasonal terms.
    void validate() const;
    /// Throws Error(EstimabilityViolation) unless
    /// p + q + P + Q + #regressors < (n - d - D*s) / 3.
    void check_estimable(std::size_t n) const;

    bool operator==(const ModelSpec&) const = default;
};

struct Coefficients {
    std::vector<double> phi;
    std::vector<double> theta;
    std::vector<double> Phi;
    std::vector<double> Theta;
    double constant = 0.0;
    std::vector<double> beta;
    double sigma2 = 1.0;
};

/// Expanded AR and MA coefficients of phi(L)Phi(L^s) and theta(L)Theta(L^s),
/// sign convention as in ModelSpec (ar[i] multiplies u_{t-i-1}).
struct ExpandedArma {
    std::vector<double> ar;
    std::vector<double> ma;
};
[[nodiscard]] ExpandedArma expand_arma(const ModelSpec& spec, const Coefficients& coef);

/// Weights psi_0..psi_{k-1}; psi_0 == 1.
struct PsiWeights {
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
    [[nodiscard]] double operator[](std::size_t j) const { return weights[j]; }
};

struct FittedModel {
    ModelSpec spec;
    Coefficients coef;
    TimeSeries residuals;         // standardized one-step innovations on the differenced scale
    double loglik = 0.0;
    double bic = 0.0;
    Eigen::MatrixXd param_cov;    // over parameter_names(); empty when not estimated
    std::size_t n_obs = 0;        // length of the undifferenced input
    bool converged = true;
    int evaluations = 0;

    // Forecast origin.
    Date last_date;
    std::vector<double> last_levels;      // final d + D*s outcome values, oldest first
    Eigen::MatrixXd last_regressor_rows;  // final d + D*s rows of the raw regressors
    Eigen::VectorXd next_state;           // predicted ARMA state for last_date + 1

    /// Names in param_cov order: phi1.., theta1.., Phi1.., Theta1.., const, regressors...
    [[nodiscard]] std::vector<std::string> parameter_names() const;
    /// Values in parameter_names() order.
    [[nodiscard]] std::vector<double> parameter_values() const;
    /// sqrt(diag(param_cov)); NaN when the covariance was not estimated.
    [[nodiscard]] std::vector<double> std_errors() const;
    [[nodiscard]] std::size_t n_effective() const noexcept { return residuals.size(); }
};

struct FitOptions {
    int restarts = 3;
    std::uint64_t seed = 20171218;
    int max_evaluations = 4000;
    bool compute_covariance = true;
};

/// Exact Gaussian ML through the state-space form with the stationary initial
/// state covariance. sigma^2 is concentrated out, and the constant and
/// regression coefficients are profiled out by GLS on the filtered data.
/// `X` must cover every date of `y` for each name in spec.regressors.
/// Throws Error(EstimabilityViolation | NonConvergence | SingularInformation).
[[nodiscard]] FittedModel fit(const ModelSpec& spec, const TimeSeries& y,
                              const CovariateMatrix& X = {}, const FitOptions& options = {});

/// Builds a FittedModel from known coefficients (no estimation) by filtering
/// y; param_cov is left empty.
[[nodiscard]] FittedModel condition(const ModelSpec& spec, const Coefficients& coef,
                                    const TimeSeries& y, const CovariateMatrix& X = {});

/// Exact Gaussian log-likelihood of the differenced data at the given
/// coefficients (sigma^2 taken from coef). Throws Error(NonStationaryParams)
/// for a non-stationary AR part or a non-invertible MA part.
[[nodiscard]] double loglikelihood(const ModelSpec& spec, const Coefficients& coef,
                                   const TimeSeries& y, const CovariateMatrix& X = {});

/// Power-series coefficients of theta(L)Theta(L^s) / (phi(L)Phi(L^s)); the
/// differencing operators are not included.
[[nodiscard]] PsiWeights psi_weights(const ModelSpec& spec, const Coefficients& coef, std::size_t k);
[[nodiscard]] PsiWeights psi_weights(const FittedModel& model, std::size_t k);

/// psi weights of the undifferenced outcome: the stationary weights passed
/// through integrate_effect. Equal to psi_weights when d = D = 0.
[[nodiscard]] PsiWeights level_psi_weights(const FittedModel& model, std::size_t k);

struct ForecastResult {
    TimeSeries point;                  // undifferenced scale
    std::vector<double> step_variance; // sigma^2 * sum_{j<=h} psi_j^2 with level psi weights
    std::size_t horizon = 0;
};

/// k-step forecasts from the end of the estimation sample. `X_future` must
/// supply each regressor for every horizon date (and, with differencing, the
/// raw values are combined with the stored history). `prior_effects`, when
/// non-empty, has length k and is added to the point forecast.
/// Throws Error(MissingCovariate) naming the regressor and date.
[[nodiscard]] ForecastResult forecast(const FittedModel& model, std::size_t k,
                                      const CovariateMatrix& X_future = {},
                                      std::span<const double> prior_effects = {});

struct CandidateRecord {
    ModelSpec spec;
    bool ok = false;
    double bic = 0.0;
    std::string message;
};

struct OrderSelection {
    FittedModel best;
    std::vector<CandidateRecord> candidates;
};

/// Fits each spec and keeps the smallest BIC; ties go to fewer coefficients,
/// then the lexicographically smaller order vector. Failed fits are recorded
/// and skipped. Throws Error(AllSpecsFailed) if none succeeds.
[[nodiscard]] OrderSelection select_order(const TimeSeries& y, const CovariateMatrix& X,
                                          std::span<const ModelSpec> grid,
                                          const FitOptions& options = {});

/// Every combination of p <= p_max, q <= q_max, P <= P_max, Q <= Q_max on top
/// of `base` (whose differencing, constant and regressors are kept).
[[nodiscard]] std::vector<ModelSpec> order_grid(const ModelSpec& base, int p_max, int q_max,
                                                int P_max = 0, int Q_max = 0);

}  // namespace carima
