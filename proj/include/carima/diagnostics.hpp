#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace carima {

/// Sample autocorrelations at lags 0..max_lag of the demeaned series
/// (biased estimator, normalised by the lag-0 sum of squares). A constant
/// series yields 1 at lag 0 and 0 elsewhere. Throws Error(SeriesTooShort)
/// unless max_lag < size.
[[nodiscard]] std::vector<double> acf(std::span<const double> x, std::size_t max_lag);

/// Partial autocorrelations at lags 0..max_lag via Durbin-Levinson;
/// index 0 holds 1 so that index == lag.
[[nodiscard]] std::vector<double> pacf(std::span<const double> x, std::size_t max_lag);

struct LjungBox {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t lags = 0;
    std::size_t dof = 0;
};

/// Portmanteau test against chi-square(lags - fitted_params).
/// Throws Error(DegreesOfFreedomNonPositive) when lags <= fitted_params.
[[nodiscard]] LjungBox ljung_box(std::span<const double> residuals, std::size_t lags,
                                 std::size_t fitted_params);

struct QqPoint {
    double theoretical = 0.0;
    double sample = 0.0;
};

/// Sorted sample against standard-Normal quantiles at (i - 0.5)/n. With
/// `standardize`, the sample is centred and scaled to unit variance first.
[[nodiscard]] std::vector<QqPoint> qq_points(std::span<const double> residuals,
                                             bool standardize = false);

}  // namespace carima
