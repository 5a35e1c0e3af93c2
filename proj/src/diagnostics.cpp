#include "carima/diagnostics.hpp"

#include "carima/error.hpp"
#include "carima/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace carima {

std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (max_lag >= n) {
        throw Error(ErrorCode::SeriesTooShort, "acf: max_lag " + std::to_string(max_lag) +
                                                   " needs more than " + std::to_string(n) +
                                                   " observations");
    }
    const double m = stats::mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);

    std::vector<double> out(max_lag + 1, 0.0);
    out[0] = 1.0;
    if (c0 == 0.0) {
        return out;
    }
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            ck += (x[t] - m) * (x[t - k] - m);
        }
        out[k] = ck / c0;
    }
    return out;
}

std::vector<double> pacf(std::span<const double> x, std::size_t max_lag) {
    const std::vector<double> r = acf(x, max_lag);
    std::vector<double> out(max_lag + 1, 0.0);
    out[0] = 1.0;
    std::vector<double> phi(max_lag + 1, 0.0);
    std::vector<double> prev(max_lag + 1, 0.0);
    double v = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = r[k];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * r[k - j];
        const double kappa = v > 0.0 ? num / v : 0.0;
        phi[k] = kappa;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - kappa * prev[k - j];
        v *= (1.0 - kappa * kappa);
        out[k] = kappa;
        prev = phi;
    }
    return out;
}

LjungBox ljung_box(std::span<const double> residuals, std::size_t lags, std::size_t fitted_params) {
    if (lags <= fitted_params) {
        throw Error(ErrorCode::DegreesOfFreedomNonPositive,
                    "Ljung-Box needs more lags (" + std::to_string(lags) +
                        ") than fitted parameters (" + std::to_string(fitted_params) + ")");
    }
    const std::vector<double> r = acf(residuals, lags);
    const auto n = static_cast<double>(residuals.size());
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        q += r[k] * r[k] / (n - static_cast<double>(k));
    }
    q *= n * (n + 2.0);
    LjungBox out;
    out.statistic = q;
    out.lags = lags;
    out.dof = lags - fitted_params;
    out.p_value = stats::chi_square_sf(q, static_cast<double>(out.dof));
    return out;
}

std::vector<QqPoint> qq_points(std::span<const double> residuals, bool standardize) {
    std::vector<double> sorted(residuals.begin(), residuals.end());
    if (standardize && !sorted.empty()) {
        const double m = stats::mean(sorted);
        const double sd = std::sqrt(stats::variance(sorted));
        for (double& v : sorted) v = sd > 0.0 ? (v - m) / sd : 0.0;
    }
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    std::vector<QqPoint> out;
    out.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double pos = (static_cast<double>(i) + 0.5) / n;
        out.push_back({stats::normal_quantile(pos), sorted[i]});
    }
    return out;
}

}  // namespace carima
