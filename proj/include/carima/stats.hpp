#pragma once

#include <span>
#include <vector>

namespace carima::stats {

[[nodiscard]] double normal_cdf(double z);
[[nodiscard]] double normal_quantile(double p);
/// P(|Z| >= |z|) for standard Normal Z.
[[nodiscard]] double two_sided_normal_p(double z);
/// Upper tail P(X >= x) for X ~ chi-square(df).
[[nodiscard]] double chi_square_sf(double x, double df);

[[nodiscard]] double mean(std::span<const double> x);
/// Divides by n (population form).
[[nodiscard]] double variance(std::span<const double> x);

/// Empirical quantile with linear interpolation between order statistics
/// (the "type 7" rule). `sorted` must be ascending.
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace carima::stats
