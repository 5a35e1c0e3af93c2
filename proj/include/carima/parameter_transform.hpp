#pragma once

#include <span>
#include <vector>

namespace carima::transform {

// Monahan's reparameterisation: each coordinate of an unconstrained vector is
// squashed with tanh into a partial autocorrelation, and the Durbin-Levinson
// recursion turns those into polynomial coefficients. The image is exactly the
// set of stationary AR polynomials 1 - a_1 L - ... - a_p L^p.

[[nodiscard]] std::vector<double> partials_to_ar(std::span<const double> partials);
/// Step-down recursion; requires a stationary polynomial.
[[nodiscard]] std::vector<double> ar_to_partials(std::span<const double> ar);

[[nodiscard]] std::vector<double> unconstrained_to_ar(std::span<const double> u);
[[nodiscard]] std::vector<double> ar_to_unconstrained(std::span<const double> ar);

/// MA side: theta is returned so that 1 + theta_1 L + ... is invertible.
[[nodiscard]] std::vector<double> unconstrained_to_ma(std::span<const double> u);
[[nodiscard]] std::vector<double> ma_to_unconstrained(std::span<const double> ma);

}  // namespace carima::transform
