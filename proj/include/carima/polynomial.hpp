#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace carima::poly {

// Lag polynomials are stored as coefficient vectors indexed by power of L,
// so {1, -0.5} is 1 - 0.5L.

using Coeffs = std::vector<double>;

[[nodiscard]] Coeffs multiply(std::span<const double> a, std::span<const double> b);

/// 1 - a_1 L - ... - a_p L^p, spread out to lag `stride` (stride = s gives the
/// seasonal polynomial in L^s).
[[nodiscard]] Coeffs ar_polynomial(std::span<const double> ar, std::size_t stride = 1);

/// 1 + m_1 L + ... + m_q L^q, spread out to lag `stride`.
[[nodiscard]] Coeffs ma_polynomial(std::span<const double> ma, std::size_t stride = 1);

/// (1 - L)^d (1 - L^s)^D.
[[nodiscard]] Coeffs differencing_polynomial(int d, int seasonal_d, int period);

/// First `terms` coefficients of the power series numerator / denominator.
/// Requires denominator[0] != 0.
[[nodiscard]] Coeffs divide_series(std::span<const double> numerator,
                                   std::span<const double> denominator, std::size_t terms);

/// True when every root of the polynomial lies strictly outside the unit circle
/// (all companion-matrix eigenvalues strictly inside, with `margin` to spare).
[[nodiscard]] bool roots_outside_unit_circle(std::span<const double> coeffs, double margin = 0.0);

}  // namespace carima::poly
