#include "carima/polynomial.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace carima::poly {

Coeffs multiply(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        return {};
    }
    Coeffs out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

Coeffs ar_polynomial(std::span<const double> ar, std::size_t stride) {
    Coeffs out(ar.size() * stride + 1, 0.0);
    out[0] = 1.0;
    for (std::size_t i = 0; i < ar.size(); ++i) {
        out[(i + 1) * stride] = -ar[i];
    }
    return out;
}

Coeffs ma_polynomial(std::span<const double> ma, std::size_t stride) {
    Coeffs out(ma.size() * stride + 1, 0.0);
    out[0] = 1.0;
    for (std::size_t i = 0; i < ma.size(); ++i) {
        out[(i + 1) * stride] = ma[i];
    }
    return out;
}

Coeffs differencing_polynomial(int d, int seasonal_d, int period) {
    Coeffs out{1.0};
    const Coeffs regular{1.0, -1.0};
    for (int i = 0; i < d; ++i) {
        out = multiply(out, regular);
    }
    if (seasonal_d > 0) {
        Coeffs seasonal(static_cast<std::size_t>(period) + 1, 0.0);
        seasonal.front() = 1.0;
        seasonal.back() = -1.0;
        for (int i = 0; i < seasonal_d; ++i) {
            out = multiply(out, seasonal);
        }
    }
    return out;
}

Coeffs divide_series(std::span<const double> numerator, std::span<const double> denominator,
                     std::size_t terms) {
    if (denominator.empty() || denominator[0] == 0.0) {
        throw std::invalid_argument("divide_series: leading denominator coefficient is zero");
    }
    Coeffs out(terms, 0.0);
    for (std::size_t k = 0; k < terms; ++k) {
        double acc = k < numerator.size() ? numerator[k] : 0.0;
        const std::size_t upper = std::min(k, denominator.size() - 1);
        for (std::size_t i = 1; i <= upper; ++i) {
            acc -= denominator[i] * out[k - i];
        }
        out[k] = acc / denominator[0];
    }
    return out;
}

bool roots_outside_unit_circle(std::span<const double> coeffs, double margin) {
    std::size_t degree = coeffs.size();
    while (degree > 1 && coeffs[degree - 1] == 0.0) {
        --degree;
    }
    if (degree <= 1) {
        return true;
    }
    const auto n = static_cast<Eigen::Index>(degree - 1);
    // Reciprocal roots are the eigenvalues of the companion matrix of
    // z^n + (c_1/c_0) z^{n-1} + ... + c_n/c_0.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        companion(0, j) = -coeffs[static_cast<std::size_t>(j) + 1] / coeffs[0];
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        companion(i, i - 1) = 1.0;
    }
    const Eigen::VectorXcd eig = companion.eigenvalues();
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        if (std::abs(eig[i]) >= 1.0 - margin) {
            return false;
        }
    }
    return true;
}

}  // namespace carima::poly
