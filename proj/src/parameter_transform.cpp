#include "carima/parameter_transform.hpp"

#include <algorithm>
#include <cmath>

namespace carima::transform {

namespace {
constexpr double kMaxPartial = 1.0 - 1e-8;
}

std::vector<double> partials_to_ar(std::span<const double> partials) {
    const std::size_t p = partials.size();
    std::vector<double> a(p, 0.0);
    std::vector<double> prev(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        a[k] = partials[k];
        for (std::size_t j = 0; j < k; ++j) {
            a[j] = prev[j] - partials[k] * prev[k - 1 - j];
        }
        std::copy(a.begin(), a.end(), prev.begin());
    }
    return a;
}

std::vector<double> ar_to_partials(std::span<const double> ar) {
    const std::size_t p = ar.size();
    std::vector<double> a(ar.begin(), ar.end());
    std::vector<double> partials(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        const double r = a[k];
        partials[k] = r;
        const double denom = 1.0 - r * r;
        std::vector<double> lower(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            lower[j] = (a[j] + r * a[k - 1 - j]) / denom;
        }
        std::copy(lower.begin(), lower.end(), a.begin());
    }
    return partials;
}

std::vector<double> unconstrained_to_ar(std::span<const double> u) {
    std::vector<double> partials(u.size());
    std::transform(u.begin(), u.end(), partials.begin(), [](double x) { return std::tanh(x); });
    return partials_to_ar(partials);
}

std::vector<double> ar_to_unconstrained(std::span<const double> ar) {
    std::vector<double> u = ar_to_partials(ar);
    for (double& x : u) {
        x = std::atanh(std::clamp(x, -kMaxPartial, kMaxPartial));
    }
    return u;
}

std::vector<double> unconstrained_to_ma(std::span<const double> u) {
    std::vector<double> theta = unconstrained_to_ar(u);
    for (double& x : theta) x = -x;
    return theta;
}

std::vector<double> ma_to_unconstrained(std::span<const double> ma) {
    std::vector<double> neg(ma.begin(), ma.end());
    for (double& x : neg) x = -x;
    return ar_to_unconstrained(neg);
}

}  // namespace carima::transform
