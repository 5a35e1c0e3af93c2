#pragma once

#include "carima/date.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace carima {

/// A contiguous daily series. Immutable once built; every value is finite.
class TimeSeries {
public:
    /// Throws Error(InvalidArgument) if `values` is empty or holds NaN/Inf.
    TimeSeries(Date start, std::vector<double> values, std::string name = {});

    [[nodiscard]] Date start_date() const noexcept { return start_; }
    [[nodiscard]] Date end_date() const noexcept { return start_ + static_cast<long>(size()) - 1; }
    [[nodiscard]] Date date_at(std::size_t i) const noexcept { return start_ + static_cast<long>(i); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    /// Position of `date`, or nullopt when outside [start, end].
    [[nodiscard]] std::optional<std::size_t> index_of(Date date) const noexcept;
    [[nodiscard]] bool contains(Date date) const noexcept { return index_of(date).has_value(); }

    /// `count` values starting at position `offset`.
    [[nodiscard]] TimeSeries slice(std::size_t offset, std::size_t count) const;
    /// Values in [from, to], both inclusive; throws DateOutOfRange if not covered.
    [[nodiscard]] TimeSeries between(Date from, Date to) const;
    [[nodiscard]] TimeSeries renamed(std::string name) const;

    bool operator==(const TimeSeries&) const = default;

private:
    Date start_;
    std::vector<double> values_;
    std::string name_;
};

struct OhlcBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;

    /// Throws Error(InvalidBar) unless prices are positive and
    /// low <= min(open, close) <= max(open, close) <= high.
    void validate() const;
};

/// Regular order d, seasonal order D with period s: (1 - L^s)^D (1 - L)^d.
struct DifferenceOrders {
    int d = 0;
    int D = 0;
    int s = 1;

    [[nodiscard]] int lost() const noexcept { return d + D * s; }
    [[nodiscard]] bool none() const noexcept { return d == 0 && D == 0; }
    void validate() const;

    bool operator==(const DifferenceOrders&) const = default;
};

/// Bias-corrected Garman-Klass daily volatility (not log-transformed).
/// Throws Error(NegativeVariance) when the variance estimate is negative.
[[nodiscard]] double garman_klass(const OhlcBar& bar);

/// Garman-Klass value per bar as a series; bars must be on consecutive days.
[[nodiscard]] TimeSeries garman_klass_series(std::span<const OhlcBar> bars, std::string name = "gk");

/// Elementwise natural log. Throws Error(NonPositiveValue) naming the date.
[[nodiscard]] TimeSeries log_transform(const TimeSeries& ts);

/// Seasonal differencing first, then regular. Output is shorter by d + D*s and
/// starts d + D*s days later. Throws Error(SeriesTooShort).
[[nodiscard]] TimeSeries difference(const TimeSeries& ts, const DifferenceOrders& ord);
[[nodiscard]] std::vector<double> difference(std::span<const double> values,
                                             const DifferenceOrders& ord);

/// Inverts `difference` taking all pre-sample levels as zero, i.e. the
/// effect on the undifferenced scale when nothing happened before the first
/// point. Only zero initial conditions are supported; `zero_initial = false`
/// is rejected with Error(InvalidArgument).
[[nodiscard]] TimeSeries integrate_effect(const TimeSeries& effect, const DifferenceOrders& ord,
                                          bool zero_initial = true);
[[nodiscard]] std::vector<double> integrate_effect(std::span<const double> effect,
                                                   const DifferenceOrders& ord);

/// Inverts `difference` given the d + D*s levels immediately preceding the
/// first differenced value (oldest first).
[[nodiscard]] std::vector<double> integrate(std::span<const double> differenced,
                                            std::span<const double> history,
                                            const DifferenceOrders& ord);

}  // namespace carima
