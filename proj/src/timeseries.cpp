#include "carima/timeseries.hpp"

#include "carima/error.hpp"
#include "carima/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace carima {

TimeSeries::TimeSeries(Date start, std::vector<double> values, std::string name)
    : start_(start), values_(std::move(values)), name_(std::move(name)) {
    if (values_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "time series '" + name_ + "' is empty");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::InvalidArgument, "time series '" + name_ +
                                                        "' has a non-finite value at " +
                                                        date_at(i).to_string());
        }
    }
}

std::optional<std::size_t> TimeSeries::index_of(Date date) const noexcept {
    const long offset = date - start_;
    if (offset < 0 || static_cast<std::size_t>(offset) >= values_.size()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(offset);
}

TimeSeries TimeSeries::slice(std::size_t offset, std::size_t count) const {
    if (offset + count > values_.size() || count == 0) {
        throw Error(ErrorCode::DateOutOfRange, "slice outside of series '" + name_ + "'");
    }
    return TimeSeries(date_at(offset),
                      std::vector<double>(values_.begin() + static_cast<long>(offset),
                                          values_.begin() + static_cast<long>(offset + count)),
                      name_);
}

TimeSeries TimeSeries::between(Date from, Date to) const {
    const auto a = index_of(from);
    const auto b = index_of(to);
    if (!a || !b || *b < *a) {
        throw Error(ErrorCode::DateOutOfRange, "series '" + name_ + "' does not cover " +
                                                   from.to_string() + " .. " + to.to_string());
    }
    return slice(*a, *b - *a + 1);
}

TimeSeries TimeSeries::renamed(std::string name) const {
    TimeSeries out = *this;
    out.name_ = std::move(name);
    return out;
}

void OhlcBar::validate() const {
    const bool positive = open > 0.0 && high > 0.0 && low > 0.0 && close > 0.0;
    const bool finite = std::isfinite(open) && std::isfinite(high) && std::isfinite(low) &&
                        std::isfinite(close);
    if (!positive || !finite || low > std::min(open, close) || high < std::max(open, close)) {
        std::ostringstream msg;
        msg << "invalid OHLC bar at " << date.to_string() << ": open=" << open
            << " high=" << high << " low=" << low << " close=" << close;
        throw Error(ErrorCode::InvalidBar, msg.str());
    }
}

void DifferenceOrders::validate() const {
    if (d < 0 || D < 0) {
        throw Error(ErrorCode::InvalidArgument, "differencing orders must be nonnegative");
    }
    if (s < 1 || (D > 0 && s < 2)) {
        throw Error(ErrorCode::InvalidArgument,
                    "seasonal period must be >= 2 when seasonal differencing is used");
    }
}

double garman_klass(const OhlcBar& bar) {
    bar.validate();
    constexpr double kUnbiasFactor = 1.034;
    const double range = std::log(bar.high) - std::log(bar.low);
    const double body = std::log(bar.close) - std::log(bar.open);
    const double variance = 0.5 * range * range - (2.0 * std::numbers::ln2 - 1.0) * body * body;
    if (variance < 0.0) {
        throw Error(ErrorCode::NegativeVariance,
                    "Garman-Klass variance is negative on " + bar.date.to_string());
    }
    return std::sqrt(variance) * kUnbiasFactor;
}

TimeSeries garman_klass_series(std::span<const OhlcBar> bars, std::string name) {
    if (bars.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no OHLC bars");
    }
    std::vector<double> out;
    out.reserve(bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i) {
        if (bars[i].date - bars.front().date != static_cast<long>(i)) {
            throw Error(ErrorCode::GapInCalendar,
                        "OHLC bars are not on consecutive days at " + bars[i].date.to_string());
        }
        out.push_back(garman_klass(bars[i]));
    }
    return TimeSeries(bars.front().date, std::move(out), std::move(name));
}

TimeSeries log_transform(const TimeSeries& ts) {
    std::vector<double> out;
    out.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(ts[i] > 0.0)) {
            throw Error(ErrorCode::NonPositiveValue,
                        "cannot take log of " + std::to_string(ts[i]) + " in '" + ts.name() +
                            "' at " + ts.date_at(i).to_string());
        }
        out.push_back(std::log(ts[i]));
    }
    return TimeSeries(ts.start_date(), std::move(out), ts.name() + "_log");
}

std::vector<double> difference(std::span<const double> values, const DifferenceOrders& ord) {
    ord.validate();
    const auto lost = static_cast<std::size_t>(ord.lost());
    if (values.size() <= lost) {
        throw Error(ErrorCode::SeriesTooShort,
                    "series of length " + std::to_string(values.size()) +
                        " is too short for differencing that drops " + std::to_string(lost));
    }
    std::vector<double> out(values.begin(), values.end());
    const auto apply = [&out](std::size_t lag) {
        for (std::size_t i = out.size(); i-- > lag;) {
            out[i] -= out[i - lag];
        }
        out.erase(out.begin(), out.begin() + static_cast<long>(lag));
    };
    for (int i = 0; i < ord.D; ++i) apply(static_cast<std::size_t>(ord.s));
    for (int i = 0; i < ord.d; ++i) apply(1);
    return out;
}

TimeSeries difference(const TimeSeries& ts, const DifferenceOrders& ord) {
    auto out = difference(ts.values(), ord);
    return TimeSeries(ts.date_at(static_cast<std::size_t>(ord.lost())), std::move(out), ts.name());
}

std::vector<double> integrate(std::span<const double> differenced, std::span<const double> history,
                              const DifferenceOrders& ord) {
    ord.validate();
    const auto lost = static_cast<std::size_t>(ord.lost());
    if (history.size() != lost) {
        throw Error(ErrorCode::InvalidArgument,
                    "integration needs exactly " + std::to_string(lost) + " initial levels");
    }
    const poly::Coeffs delta = poly::differencing_polynomial(ord.d, ord.D, ord.s);
    // levels = [history..., integrated...]; delta(L) level_t = differenced_t.
    std::vector<double> levels(history.begin(), history.end());
    levels.reserve(lost + differenced.size());
    for (double x : differenced) {
        const std::size_t t = levels.size();
        double acc = x;
        for (std::size_t i = 1; i < delta.size(); ++i) {
            acc -= delta[i] * levels[t - i];
        }
        levels.push_back(acc);
    }
    return {levels.begin() + static_cast<long>(lost), levels.end()};
}

std::vector<double> integrate_effect(std::span<const double> effect, const DifferenceOrders& ord) {
    const std::vector<double> zeros(static_cast<std::size_t>(ord.lost()), 0.0);
    return integrate(effect, zeros, ord);
}

TimeSeries integrate_effect(const TimeSeries& effect, const DifferenceOrders& ord,
                            bool zero_initial) {
    if (!zero_initial) {
        throw Error(ErrorCode::InvalidArgument,
                    "integration constants are only identified under zero initial effects");
    }
    return TimeSeries(effect.start_date(), integrate_effect(effect.values(), ord), effect.name());
}

}  // namespace carima
