#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace carima {

/// Calendar day, stored as days since the Unix epoch.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}

    /// Parses `YYYY-MM-DD`; throws Error(InvalidArgument) on anything else.
    static Date parse(std::string_view iso);
    static bool try_parse(std::string_view iso, Date& out) noexcept;

    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] constexpr std::chrono::sys_days days() const { return days_; }

    [[nodiscard]] constexpr Date operator+(long n) const {
        return Date(days_ + std::chrono::days(n));
    }
    [[nodiscard]] constexpr Date operator-(long n) const {
        return Date(days_ - std::chrono::days(n));
    }
    [[nodiscard]] constexpr long operator-(Date other) const {
        return static_cast<long>((days_ - other.days_).count());
    }

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace carima
