#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "synfwd/errors.hpp"

namespace synfwd {

/// Proleptic Gregorian calendar date, stored as a day serial (days since 1970-01-01).
class Date {
public:
    constexpr Date() = default;

    static constexpr std::optional<Date> from_ymd(int year, int month, int day) {
        if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;
        return Date(days_from_civil(year, month, day));
    }

    /// Throws InputError on an invalid calendar date.
    static constexpr Date ymd(int year, int month, int day) {
        auto d = from_ymd(year, month, day);
        if (!d) throw InputError("invalid calendar date");
        return *d;
    }

    static constexpr Date from_serial(std::int64_t serial) { return Date(serial); }

    /// Strict YYYY-MM-DD.
    static std::optional<Date> parse_iso(std::string_view s) {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
        auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                if (s[i] < '0' || s[i] > '9') return std::nullopt;
                v = v * 10 + (s[i] - '0');
            }
            return v;
        };
        const auto y = num(0, 4);
        const auto m = num(5, 2);
        const auto d = num(8, 2);
        if (!y || !m || !d) return std::nullopt;
        return from_ymd(*y, *m, *d);
    }

    [[nodiscard]] constexpr std::int64_t serial() const { return serial_; }

    struct Ymd {
        int year;
        int month;
        int day;
    };

    [[nodiscard]] constexpr Ymd ymd() const {
        // Inverse of days_from_civil (H. Hinnant's algorithm).
        const std::int64_t z = serial_ + 719468;
        const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
        const std::int64_t doe = z - era * 146097;
        const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const std::int64_t mp = (5 * doy + 2) / 153;
        const int d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
        const int m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
        const int y = static_cast<int>(yoe + era * 400 + (m <= 2 ? 1 : 0));
        return {y, m, d};
    }

    [[nodiscard]] constexpr int year() const { return ymd().year; }
    [[nodiscard]] constexpr int month() const { return ymd().month; }
    [[nodiscard]] constexpr int day() const { return ymd().day; }

    /// 0 = Monday ... 6 = Sunday.
    [[nodiscard]] constexpr int weekday() const {
        const std::int64_t w = (serial_ + 3) % 7; // 1970-01-01 was a Thursday
        return static_cast<int>(w < 0 ? w + 7 : w);
    }

    [[nodiscard]] constexpr Date add_days(std::int64_t n) const { return Date(serial_ + n); }

    /// Calendar month arithmetic; the day is clamped to the target month's length.
    [[nodiscard]] constexpr Date add_months(int n) const {
        const auto [y, m, d] = ymd();
        const int total = y * 12 + (m - 1) + n;
        const int ny = total >= 0 ? total / 12 : (total - 11) / 12;
        const int nm = total - ny * 12 + 1;
        const int nd = d < days_in_month(ny, nm) ? d : days_in_month(ny, nm);
        return Date(days_from_civil(ny, nm, nd));
    }

    [[nodiscard]] std::string iso() const {
        const auto [y, m, d] = ymd();
        char buf[16];
        const auto two = [](char* p, int v) {
            p[0] = static_cast<char>('0' + v / 10);
            p[1] = static_cast<char>('0' + v % 10);
        };
        buf[0] = static_cast<char>('0' + (y / 1000) % 10);
        buf[1] = static_cast<char>('0' + (y / 100) % 10);
        buf[2] = static_cast<char>('0' + (y / 10) % 10);
        buf[3] = static_cast<char>('0' + y % 10);
        buf[4] = '-';
        two(buf + 5, m);
        buf[7] = '-';
        two(buf + 8, d);
        return std::string(buf, 10);
    }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

    static constexpr bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

    static constexpr int days_in_month(int y, int m) {
        constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
    }

private:
    constexpr explicit Date(std::int64_t serial) : serial_(serial) {}

    static constexpr std::int64_t days_from_civil(int y, int m, int d) {
        y -= m <= 2 ? 1 : 0;
        const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
        const std::int64_t yoe = y - era * 400;
        const std::int64_t doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
        const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + doe - 719468;
    }

    std::int64_t serial_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Date& d) { return os << d.iso(); }

/// Signed number of calendar days from a to b.
constexpr std::int64_t days_between(Date a, Date b) { return b.serial() - a.serial(); }

/// Act/365 year fraction. Throws InputError if end precedes start.
inline double year_fraction(Date start, Date end) {
    const std::int64_t days = days_between(start, end);
    if (days < 0) throw InputError("year_fraction: end date " + end.iso() + " precedes start " + start.iso());
    return static_cast<double>(days) / 365.0;
}

/// Act/360 accrual fraction; may be negative.
constexpr double act360(Date start, Date end) { return static_cast<double>(days_between(start, end)) / 360.0; }

} // namespace synfwd
