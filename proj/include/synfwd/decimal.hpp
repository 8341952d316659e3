#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace synfwd {

/// Exact decimal number stored as a scaled integer: value = mantissa / 10^scale.
///
/// Values are always normalized (no trailing zeros in the mantissa, zero has
/// scale 0) so that structural equality is value equality. Market prices are
/// ingested as Decimal and only converted to double inside numerical code.
class Decimal {
public:
    static constexpr int kMaxScale = 18;

    constexpr Decimal() = default;

    /// mantissa / 10^scale; throws std::out_of_range if scale is outside [0, kMaxScale].
    static constexpr Decimal from_units(std::int64_t mantissa, int scale) {
        if (scale < 0 || scale > kMaxScale) {
            throw std::out_of_range("Decimal scale out of range");
        }
        Decimal d;
        d.mantissa_ = mantissa;
        d.scale_ = scale;
        d.normalize();
        return d;
    }

    static constexpr Decimal from_int(std::int64_t v) { return from_units(v, 0); }

    /// Parses "[-|+]digits[.digits]". No exponent notation, at most
    /// kMaxScale fractional digits and 18 significant digits.
    static std::optional<Decimal> parse(std::string_view text) {
        if (text.empty()) return std::nullopt;
        bool negative = false;
        if (text.front() == '-' || text.front() == '+') {
            negative = text.front() == '-';
            text.remove_prefix(1);
        }
        if (text.empty()) return std::nullopt;

        __int128 mantissa = 0;
        int scale = 0;
        int digits = 0;
        bool seen_point = false;
        bool seen_digit = false;
        for (char c : text) {
            if (c == '.') {
                if (seen_point) return std::nullopt;
                seen_point = true;
                continue;
            }
            if (c < '0' || c > '9') return std::nullopt;
            seen_digit = true;
            mantissa = mantissa * 10 + (c - '0');
            if (mantissa != 0) ++digits;
            if (seen_point) ++scale;
            if (digits > 18 || scale > kMaxScale) return std::nullopt;
        }
        if (!seen_digit) return std::nullopt;
        if (negative) mantissa = -mantissa;
        return from_units(static_cast<std::int64_t>(mantissa), scale);
    }

    [[nodiscard]] constexpr std::int64_t mantissa() const { return mantissa_; }
    [[nodiscard]] constexpr int scale() const { return scale_; }
    [[nodiscard]] constexpr bool is_zero() const { return mantissa_ == 0; }
    [[nodiscard]] constexpr bool is_negative() const { return mantissa_ < 0; }

    /// Correctly rounded conversion to the nearest double.
    [[nodiscard]] double to_double() const {
        constexpr std::int64_t kExactLimit = std::int64_t{1} << 53;
        if (mantissa_ > -kExactLimit && mantissa_ < kExactLimit) {
            return static_cast<double>(mantissa_) / kPow10Double[static_cast<std::size_t>(scale_)];
        }
        const std::string s = to_string();
        double out = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), out);
        return out;
    }

    /// Canonical text: minimal digits, no exponent, e.g. "3000", "-0.25".
    [[nodiscard]] std::string to_string() const {
        const bool negative = mantissa_ < 0;
        unsigned __int128 mag = negative ? static_cast<unsigned __int128>(-static_cast<__int128>(mantissa_))
                                         : static_cast<unsigned __int128>(mantissa_);
        std::string digits;
        do {
            digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(mag % 10)));
            mag /= 10;
        } while (mag != 0);
        if (scale_ > 0) {
            if (static_cast<int>(digits.size()) <= scale_) {
                digits.insert(0, static_cast<std::size_t>(scale_ - static_cast<int>(digits.size()) + 1), '0');
            }
            digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
        }
        if (negative) digits.insert(digits.begin(), '-');
        return digits;
    }

    friend constexpr bool operator==(const Decimal&, const Decimal&) = default;

    friend constexpr std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
        return compare_scaled(a.mantissa_, a.scale_, b.mantissa_, b.scale_);
    }

    friend constexpr Decimal operator+(const Decimal& a, const Decimal& b) {
        const int s = a.scale_ > b.scale_ ? a.scale_ : b.scale_;
        const __int128 sum = static_cast<__int128>(a.mantissa_) * kPow10[static_cast<std::size_t>(s - a.scale_)] +
                             static_cast<__int128>(b.mantissa_) * kPow10[static_cast<std::size_t>(s - b.scale_)];
        return from_wide(sum, s);
    }

    friend constexpr Decimal operator-(const Decimal& a) { return from_units(-a.mantissa_, a.scale_); }
    friend constexpr Decimal operator-(const Decimal& a, const Decimal& b) { return a + (-b); }

    /// Exact a / 2.
    [[nodiscard]] constexpr Decimal half() const {
        if (mantissa_ % 2 == 0) return from_units(mantissa_ / 2, scale_);
        return from_wide(static_cast<__int128>(mantissa_) * 5, scale_ + 1);
    }

    /// Exact three-way comparison of x*y against z, without forming the product as a Decimal.
    friend constexpr std::strong_ordering compare_product(const Decimal& x, const Decimal& y, const Decimal& z) {
        const __int128 product = static_cast<__int128>(x.mantissa_) * y.mantissa_;
        return compare_scaled(product, x.scale_ + y.scale_, z.mantissa_, z.scale_);
    }

private:
    static constexpr std::array<__int128, 39> kPow10 = [] {
        std::array<__int128, 39> p{};
        p[0] = 1;
        for (std::size_t i = 1; i < p.size(); ++i) p[i] = p[i - 1] * 10;
        return p;
    }();

    static constexpr std::array<double, kMaxScale + 1> kPow10Double = {
        1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9,
        1e10, 1e11, 1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18};

    // a / 10^sa versus b / 10^sb, exactly. Requires |sa - sb| <= 38.
    static constexpr std::strong_ordering compare_scaled(__int128 a, int sa, __int128 b, int sb) {
        if (sa == sb) return a <=> b;
        if (sa < sb) {
            const auto r = compare_scaled(b, sb, a, sa);
            return r == std::strong_ordering::less      ? std::strong_ordering::greater
                   : r == std::strong_ordering::greater ? std::strong_ordering::less
                                                        : r;
        }
        // a / D versus b, with D = 10^(sa - sb); truncating division keeps sign(rem) == sign(a).
        const __int128 d = kPow10[static_cast<std::size_t>(sa - sb)];
        const __int128 q = a / d;
        const __int128 rem = a % d;
        if (q != b) return q <=> b;
        return rem <=> 0;
    }

    static constexpr Decimal from_wide(__int128 m, int scale) {
        while (scale > 0 && m % 10 == 0) {
            m /= 10;
            --scale;
        }
        if (scale > kMaxScale || m > INT64_MAX || m < -INT64_MAX) {
            throw std::overflow_error("Decimal arithmetic overflow");
        }
        return from_units(static_cast<std::int64_t>(m), scale);
    }

    constexpr void normalize() {
        if (mantissa_ == 0) {
            scale_ = 0;
            return;
        }
        while (scale_ > 0 && mantissa_ % 10 == 0) {
            mantissa_ /= 10;
            --scale_;
        }
    }

    std::int64_t mantissa_ = 0;
    int scale_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Decimal& d) { return os << d.to_string(); }

} // namespace synfwd
