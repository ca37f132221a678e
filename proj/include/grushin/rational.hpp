#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace grushin {

/**
 * Exact rational arithmetic on 64-bit numerator/denominator.
 *
 * Used for regime-boundary comparisons: thresholds such as the critical
 * exponents are rational expressions of (gamma, p1, p2, Q), so when the
 * inputs are given as rationals the comparisons can be decided exactly
 * instead of through a floating tolerance.
 *
 * All operations throw std::overflow_error when a result does not fit in
 * 64 bits after reduction; callers fall back to floating point in that case.
 */
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);  // normalizes sign, reduces; d == 0 throws

    // Accepts "7/3", "-2", "2.5", "0.125" (decimal text is converted exactly).
    static std::optional<Rational> parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const;

    Rational operator+(const Rational&) const;
    Rational operator-(const Rational&) const;
    Rational operator*(const Rational&) const;
    Rational operator/(const Rational&) const;  // division by zero throws
    Rational operator-() const;

    bool operator==(const Rational&) const;
    bool operator<(const Rational&) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    static Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

private:
    std::int64_t num_;
    std::int64_t den_;  // always > 0
};

}  // namespace grushin
