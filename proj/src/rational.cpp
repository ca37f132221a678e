#include "grushin/rational.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace grushin {

namespace {

using i128 = __int128;

std::int64_t checked_narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
    return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_reduced(i128 n, i128 d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    return Rational(checked_narrow(n), checked_narrow(d));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

double Rational::to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

Rational Rational::operator+(const Rational& o) const {
    return make_reduced(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return make_reduced(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return make_reduced(i128(num_) * o.num_, i128(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::invalid_argument("rational division by zero");
    return make_reduced(i128(num_) * o.den_, i128(den_) * o.num_);
}

Rational Rational::operator-() const { return Rational(-num_, den_); }

bool Rational::operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
}

bool Rational::operator<(const Rational& o) const {
    return i128(num_) * o.den_ < i128(o.num_) * den_;
}

std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::string s(text);
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            size_t pos1 = 0, pos2 = 0;
            std::int64_t n = std::stoll(s.substr(0, slash), &pos1);
            std::int64_t d = std::stoll(s.substr(slash + 1), &pos2);
            if (pos1 != slash || pos2 != s.size() - slash - 1 || d == 0) return std::nullopt;
            return Rational(n, d);
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) {
            size_t pos = 0;
            std::int64_t n = std::stoll(s, &pos);
            if (pos != s.size()) return std::nullopt;
            return Rational(n);
        }
        // Decimal text: digits after the point become an exact power-of-ten
        // denominator.
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac_len = s.size() - dot - 1;
        if (frac_len == 0 || frac_len > 17) return std::nullopt;
        size_t pos = 0;
        std::int64_t n = std::stoll(digits, &pos);
        if (pos != digits.size()) return std::nullopt;
        std::int64_t d = 1;
        for (size_t i = 0; i < frac_len; ++i) {
            if (d > INT64_MAX / 10) return std::nullopt;
            d *= 10;
        }
        return Rational(n, d);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace grushin
