#include "grushin/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace grushin {

NonlinearitySpec NonlinearitySpec::power(double p) {
    NonlinearitySpec s;
    s.kind = Kind::power;
    s.growth_exponent = p;
    s.validate();
    return s;
}

NonlinearitySpec NonlinearitySpec::tabulated(std::vector<double> u, std::vector<double> f,
                                             double growth_exponent) {
    NonlinearitySpec s;
    s.kind = Kind::tabulated;
    s.growth_exponent = growth_exponent;
    s.table_u = std::move(u);
    s.table_f = std::move(f);
    s.validate();
    return s;
}

void NonlinearitySpec::validate() const {
    if (!(growth_exponent >= 1.0))
        throw std::invalid_argument("growth exponent must be >= 1");
    if (kind == Kind::power) return;
    if (table_u.size() < 2 || table_u.size() != table_f.size())
        throw std::invalid_argument("table needs >= 2 matching samples");
    if (table_u.front() != 0.0) throw std::invalid_argument("table must start at u = 0");
    for (std::size_t i = 1; i < table_u.size(); ++i) {
        if (!(table_u[i] > table_u[i - 1]))
            throw std::invalid_argument("table_u must be strictly increasing");
        if (table_f[i] < table_f[i - 1])
            throw std::invalid_argument("table_f must be nondecreasing");
    }
}

double NonlinearitySpec::eval(double u) const {
    if (kind == Kind::power) {
        const double p = growth_exponent;
        return std::copysign(std::pow(std::abs(u), p), u);
    }
    const double a = std::abs(u);
    double v;
    if (a >= table_u.back()) {
        const std::size_t n = table_u.size();
        const double slope =
            (table_f[n - 1] - table_f[n - 2]) / (table_u[n - 1] - table_u[n - 2]);
        v = table_f.back() + slope * (a - table_u.back());
    } else {
        std::size_t hi = 1;
        while (table_u[hi] < a) ++hi;
        const double s = (a - table_u[hi - 1]) / (table_u[hi] - table_u[hi - 1]);
        v = table_f[hi - 1] + s * (table_f[hi] - table_f[hi - 1]);
    }
    return std::copysign(v, u);
}

double NonlinearitySpec::sampled_growth_constant(double lo, double hi, int samples) const {
    if (!(hi > lo)) throw std::invalid_argument("empty range");
    if (samples < 2) throw std::invalid_argument("need >= 2 samples");
    const double p = growth_exponent;
    double c = 0.0;
    for (int a = 0; a < samples; ++a) {
        const double u = lo + (hi - lo) * a / (samples - 1);
        for (int b = a + 1; b < samples; ++b) {
            const double v = lo + (hi - lo) * b / (samples - 1);
            const double df = std::abs(eval(u) - eval(v));
            const double bound =
                std::abs(u - v) * (std::pow(std::abs(u), p - 1.0) + std::pow(std::abs(v), p - 1.0));
            if (bound == 0.0) {
                if (df > 0.0) return std::numeric_limits<double>::infinity();
                continue;
            }
            c = std::max(c, df / bound);
        }
    }
    return c;
}

bool dominated_on_range(const NonlinearitySpec& f, const NonlinearitySpec& g,
                        double hi, int samples) {
    if (!(hi > 0.0)) throw std::invalid_argument("hi must be positive");
    if (samples < 2) throw std::invalid_argument("need >= 2 samples");
    for (int a = 0; a < samples; ++a) {
        const double mu = hi * a / (samples - 1);
        const double fmu = f.eval(mu);
        for (int b = a; b < samples; ++b) {
            const double nu = hi * b / (samples - 1);
            if (fmu > g.eval(nu)) return false;
        }
    }
    return true;
}

}  // namespace grushin
