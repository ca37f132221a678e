#pragma once

#include <vector>

namespace grushin {

/**
 * A scalar nonlinearity for the comparison machinery: either the odd power
 * law |u|^{p-1} u or a tabulated nondecreasing function on [0, u_max],
 * interpolated piecewise-linearly, extended beyond the table by its last
 * slope and to negative arguments oddly.  growth_exponent is the p of the
 * local Lipschitz bound |f(u)-f(v)| <= c |u-v| (|u|^{p-1} + |v|^{p-1}).
 */
struct NonlinearitySpec {
    enum class Kind { power, tabulated };
    Kind kind = Kind::power;
    double growth_exponent = 2.0;
    std::vector<double> table_u, table_f;  // tabulated only; table_u increasing from 0

    static NonlinearitySpec power(double p);
    static NonlinearitySpec tabulated(std::vector<double> u, std::vector<double> f,
                                      double growth_exponent);

    void validate() const;  // monotonicity and shape checks, throws
    double eval(double u) const;

    // Smallest c satisfying the growth bound over sampled pairs in [lo, hi];
    // infinite for a table violating the bound (e.g. a jump).
    double sampled_growth_constant(double lo, double hi, int samples = 64) const;
};

// True when f(mu) <= g(nu) for all sampled 0 <= mu <= nu <= hi.
bool dominated_on_range(const NonlinearitySpec& f, const NonlinearitySpec& g,
                        double hi, int samples = 128);

}  // namespace grushin
