#include "grushin/exponents.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace grushin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative tolerance for equality at regime boundaries when the inputs are
// not exact rationals.
constexpr double kBoundaryRtol = 1e-12;

bool approx_equal(double a, double b) {
    return std::abs(a - b) <= kBoundaryRtol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

GrushinDims::GrushinDims(int n, int k) : spatial_n(n), degenerate_k(k) {
    if (n < 1 || k < 1) throw std::invalid_argument("dimensions must be >= 1");
}

void ProblemParams::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
    if (!(p1 > 1.0)) throw std::invalid_argument("p1 must be > 1");
    if (!(p2 > 1.0)) throw std::invalid_argument("p2 must be > 1");
    if (!std::isfinite(coeff1) || !std::isfinite(coeff2))
        throw std::invalid_argument("coefficients must be finite");
}

ExponentReport critical_exponents(const GrushinDims& dims, const ProblemParams& params,
                                  std::optional<double> q) {
    params.validate();
    if (q && !(*q > 0.0)) throw std::invalid_argument("q must be positive");

    const double Q = dims.homogeneous_dimension();
    const double g = params.gamma;
    const double p1 = params.p1;
    const double p2 = params.p2;

    ExponentReport r{};
    r.p_gamma = 1.0 + (4.0 - 2.0 * g) / (Q - 2.0 + 2.0 * g);
    r.inv_gamma = g > 0.0 ? 1.0 / g : kInf;
    r.p1_star = g > 0.0 ? std::max(r.inv_gamma, r.p_gamma) : r.p_gamma;
    r.p2_star = 1.0 + 2.0 / Q;
    r.p2_star_star_singular_branch = g > 0.0 ? (g - g * g + 1.0) / (g * (2.0 - g)) : kInf;
    const double p2ss_regular = 1.0 + 2.0 / (Q - 2.0 + 2.0 * g);
    r.p2_star_star = g > 0.0 ? std::max(r.p2_star_star_singular_branch, p2ss_regular)
                             : p2ss_regular;
    r.p2_tilde = (p1 + 1.0 - g) / (2.0 - g);
    r.p1_tilde = (p2 - 1.0) * (2.0 - g) + 1.0;
    r.q_sc1 = Q * (p1 - 1.0) / (2.0 * (2.0 - g));
    r.q_sc2 = Q * (p2 - 1.0) / 2.0;
    if (approx_equal(p2, r.p2_tilde)) {
        r.q_sc = r.q_sc1;
        r.q_sc_branch = ScalingBranch::boundary;
    } else if (p2 > r.p2_tilde) {
        r.q_sc = r.q_sc1;
        r.q_sc_branch = ScalingBranch::memory;
    } else {
        r.q_sc = r.q_sc2;
        r.q_sc_branch = ScalingBranch::instantaneous;
    }
    r.local_q_threshold = 0.5 * Q * std::max(p1 - 1.0, p2 - 1.0);
    if (q) {
        r.alpha1 = Q * (p1 - 1.0) / (2.0 * p1 * *q);
        r.alpha2 = Q * (p2 - 1.0) / (2.0 * p2 * *q);
        r.beta = Q / (2.0 * r.q_sc) - Q / (2.0 * *q);
    }
    return r;
}

QWindow admissible_q_window(const GrushinDims& dims, double p1, double gamma) {
    if (!(p1 > 1.0)) throw std::invalid_argument("p1 must be > 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");

    const double Q = dims.homogeneous_dimension();
    // The two-sided bound on Q/(2q) translates to q > Q(p1-1)/2 from above
    // and, when the lower coefficient L is positive, q < Q/(2L) from below.
    const double L = (2.0 - gamma) / (p1 - 1.0) - 1.0 / p1;
    const double lo_estimate = 0.5 * Q * (p1 - 1.0);
    const double hi = L > 0.0 ? 0.5 * Q / L : kInf;

    QWindow w{};
    if (p1 > lo_estimate) {
        w.lo = p1;
        w.lo_inclusive = true;
    } else {
        w.lo = lo_estimate;
        w.lo_inclusive = false;
    }
    w.hi = hi;
    w.empty = !(w.lo < w.hi);
    return w;
}

const char* to_string(RegimeCase c) {
    switch (c) {
        case RegimeCase::global_case_i: return "GlobalCaseI";
        case RegimeCase::global_case_ii: return "GlobalCaseII";
        case RegimeCase::global_case_iii: return "GlobalCaseIII";
        case RegimeCase::global_case_iv: return "GlobalCaseIV";
        case RegimeCase::global_case_v: return "GlobalCaseV";
        case RegimeCase::indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
}

namespace {

// Three-valued comparisons used by the classifier: exact when rational
// inputs are available, tolerance-based otherwise.
struct BoundaryCompare {
    bool exact = false;
    Rational gamma, p1, p2;
    double d_gamma = 0.0, d_p1 = 0.0, d_p2 = 0.0;
    int Q = 3;

    // p1 > max(1/gamma, p_gamma)
    bool p1_above_p1_star() const {
        if (exact) {
            Rational pg = p_gamma_exact();
            if (gamma.num() == 0) return p1 > pg;
            Rational inv = Rational(1) / gamma;
            return p1 > Rational::max(inv, pg);
        }
        double pg = 1.0 + (4.0 - 2.0 * d_gamma) / (Q - 2.0 + 2.0 * d_gamma);
        double star = d_gamma > 0.0 ? std::max(1.0 / d_gamma, pg) : pg;
        return d_p1 > star && !approx_equal(d_p1, star);
    }

    bool p2_equals_p2_tilde() const {
        if (exact) return p2 == p2_tilde_exact();
        double pt = (d_p1 + 1.0 - d_gamma) / (2.0 - d_gamma);
        return approx_equal(d_p2, pt);
    }

    bool p2_above_p2_star() const {
        if (exact) {
            Rational star = Rational(1) + Rational(2, Q);
            return p2 > star;
        }
        double star = 1.0 + 2.0 / Q;
        return d_p2 > star && !approx_equal(d_p2, star);
    }

    bool p2_above_p2_star_star() const {
        if (exact) {
            Rational reg = Rational(1) + Rational(2) / (Rational(Q) - Rational(2) + Rational(2) * gamma);
            if (gamma.num() == 0) return p2 > reg;
            Rational sing = (gamma - gamma * gamma + Rational(1)) / (gamma * (Rational(2) - gamma));
            return p2 > Rational::max(sing, reg);
        }
        double reg = 1.0 + 2.0 / (Q - 2.0 + 2.0 * d_gamma);
        double star = d_gamma > 0.0
                          ? std::max((d_gamma - d_gamma * d_gamma + 1.0) / (d_gamma * (2.0 - d_gamma)), reg)
                          : reg;
        return d_p2 > star && !approx_equal(d_p2, star);
    }

private:
    Rational p_gamma_exact() const {
        Rational num = Rational(4) - Rational(2) * gamma;
        Rational den = Rational(Q) - Rational(2) + Rational(2) * gamma;
        return Rational(1) + num / den;
    }
    Rational p2_tilde_exact() const {
        return (p1 + Rational(1) - gamma) / (Rational(2) - gamma);
    }
};

}  // namespace

RegimeVerdict classify_regime(const GrushinDims& dims, const ProblemParams& params,
                              bool data_nonneg, const ExactParams* exact) {
    params.validate();

    BoundaryCompare cmp;
    cmp.Q = dims.homogeneous_dimension();
    cmp.d_gamma = params.gamma;
    cmp.d_p1 = params.p1;
    cmp.d_p2 = params.p2;
    if (exact && exact->gamma && exact->p1 && exact->p2) {
        cmp.exact = true;
        cmp.gamma = *exact->gamma;
        cmp.p1 = *exact->p1;
        cmp.p2 = *exact->p2;
    }

    const double k1 = params.coeff1;
    const double k2 = params.coeff2;

    bool p1_super = false, p2_eq_tilde = false, p2_sup_star = false, p2_sup_star_star = false;
    auto eval_all = [&]() {
        p1_super = cmp.p1_above_p1_star();
        p2_eq_tilde = cmp.p2_equals_p2_tilde();
        p2_sup_star = cmp.p2_above_p2_star();
        p2_sup_star_star = cmp.p2_above_p2_star_star();
    };
    try {
        eval_all();
    } catch (const std::overflow_error&) {
        cmp.exact = false;  // rational arithmetic overflowed; use doubles
        eval_all();
    }

    struct Case {
        RegimeCase tag;
        bool holds;
        const char* conditions;
        std::vector<std::string> smallness;
    };
    const std::vector<Case> cases = {
        {RegimeCase::global_case_i, p1_super && p2_eq_tilde,
         "p1 > p1_star and p2 = p2_tilde",
         {"L^{q_sc} norm of u0"}},
        {RegimeCase::global_case_ii,
         data_nonneg && k1 > 0.0 && k2 > 0.0 && p1_super && p2_sup_star_star,
         "u0 >= 0, k1 > 0, k2 > 0, p1 > p1_star, p2 > p2_star_star",
         {"sup norm of u0", "L^{q_sc} norm of u0"}},
        {RegimeCase::global_case_iii, data_nonneg && k1 <= 0.0 && k2 <= 0.0,
         "u0 >= 0, k1 <= 0, k2 <= 0",
         {}},
        {RegimeCase::global_case_iv,
         data_nonneg && k1 > 0.0 && k2 <= 0.0 && p1_super,
         "u0 >= 0, k1 > 0, k2 <= 0, p1 > p1_star",
         {"L^{q_sc1} norm of u0"}},
        {RegimeCase::global_case_v,
         data_nonneg && k2 > 0.0 && k1 <= 0.0 && p2_sup_star,
         "u0 >= 0, k2 > 0, k1 <= 0, p2 > p2_star",
         {"L^{q_sc2} norm of u0"}},
    };

    RegimeVerdict verdict;
    for (const auto& c : cases) {
        if (!c.holds) continue;
        verdict.matched_conditions.push_back(std::string(to_string(c.tag)) + ": " + c.conditions);
        if (verdict.case_tag == RegimeCase::indeterminate) {
            verdict.case_tag = c.tag;
            verdict.required_smallness = c.smallness;
        }
    }
    return verdict;
}

}  // namespace grushin
