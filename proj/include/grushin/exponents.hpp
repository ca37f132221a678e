#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grushin/rational.hpp"

namespace grushin {

/**
 * Dimensions of the underlying space R^N_x x R^k_y for the Grushin operator
 * (1/2)(Delta_x + |x|^2 Delta_y).  The homogeneous dimension Q = N + 2k
 * plays the role the space dimension plays for the ordinary heat equation:
 * it governs kernel scaling and every smoothing/decay exponent below.
 */
struct GrushinDims {
    int spatial_n;
    int degenerate_k;

    GrushinDims(int n, int k);
    int homogeneous_dimension() const { return spatial_n + 2 * degenerate_k; }
};

/**
 * Parameters of the semilinear problem
 *
 *   u_t = Delta_G u + k1 * int_0^t (t-s)^{-gamma} |u|^{p1-1}u(s) ds
 *                   + k2 * |u|^{p2-1}u,
 *
 * with 0 <= gamma < 1 and p1, p2 > 1.
 */
struct ProblemParams {
    double gamma = 0.5;
    double p1 = 2.0;
    double p2 = 2.0;
    double coeff1 = 0.0;  // k1, weight of the memory nonlinearity
    double coeff2 = 0.0;  // k2, weight of the instantaneous nonlinearity

    void validate() const;  // throws std::invalid_argument
};

// Which branch produced the scale-critical exponent q_sc.
enum class ScalingBranch { memory, instantaneous, boundary };

/**
 * Every threshold exponent of the problem.  Fields that need a Lebesgue
 * index q (alpha1, alpha2, beta) are only present when one was supplied.
 *
 * Sentinel convention: at gamma = 0 the 1/gamma-type branches are +infinity
 * and the max formulas degenerate to their finite branch.
 */
struct ExponentReport {
    double p_gamma;        // 1 + (4-2g)/(Q-2+2g), Fujita-type threshold for the memory term
    double inv_gamma;      // 1/gamma, +inf at gamma = 0
    double p1_star;        // max(1/gamma, p_gamma)
    double p2_star;        // 1 + 2/Q, Fujita threshold for the instantaneous term
    double p2_star_star;   // max((g-g^2+1)/(g(2-g)), 1 + 2/(Q-2+2g))
    double p2_star_star_singular_branch;  // (g-g^2+1)/(g(2-g)), +inf at gamma = 0
    double p1_tilde;       // (p2-1)(2-g)+1, the p1 matching a given p2
    double p2_tilde;       // (p1+1-g)/(2-g), the p2 matching a given p1
    double q_sc1;          // Q(p1-1)/(2(2-g)), critical index of the memory term
    double q_sc2;          // Q(p2-1)/2, critical index of the instantaneous term
    double q_sc;           // q_sc1 if p2 >= p2_tilde else q_sc2 (equal on the boundary)
    ScalingBranch q_sc_branch;
    double local_q_threshold;  // (Q/2) max(p1-1, p2-1); local theory needs q above this
    std::optional<double> alpha1, alpha2;  // Q(p_i-1)/(2 p_i q)
    std::optional<double> beta;            // Q/(2 q_sc) - Q/(2q)
};

ExponentReport critical_exponents(const GrushinDims& dims, const ProblemParams& params,
                                  std::optional<double> q = std::nullopt);

/**
 * The window of Lebesgue indices q for which the memory term closes the
 * fixed-point estimate:  (2-g)/(p1-1) - 1/p1 < Q/(2q) < 1/(p1-1), together
 * with the side condition q >= p1.  Nonempty exactly when p1 > p1_star.
 */
struct QWindow {
    bool empty;
    double lo = 0.0;
    double hi = 0.0;
    bool lo_inclusive = false;  // true when the q >= p1 clip is the binding lower bound
};

QWindow admissible_q_window(const GrushinDims& dims, double p1, double gamma);

enum class RegimeCase {
    global_case_i,
    global_case_ii,
    global_case_iii,
    global_case_iv,
    global_case_v,
    indeterminate,
};

const char* to_string(RegimeCase c);

/**
 * Verdict of the global-existence classifier.  The five hypothesis sets can
 * overlap; case_tag is the first match in order I..V and matched_conditions
 * lists every set that held, each with the inequalities that made it hold.
 * required_smallness names the norms of u0 that must be small for the
 * selected case (the theory does not quantify the threshold).
 */
struct RegimeVerdict {
    RegimeCase case_tag = RegimeCase::indeterminate;
    std::vector<std::string> required_smallness;
    std::vector<std::string> matched_conditions;
};

// Optional exact inputs for boundary-sharp classification.  Any that are
// absent (or overflow 64-bit arithmetic) fall back to doubles with a
// relative tolerance of 1e-12 for equalities at regime boundaries.
struct ExactParams {
    std::optional<Rational> gamma, p1, p2;
};

RegimeVerdict classify_regime(const GrushinDims& dims, const ProblemParams& params,
                              bool data_nonneg, const ExactParams* exact = nullptr);

}  // namespace grushin
