#pragma once

#include <array>

namespace grushin {

/**
 * A pointwise query of the Mehler kernel M_lambda(x, x0; t), the heat kernel
 * of the harmonic oscillator (1/2)(Delta_x - lambda^2 |x|^2) in dimension
 * n (1 or 2).  lambda is the magnitude of the frequency dual to the
 * degenerate directions.
 */
struct MehlerQuery {
    double lambda = 0.0;            // >= 0
    std::array<double, 2> x{};      // only the first n entries are used
    std::array<double, 2> x0{};
    double t = 1.0;                 // > 0
    int n = 1;                      // 1 or 2

    void validate() const;
};

/**
 * Closed-form evaluation,
 *
 *   M_l = (l / (2 pi sinh(l t)))^{n/2}
 *         * exp( -(l/2) [ |x-x0|^2 csch(l t) + (|x|^2+|x0|^2) tanh(l t / 2) ] ),
 *
 * where the bracket is the cancellation-free rewriting of
 * (|x|^2+|x0|^2) coth - 2 x.x0 csch.  Evaluated through log-space and
 * expm1-based identities so that large l t underflows cleanly to zero and
 * small l t reproduces the Gaussian heat kernel limit
 * (2 pi t)^{-n/2} exp(-|x-x0|^2 / (2t)), which is returned exactly at l = 0.
 */
double mehler_kernel(const MehlerQuery& q);

struct HermiteSeriesResult {
    double value = 0.0;
    double tail_estimate = 0.0;  // bound on the dropped tail of the spectral series
    bool truncation_ok = true;   // tail_estimate small relative to the requested tolerance
};

/**
 * Independent oracle: the spectral expansion
 *
 *   M_l(x, x0; t) = sum_n e^{-l (n + 1/2) t} phi_n(x) phi_n(x0),
 *   phi_n(x) = l^{1/4} psi_n(sqrt(l) x),
 *
 * with psi_n the orthonormal Hermite functions evaluated by their stable
 * three-term recurrence.  n = 2 uses the tensor product of two 1-D series.
 * Requires lambda > 0.
 */
HermiteSeriesResult mehler_hermite_oracle(const MehlerQuery& q, int terms,
                                          double rel_tol = 1e-12);

}  // namespace grushin
