#pragma once

#include <memory>
#include <span>
#include <vector>

#include "grushin/grid.hpp"

namespace grushin {

/**
 * Discrete Grushin heat semigroup S(t) on a grid: DFT along the periodic y
 * direction, then for each discrete frequency xi_m = pi m / Ly the x profile
 * is propagated by the Mehler kernel matrix
 *
 *   A_m[i][j] = M_{|xi_m|}(x_i, x_j; t) * w_j,
 *
 * with trapezoid weights w_j, then inverse DFT.  The matrices depend on
 * |xi_m| only and have nonnegative entries, so nonnegative inputs stay
 * nonnegative up to rounding.
 *
 * The matrix set (ny/2 + 1 matrices of nx^2) is cached at construction,
 * so a solver marching with a fixed step pays the build cost once.
 * Construction is parallel over modes; apply() is parallel over modes with
 * per-mode serial arithmetic, so results do not depend on the thread count.
 *
 * Resolution limits: the trapezoid-sampled Mehler matrix is only faithful
 * when the kernel width is resolved by the mesh, i.e. t at least around
 * hx^2 (the per-application aliasing error scales like exp(-2 pi^2 t/hx^2)).
 * Steps below the mesh scale, t < 1e-3 hx^2, return the input unchanged
 * (the strong-continuity limit; the quadrature cannot represent narrower
 * kernels), and t < hx^2 raises a warning flag queryable by callers.
 */
class SemigroupOperator {
public:
    SemigroupOperator(const GridSpec& spec, double t);
    ~SemigroupOperator();
    SemigroupOperator(SemigroupOperator&&) noexcept;
    SemigroupOperator& operator=(SemigroupOperator&&) noexcept;
    SemigroupOperator(const SemigroupOperator&) = delete;
    SemigroupOperator& operator=(const SemigroupOperator&) = delete;

    const GridSpec& grid() const;
    double time_step() const;
    bool identity_shortcut() const;            // t below 1e-3 hx^2
    bool time_below_grid_resolution() const;   // t < hx^2 (warning diagnostic)
    double min_matrix_entry() const;

    GridFunction apply(const GridFunction& u) const;
    // Reference implementation: naive O(ny^2) DFT and no OpenMP.  Kept for
    // testing the FFT path and for the benchmark.
    GridFunction apply_serial(const GridFunction& u) const;

    // Row-major view of the nx x nx matrix of mode m (tests, diagnostics).
    std::span<const double> mode_matrix(int m) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot application without retaining the matrix cache.
GridFunction apply_semigroup(const GridFunction& u, double t);

/**
 * Least-squares fit of log ||S(t) u0||_q against log t.  c_emp is the
 * measured constant of the smoothing estimate
 * ||S(t) f||_q <= C t^{-(Q/2)(1/p - 1/q)} ||f||_p, i.e.
 * exp(intercept) / ||u0||_p.
 */
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms residual of the fit in log space
    double c_emp = 0.0;
    std::vector<double> times, norms;
};

SlopeFit decay_slope_fit(const GridFunction& u0, double p, double q,
                         std::span<const double> t_list);

// Expected slope -(Q/2)(1/p - 1/q) for the grid's dimensions (N = k = 1).
double expected_decay_slope(double p, double q);

/**
 * The vanishing-weighted-norm probe: returns t^alpha ||S(t) phi||_r for each
 * t in t_list with alpha = (Q/2)(1/q - 1/r).  For phi in L^q but not L^r the
 * sequence must decrease toward 0 as t decreases, down to the resolution
 * floor set by the profile's mollification scale.
 */
std::vector<double> smoothing_decay_probe(const GridFunction& phi, double q, double r,
                                          std::span<const double> t_list,
                                          double* alpha_out = nullptr);

}  // namespace grushin
