#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "grushin/mehler.hpp"

namespace grushin {

/**
 * Pointwise query of the Grushin heat kernel K(x, x0, y; t) with one
 * degenerate direction (k = 1) and n in {1, 2}:
 *
 *   K = (1/pi) int_0^inf cos(xi y) M_xi(x, x0; t) dxi.
 *
 * The phase is even and real, so the cosine form is exact; the (2 pi)^{-n/2}
 * of the full Fourier normalization is carried inside M.
 */
struct KernelQuery {
    std::array<double, 2> x{};
    std::array<double, 2> x0{};
    double y = 0.0;
    double t = 1.0;  // > 0
    int n = 1;       // 1 or 2

    void validate() const;
};

enum class QuadratureRule { composite_gauss, trapezoid };

/**
 * Frequency quadrature for the xi integral.
 *
 * composite_gauss: 16-point Gauss-Legendre panels on [0, xi_max]; the panel
 * count is nodes/16, the first panel slot subdivided geometrically toward
 * xi = 0 where the integrand varies fastest at small t.  trapezoid: nodes
 * equally spaced points on [0, xi_max], kept as a cheap cross-check rule.
 */
struct QuadratureSpec {
    double xi_max = 60.0;
    int nodes = 320;  // total node budget, >= 16
    QuadratureRule rule = QuadratureRule::composite_gauss;

    void validate() const;
};

/**
 * Chooses xi_max so the integrand envelope drops below tol times its peak
 * (the envelope decays like xi^{n/2} e^{-xi (n t / 2 + (|x|-|x0|)^2 / 2)}),
 * and a panel budget resolving both the envelope scale and the cos(xi y)
 * oscillation.
 */
QuadratureSpec default_quadrature(const KernelQuery& q, double tol = 1e-12);

// Same, but adequate for every query with |y| <= y_abs_max and x, x0 drawn
// from the given x values against a fixed x0 (used by the batched evaluator).
QuadratureSpec default_quadrature_for_grid(double t, int n, double y_abs_max, double tol = 1e-12);

struct KernelValue {
    double value = 0.0;
    double tail_estimate = 0.0;  // envelope mass beyond xi_max (same scale as value)
    bool tail_ok = true;
};

KernelValue grushin_kernel(const KernelQuery& q, const QuadratureSpec& spec);

// Convenience: auto-spec evaluation, value only.
double grushin_kernel_value(const KernelQuery& q, double tol = 1e-12);

/**
 * Batched evaluation of K(x_i, x0, y_j; t) on the tensor set xs x ys,
 * row-major xs.size() x ys.size().  Shares the Mehler factors across ys and
 * a cosine table across xs; parallel over xs rows with a fixed node order,
 * so results do not depend on the thread count.
 */
std::vector<double> grushin_kernel_grid(std::span<const double> xs, std::array<double, 2> x0,
                                        std::span<const double> ys, double t, int n,
                                        const QuadratureSpec& spec);

// Serial reference: scalar quadrature per point.  Kept for correctness
// testing and the benchmark; identical node set, so it agrees with the
// batched path to rounding.
std::vector<double> grushin_kernel_grid_serial(std::span<const double> xs, std::array<double, 2> x0,
                                               std::span<const double> ys, double t, int n,
                                               const QuadratureSpec& spec);

/**
 * Property sweep of the kernel at one time: normalization of
 * int K(x, 0, y; t) dx dy by tensor trapezoid over the box, minimum sampled
 * value (positivity), worst x <-> x0 symmetry defect and worst scaling
 * defect |K(rx, rx0, r^2 y; r^2 t) - r^{-Q} K| / K on random samples.
 */
struct KernelPropertyReport {
    double normalization = 0.0;
    double min_value = 0.0;
    double max_symmetry_defect = 0.0;   // absolute
    double max_scaling_defect = 0.0;    // relative
    double tail_mass_estimate = 0.0;    // estimated kernel mass outside the box
    bool box_ok = true;                 // tail mass below the report tolerance
};

KernelPropertyReport kernel_property_report(double t, double x_half, double y_half,
                                            int nx, int ny, const QuadratureSpec& spec,
                                            int n = 1, std::uint64_t seed = 0,
                                            int sample_pairs = 100);

}  // namespace grushin
