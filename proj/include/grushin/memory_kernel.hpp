#pragma once

#include <span>
#include <vector>

namespace grushin {

struct TimeGrid {
    double dt = 1.0 / 64.0;
    int steps = 64;

    void validate() const;  // dt > 0, steps >= 1
    double time(int n) const { return n * dt; }
};

/**
 * Product-integration weights for the weakly singular memory integral
 *
 *   int_0^{t_n} (t_n - tau)^{-gamma} f(tau) dtau  ~=  sum_{j=0}^n w(n,j) f(t_j),
 *
 * exact for piecewise-linear f on the uniform grid t_j = j dt.  The kernel
 * is integrated in closed form against the linear hat on each panel, which
 * gives nonnegative weights, the exact sum t_n^{1-gamma}/(1-gamma), and the
 * translation structure w(n,j) = omega(n-j) away from j = 0:
 *
 *   omega(0) = c,   c = dt^{1-gamma} / ((1-gamma)(2-gamma)),
 *   omega(m) = c [ (m+1)^{2-g} - 2 m^{2-g} + (m-1)^{2-g} ],   1 <= m < n,
 *   w(n,0)   = dt^{1-g} [ (n^{2-g} - (n-1)^{2-g})/(2-g)
 *                         - (n-1)(n^{1-g} - (n-1)^{1-g})/(1-g) ].
 *
 * gamma = 0 reduces omega to the composite trapezoid rule.  Storage is
 * O(steps); evaluation at level n is an O(n) dot product per grid point.
 */
class MemoryWeights {
public:
    MemoryWeights(double gamma, double dt, int steps);  // gamma in [0,1) else throws

    double gamma() const { return gamma_; }
    double dt() const { return dt_; }
    int steps() const { return steps_; }

    // w(n, j) for 0 <= j <= n <= steps; w(0, 0) = 0 (empty integral).
    double weight(int n, int j) const;
    // The exact value of sum_j w(n, j), namely t_n^{1-gamma}/(1-gamma).
    double weight_sum_exact(int n) const;

private:
    double gamma_, dt_;
    int steps_;
    std::vector<double> interior_;  // omega(m), m = 0..steps
    std::vector<double> edge_;      // w(n, 0), n = 0..steps
};

// sum_{j<=n} w(n,j) history[j] for a scalar history.
double fractional_integral(std::span<const double> history, const MemoryWeights& w, int n);

/**
 * Same weighted sum applied to a history of fields (one flat value array per
 * time level, all the same length): out[p] = sum_j w(n,j) history[j][p].
 * Parallel over p with a fixed j order per point, so the result is
 * independent of the thread count.  The serial variant is the reference
 * implementation kept for testing.
 */
void fractional_integral_fields(const std::vector<std::vector<double>>& history,
                                const MemoryWeights& w, int n, std::span<double> out);
void fractional_integral_fields_serial(const std::vector<std::vector<double>>& history,
                                       const MemoryWeights& w, int n, std::span<double> out);

}  // namespace grushin
