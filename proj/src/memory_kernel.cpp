#include "grushin/memory_kernel.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace grushin {

void TimeGrid::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
}

MemoryWeights::MemoryWeights(double gamma, double dt, int steps)
    : gamma_(gamma), dt_(dt), steps_(steps) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");

    const double g1 = 1.0 - gamma;  // 1 - gamma
    const double g2 = 2.0 - gamma;  // 2 - gamma
    const double c = std::pow(dt, g1) / (g1 * g2);

    interior_.resize(steps + 1);
    interior_[0] = c;
    for (int m = 1; m <= steps; ++m) {
        interior_[m] =
            c * (std::pow(m + 1.0, g2) - 2.0 * std::pow(static_cast<double>(m), g2) +
                 std::pow(m - 1.0, g2));
    }

    edge_.resize(steps + 1);
    edge_[0] = 0.0;
    const double dtg = std::pow(dt, g1);
    for (int n = 1; n <= steps; ++n) {
        const double nn = n, nm = n - 1.0;
        edge_[n] = dtg * ((std::pow(nn, g2) - std::pow(nm, g2)) / g2 -
                          nm * (std::pow(nn, g1) - std::pow(nm, g1)) / g1);
    }
}

double MemoryWeights::weight(int n, int j) const {
    if (n < 0 || n > steps_ || j < 0 || j > n) throw std::out_of_range("weight index");
    if (n == 0) return 0.0;
    if (j == 0) return edge_[n];
    return interior_[n - j];
}

double MemoryWeights::weight_sum_exact(int n) const {
    if (n < 0 || n > steps_) throw std::out_of_range("weight index");
    const double tn = n * dt_;
    return std::pow(tn, 1.0 - gamma_) / (1.0 - gamma_);
}

double fractional_integral(std::span<const double> history, const MemoryWeights& w, int n) {
    if (n < 0 || static_cast<std::size_t>(n) >= history.size())
        throw std::out_of_range("history too short");
    double s = 0.0;
    for (int j = 0; j <= n; ++j) s += w.weight(n, j) * history[j];
    return s;
}

void fractional_integral_fields(const std::vector<std::vector<double>>& history,
                                const MemoryWeights& w, int n, std::span<double> out) {
    if (n < 0 || static_cast<std::size_t>(n) >= history.size())
        throw std::out_of_range("history too short");
    const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(out.size());
    for (int j = 0; j <= n; ++j)
        if (history[j].size() != out.size()) throw std::invalid_argument("field length mismatch");

    // Hoist the weights so the inner loop is a plain axpy per level.
    std::vector<double> wj(n + 1);
    for (int j = 0; j <= n; ++j) wj[j] = w.weight(n, j);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < len; ++p) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j) s += wj[j] * history[j][p];
        out[p] = s;
    }
}

void fractional_integral_fields_serial(const std::vector<std::vector<double>>& history,
                                       const MemoryWeights& w, int n, std::span<double> out) {
    if (n < 0 || static_cast<std::size_t>(n) >= history.size())
        throw std::out_of_range("history too short");
    const std::size_t len = out.size();
    for (int j = 0; j <= n; ++j)
        if (history[j].size() != len) throw std::invalid_argument("field length mismatch");
    std::vector<double> wj(n + 1);
    for (int j = 0; j <= n; ++j) wj[j] = w.weight(n, j);
    for (std::size_t p = 0; p < len; ++p) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j) s += wj[j] * history[j][p];
        out[p] = s;
    }
}

}  // namespace grushin
