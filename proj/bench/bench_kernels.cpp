// Timing of the OpenMP kernels against their serial reference
// implementations, with a max-difference check so the benchmark doubles as
// a consistency sweep.  Sizes are desk scale; pass a repeat count to smooth
// timer noise (default 3).

#include <omp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "grushin/kernel.hpp"
#include "grushin/memory_kernel.hpp"
#include "grushin/semigroup.hpp"
#include "grushin/solver.hpp"

using namespace grushin;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void report(const char* name, double t_serial, double t_parallel, double diff) {
    std::printf("%-24s serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   max|diff| %.3g\n",
                name, 1e3 * t_serial, 1e3 * t_parallel,
                t_parallel > 0.0 ? t_serial / t_parallel : 0.0, diff);
}

template <typename F>
double timed(int repeats, F&& body) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const double t0 = omp_get_wtime();
        body();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("threads: %d\n", omp_get_max_threads());

    // Heat kernel on a tensor grid.
    {
        std::vector<double> xs(97), ys(65);
        for (std::size_t i = 0; i < xs.size(); ++i)
            xs[i] = -4.0 + 8.0 * double(i) / (xs.size() - 1);
        for (std::size_t j = 0; j < ys.size(); ++j)
            ys[j] = -3.0 + 6.0 * double(j) / (ys.size() - 1);
        const std::array<double, 2> x0{0.3, 0.0};
        const QuadratureSpec spec = default_quadrature_for_grid(0.4, 1, 3.0);

        std::vector<double> par, ser;
        const double tp = timed(repeats, [&] { par = grushin_kernel_grid(xs, x0, ys, 0.4, 1, spec); });
        const double ts = timed(repeats, [&] { ser = grushin_kernel_grid_serial(xs, x0, ys, 0.4, 1, spec); });
        report("kernel grid 97x65", ts, tp, max_abs_diff(par, ser));
    }

    // Semigroup application (FFT route vs direct DFT reference).
    {
        const GridSpec s{.x_half_width = 8.0, .y_half_width = 8.0, .nx = 193, .ny = 192};
        GridFunction u = GridFunction::zeros(s);
        std::mt19937_64 rng(3);
        for (double& v : u.values) v = (rng() >> 11) * 0x1.0p-53;
        const SemigroupOperator op(s, 0.05);

        GridFunction a, b;
        const double tp = timed(repeats, [&] { a = op.apply(u); });
        const double ts = timed(repeats, [&] { b = op.apply_serial(u); });
        report("semigroup 193x192", ts, tp, max_abs_diff(a.values, b.values));
    }

    // Memory integral accumulation over a long history.
    {
        const int steps = 96, len = 129 * 128;
        const MemoryWeights w(0.5, 1.0 / 128.0, steps);
        std::vector<std::vector<double>> history(steps + 1, std::vector<double>(len));
        std::mt19937_64 rng(11);
        for (auto& level : history)
            for (double& v : level) v = (rng() >> 11) * 0x1.0p-53;

        std::vector<double> par(len), ser(len);
        const double tp =
            timed(repeats, [&] { fractional_integral_fields(history, w, steps, par); });
        const double ts =
            timed(repeats, [&] { fractional_integral_fields_serial(history, w, steps, ser); });
        report("memory field n=96", ts, tp, max_abs_diff(par, ser));
    }

    // Pointwise nonlinearity.
    {
        const GridSpec s{.x_half_width = 8.0, .y_half_width = 8.0, .nx = 257, .ny = 256};
        GridFunction u = GridFunction::zeros(s);
        std::mt19937_64 rng(17);
        for (double& v : u.values) v = (rng() >> 11) * 0x1.0p-53 - 0.5;

        GridFunction a, b;
        const double tp = timed(repeats, [&] { a = nonlinear_term(u, 2.5); });
        const double ts = timed(repeats, [&] { b = nonlinear_term_serial(u, 2.5); });
        report("nonlinearity 257x256", ts, tp, max_abs_diff(a.values, b.values));
    }

    return 0;
}
