#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "grushin/comparison.hpp"

using namespace grushin;

namespace {

GridSpec make_spec(int nx, int ny, double lx, double ly) {
    GridSpec s;
    s.nx = nx;
    s.ny = ny;
    s.x_half_width = lx;
    s.y_half_width = ly;
    return s;
}

GridFunction gaussian_data(const GridSpec& s, double amp, double w) {
    ProfileSpec p;
    p.kind = ProfileSpec::Kind::gaussian;
    p.amplitude = amp;
    p.width_x = w;
    p.width_y = w;
    return sample_function(s, p);
}

SolveConfig base_config(const GridSpec& s, double dt, int steps) {
    SolveConfig c;
    c.grid = s;
    c.time.dt = dt;
    c.time.steps = steps;
    c.params.gamma = 0.5;
    c.params.p1 = 3.0;
    c.params.p2 = 2.0;
    c.params.coeff1 = 0.5;
    c.params.coeff2 = 0.5;
    return c;
}

}  // namespace

TEST_CASE("ordered data with one nonlinearity stays ordered") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 0.4, 1.5);
    const GridFunction v0 = gaussian_data(s, 1.0, 1.5);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 8);

    const NonlinearitySpec f = NonlinearitySpec::power(3.0);
    const NonlinearitySpec g = NonlinearitySpec::power(2.0);
    const OrderingReport rep = compare_solutions(u0, v0, f, g, f, g, 0.25, cfg);

    CHECK(rep.status_u == SolveStatus::completed);
    CHECK(rep.status_v == SolveStatus::completed);
    CHECK(rep.passed);
    CHECK(rep.violation_count == 0);
    CHECK(rep.min_defect >= -rep.tolerance);
    // The minimum lives in the Gaussian tails, far below the bulk separation.
    CHECK(rep.min_defect < 0.01);
    CHECK(rep.range_respected);
    CHECK(rep.tolerance >= 1e-10);
    CHECK(rep.tolerance < 1e-9);
    CHECK(rep.argmin_ix >= 0);
    CHECK(rep.argmin_ix < s.nx);
    CHECK(rep.argmin_iy >= 0);
    CHECK(rep.argmin_iy < s.ny);
}

TEST_CASE("ordered exponent pairs on a unit range") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 0.1, 1.5);
    const GridFunction v0 = gaussian_data(s, 0.25, 1.5);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 8);

    // On [0, 1] a larger exponent gives the smaller power, so the u problem
    // gets p = 3 and the v problem p = 2 in both couplings.
    const NonlinearitySpec lo = NonlinearitySpec::power(3.0);
    const NonlinearitySpec hi = NonlinearitySpec::power(2.0);
    const OrderingReport rep = compare_solutions(u0, v0, lo, lo, hi, hi, 0.25, cfg, 1.0);

    CHECK(rep.passed);
    CHECK(rep.violation_count == 0);
    CHECK(rep.range_respected);
    CHECK(rep.min_defect >= -rep.tolerance);
}

TEST_CASE("comparison preconditions throw") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 0.4, 1.5);
    const GridFunction v0 = gaussian_data(s, 1.0, 1.5);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 8);
    const NonlinearitySpec f = NonlinearitySpec::power(3.0);
    const NonlinearitySpec g = NonlinearitySpec::power(2.0);

    CHECK_THROWS_AS(compare_solutions(u0, v0, f, g, f, g, 0.0, cfg), std::invalid_argument);

    const GridSpec other = make_spec(33, 32, 6.0, 6.0);
    CHECK_THROWS_AS(compare_solutions(u0, gaussian_data(other, 1.0, 1.5), f, g, f, g, 0.25, cfg),
                    std::invalid_argument);

    GridFunction neg = u0;
    neg.at(2, 3) = -0.1;
    CHECK_THROWS_AS(compare_solutions(neg, v0, f, g, f, g, 0.25, cfg), std::invalid_argument);

    // Swapped data: u0 above v0 somewhere.
    CHECK_THROWS_AS(compare_solutions(v0, u0, f, g, f, g, 0.25, cfg), std::invalid_argument);

    SolveConfig bad = cfg;
    bad.params.coeff2 = -0.5;
    CHECK_THROWS_AS(compare_solutions(u0, v0, f, g, f, g, 0.25, bad), std::invalid_argument);

    // p = 2 is not below p = 3 on [0, 1]: 0.5^2 > 0.5^3.
    const NonlinearitySpec p2 = NonlinearitySpec::power(2.0);
    const NonlinearitySpec p3 = NonlinearitySpec::power(3.0);
    CHECK_THROWS_AS(compare_solutions(u0, v0, p2, p3, p3, p3, 0.25, cfg, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(compare_solutions(u0, v0, p3, p2, p3, p3, 0.25, cfg, 1.0),
                    std::invalid_argument);
}

TEST_CASE("solution trajectory is its own supersolution") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 0.5, 1.2);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 8);
    cfg.checkpoint_stride = 1;
    const NonlinearitySpec f = NonlinearitySpec::power(3.0);
    const NonlinearitySpec g = NonlinearitySpec::power(2.0);

    const SolveResult run = march(u0, cfg, f, g, true);
    REQUIRE(run.states.size() == 9);
    const SupersolutionReport rep = supersolution_check(run.states, u0, cfg, f, g, 3);

    // The trajectory is a fixed point of the solution operator, so every
    // quantity collapses to an exact zero.
    CHECK(rep.is_supersolution);
    CHECK(rep.worst_defect == 0.0);
    REQUIRE(rep.descent_max_rise.size() == 3);
    for (double rise : rep.descent_max_rise) CHECK(rise == 0.0);
    CHECK(rep.descent_monotone);
    CHECK(rep.min_above_solution == 0.0);
    CHECK(rep.bounded_below_by_solution);
}

TEST_CASE("march from larger data gives a descending supersolution") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 0.3, 1.2);
    const GridFunction v0 = gaussian_data(s, 0.8, 1.2);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 8);
    cfg.checkpoint_stride = 1;
    const NonlinearitySpec f = NonlinearitySpec::power(3.0);
    const NonlinearitySpec g = NonlinearitySpec::power(2.0);

    const SolveResult big = march(v0, cfg, f, g, true);
    const SupersolutionReport rep = supersolution_check(big.states, u0, cfg, f, g, 4);

    CHECK(rep.is_supersolution);
    CHECK(rep.worst_defect >= -rep.tolerance);
    REQUIRE(rep.descent_max_rise.size() == 4);
    for (double rise : rep.descent_max_rise) CHECK(rise <= rep.tolerance);
    CHECK(rep.descent_monotone);
    CHECK(rep.bounded_below_by_solution);
    CHECK(rep.min_above_solution >= -rep.tolerance);
}

TEST_CASE("frozen profile is rejected once the wings spread") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 1.0, 0.8);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 4);
    cfg.checkpoint_stride = 1;
    const NonlinearitySpec f = NonlinearitySpec::power(3.0);
    const NonlinearitySpec g = NonlinearitySpec::power(2.0);

    // Holding the initial profile fixed in time fails the inequality: the
    // evolved state rises above it away from the peak.
    const std::vector<GridFunction> frozen(5, u0);
    const SupersolutionReport rep = supersolution_check(frozen, u0, cfg, f, g, 3);

    CHECK_FALSE(rep.is_supersolution);
    CHECK(rep.worst_defect < -1e-4);
    CHECK(rep.defect_t > 0.0);
    CHECK(rep.descent_max_rise.empty());
}

TEST_CASE("supersolution preconditions throw") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 0.5, 1.2);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 8);
    cfg.checkpoint_stride = 1;
    const NonlinearitySpec f = NonlinearitySpec::power(3.0);
    const NonlinearitySpec g = NonlinearitySpec::power(2.0);
    const SolveResult run = march(u0, cfg, f, g, true);

    // Wrong number of levels.
    std::vector<GridFunction> truncated(run.states.begin(), run.states.begin() + 5);
    CHECK_THROWS_AS(supersolution_check(truncated, u0, cfg, f, g), std::invalid_argument);

    // Starting below the initial data.
    std::vector<GridFunction> low = run.states;
    for (double& v : low[0].values) v *= 0.99;
    CHECK_THROWS_AS(supersolution_check(low, u0, cfg, f, g), std::invalid_argument);

    CHECK_THROWS_AS(supersolution_check(run.states, u0, cfg, f, g, 0), std::invalid_argument);

    const GridFunction off = gaussian_data(make_spec(33, 32, 6.0, 6.0), 0.5, 1.2);
    CHECK_THROWS_AS(supersolution_check(run.states, off, cfg, f, g), std::invalid_argument);
}

TEST_CASE("absorbing couplings are dominated by the free flow") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 1.0, 1.2);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 8);
    cfg.params.coeff1 = -0.5;
    cfg.params.coeff2 = -0.5;

    const DominationReport rep = free_domination_check(u0, 0.25, cfg);
    CHECK(rep.passed);
    CHECK(rep.status == SolveStatus::completed);
    // Level zero matches the free flow exactly, so the worst defect sits at
    // zero up to transform rounding.
    CHECK(rep.worst_defect <= 0.0);
    CHECK(rep.worst_defect >= -1e-9);
    CHECK(rep.min_state >= -1e-9);

    SolveConfig mem_only = cfg;
    mem_only.params.coeff2 = 0.0;
    CHECK(free_domination_check(u0, 0.25, mem_only).passed);
}

TEST_CASE("free domination preconditions throw") {
    const GridSpec s = make_spec(65, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 1.0, 1.2);
    SolveConfig cfg = base_config(s, 1.0 / 32.0, 8);
    cfg.params.coeff1 = -0.5;
    cfg.params.coeff2 = -0.5;

    SolveConfig bad = cfg;
    bad.params.coeff2 = 0.5;
    CHECK_THROWS_AS(free_domination_check(u0, 0.25, bad), std::invalid_argument);

    GridFunction neg = u0;
    neg.at(1, 1) = -1e-3;
    CHECK_THROWS_AS(free_domination_check(neg, 0.25, cfg), std::invalid_argument);

    CHECK_THROWS_AS(free_domination_check(u0, 0.0, cfg), std::invalid_argument);
}
