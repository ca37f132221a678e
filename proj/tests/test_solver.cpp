#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "grushin/solver.hpp"

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

double sup_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

SolveConfig base_config(const GridSpec& s, double dt, int steps) {
    SolveConfig c;
    c.grid = s;
    c.time.dt = dt;
    c.time.steps = steps;
    c.params.gamma = 0.5;
    c.params.p1 = 2.0;
    c.params.p2 = 2.0;
    c.params.coeff1 = 0.5;
    c.params.coeff2 = 0.5;
    return c;
}

}  // namespace

TEST_CASE("status and scheme names") {
    CHECK(std::string(to_string(SolveStatus::completed)) == "completed");
    CHECK(std::string(to_string(SolveStatus::blowup_detected)) == "blowup_detected");
    CHECK(std::string(to_string(SolveStatus::nan_abort)) == "nan_abort");
    CHECK(std::string(to_string(Scheme::exp_euler)) == "expEuler");
    CHECK(std::string(to_string(Scheme::predictor_corrector)) == "predictorCorrector");
}

TEST_CASE("nonlinear term goldens and serial agreement") {
    const GridSpec s = make_spec(33, 32, 4.0, 4.0);
    GridFunction u = GridFunction::zeros(s);
    u.at(3, 4) = -2.0;
    u.at(10, 20) = 3.0;
    const GridFunction f2 = nonlinear_term(u, 2.0);
    CHECK(f2.at(3, 4) == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(f2.at(10, 20) == doctest::Approx(9.0).epsilon(1e-15));
    const GridFunction f15 = nonlinear_term(u, 1.5);
    CHECK(f15.at(3, 4) == doctest::Approx(-std::pow(2.0, 1.5)).epsilon(1e-15));
    CHECK(f15.at(10, 20) == doctest::Approx(std::pow(3.0, 1.5)).epsilon(1e-15));

    const GridFunction g = gaussian_data(s, 1.3, 0.9);
    const GridFunction a = nonlinear_term(g, 2.7);
    const GridFunction b = nonlinear_term_serial(g, 2.7);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("zero coefficients reproduce the free evolution bitwise") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 1.0, 1.0);
    SolveConfig c = base_config(s, 1.0 / 16.0, 8);
    c.params.coeff1 = 0.0;
    c.params.coeff2 = 0.0;
    const SolveResult res = solve(u0, c);
    CHECK(res.trace.status == SolveStatus::completed);

    const SemigroupOperator op(s, c.time.dt);
    GridFunction ref = u0;
    for (int n = 0; n < 8; ++n) ref = op.apply(ref);
    CHECK(sup_diff(res.final_state, ref) == 0.0);

    REQUIRE(res.trace.times.size() == 9);
    CHECK(res.trace.times[3] == doctest::Approx(3.0 / 16.0).epsilon(1e-15));
    CHECK(res.trace.t_max_estimate == std::numeric_limits<double>::infinity());
    CHECK_FALSE(res.trace.grid_resolution_warning);
    // At t = 0 the weighted norms vanish by their t^alpha prefactor.
    CHECK(res.trace.weighted_norm_1[0] == 0.0);
    CHECK(res.trace.weighted_norm_2[0] == 0.0);
}

TEST_CASE("march preconditions") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 2.0, 1.0);
    SolveConfig c = base_config(s, 1.0 / 32.0, 4);
    c.blowup_threshold = 1.0;  // below the initial sup norm
    CHECK_THROWS_AS(solve(u0, c), std::invalid_argument);

    c.blowup_threshold = 1e6;
    const GridFunction wrong = gaussian_data(make_spec(33, 32, 8.0, 8.0), 1.0, 1.0);
    CHECK_THROWS_AS(solve(wrong, c), std::invalid_argument);
}

TEST_CASE("self convergence orders of the two schemes") {
    // hx^2 must sit well below the finest dt: the trapezoid-sampled Mehler
    // matrix amplifies when the step drops under the mesh scale.  Here
    // hx = 1/16 so hx^2 = 1/256 and the ladder stops at dt = 1/64.
    const GridSpec s = make_spec(193, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 0.5, 1.0);
    auto run = [&](double dt, Scheme scheme, double k1) {
        SolveConfig c = base_config(s, dt, static_cast<int>(std::lround(0.5 / dt)));
        c.scheme = scheme;
        c.params.coeff1 = k1;
        const SolveResult r = solve(u0, c);
        REQUIRE(r.trace.status == SolveStatus::completed);
        return r.final_state;
    };

    SUBCASE("exponential Euler is first order") {
        const GridFunction e8 = run(1.0 / 8.0, Scheme::exp_euler, 0.5);
        const GridFunction e16 = run(1.0 / 16.0, Scheme::exp_euler, 0.5);
        const GridFunction e32 = run(1.0 / 32.0, Scheme::exp_euler, 0.5);
        const double d1 = sup_diff(e8, e16);
        const double d2 = sup_diff(e16, e32);
        CHECK(d1 / d2 > 1.8);
        CHECK(d1 / d2 < 2.4);
    }

    SUBCASE("predictor corrector is second order on the instantaneous term") {
        const GridFunction p8 = run(1.0 / 8.0, Scheme::predictor_corrector, 0.0);
        const GridFunction p16 = run(1.0 / 16.0, Scheme::predictor_corrector, 0.0);
        const GridFunction p32 = run(1.0 / 32.0, Scheme::predictor_corrector, 0.0);
        const double q1 = sup_diff(p8, p16);
        const double q2 = sup_diff(p16, p32);
        CHECK(q1 / q2 > 3.4);

        // and strictly more accurate than Euler at equal resolution.
        const GridFunction ref = run(1.0 / 64.0, Scheme::predictor_corrector, 0.0);
        const GridFunction e16 = run(1.0 / 16.0, Scheme::exp_euler, 0.0);
        CHECK(sup_diff(p16, ref) < 0.3 * sup_diff(e16, ref));
    }

    SUBCASE("memory term limits the corrector to order 2 - gamma") {
        const GridFunction p8 = run(1.0 / 8.0, Scheme::predictor_corrector, 0.5);
        const GridFunction p16 = run(1.0 / 16.0, Scheme::predictor_corrector, 0.5);
        const GridFunction p32 = run(1.0 / 32.0, Scheme::predictor_corrector, 0.5);
        const double q1 = sup_diff(p8, p16);
        const double q2 = sup_diff(p16, p32);
        CHECK(q1 / q2 > 2.2);  // ~2^{1.5} for gamma = 1/2
    }
}

TEST_CASE("residual of the integral equation") {
    const GridSpec s = make_spec(97, 64, 6.0, 6.0);
    const GridFunction u0 = gaussian_data(s, 0.8, 0.8);

    SUBCASE("linear runs satisfy the integral equation to rounding") {
        SolveConfig c = base_config(s, 1.0 / 8.0, 4);
        c.params.coeff1 = 0.0;
        c.params.coeff2 = 0.0;
        const SolveResult r = solve(u0, c, true);
        CHECK(residual_check(r, c) < 1e-12);
    }

    SUBCASE("the residual scales linearly with dt for the Euler scheme") {
        SolveConfig c1 = base_config(s, 1.0 / 16.0, 8);
        c1.params.coeff1 = 0.3;
        c1.params.coeff2 = 0.3;
        const double r1 = residual_check(solve(u0, c1, true), c1);

        SolveConfig c2 = c1;
        c2.time.dt = 1.0 / 32.0;
        c2.time.steps = 16;
        const double r2 = residual_check(solve(u0, c2, true), c2);

        CHECK(r1 > 1e-8);  // genuinely nonlinear
        CHECK(r1 / r2 > 1.5);
        CHECK(r1 / r2 < 2.8);
    }

    SUBCASE("states kept at a coarser stride are rejected") {
        SolveConfig c = base_config(s, 1.0 / 8.0, 4);
        c.checkpoint_stride = 2;
        const SolveResult r = solve(u0, c, true);
        CHECK_THROWS_AS(residual_check(r, c), std::invalid_argument);
    }
}

TEST_CASE("checkpoint stride keeps the requested levels plus the endpoint") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 0.5, 1.0);
    SolveConfig c = base_config(s, 1.0 / 32.0, 7);
    c.checkpoint_stride = 3;
    const SolveResult r = solve(u0, c, true);
    REQUIRE(r.state_times.size() == 4);
    CHECK(r.state_times[0] == 0.0);
    CHECK(r.state_times[1] == doctest::Approx(3.0 / 32.0).epsilon(1e-15));
    CHECK(r.state_times[2] == doctest::Approx(6.0 / 32.0).epsilon(1e-15));
    CHECK(r.state_times[3] == doctest::Approx(7.0 / 32.0).epsilon(1e-15));
    CHECK(sup_diff(r.states.back(), r.final_state) == 0.0);
}

TEST_CASE("pointwise blow-up is detected with a stable crossing time") {
    // dt far below the mesh scale: the semigroup degenerates to the identity
    // and each node follows the ODE m' = m^3 from m(0) = amplitude.  The
    // continuum blow-up time 1/(2 * 50^2) = 2e-4 is then resolved by dt.
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 50.0, 0.5);
    SolveConfig c = base_config(s, 4e-6, 120);
    c.params.gamma = 0.5;
    c.params.p1 = 2.0;
    c.params.coeff1 = 0.0;
    c.params.p2 = 3.0;
    c.params.coeff2 = 1.0;
    c.blowup_threshold = 1e6;

    const SolveResult r = solve(u0, c, true);
    CHECK(r.trace.status == SolveStatus::blowup_detected);
    CHECK(r.trace.grid_resolution_warning);
    CHECK(r.trace.sup_norms.back() >= 1e6);
    CHECK(r.trace.t_max_estimate > 1.5e-4);
    CHECK(r.trace.t_max_estimate < 3.0e-4);
    // Crossing state is checkpointed even off-stride.
    CHECK(r.state_times.back() == doctest::Approx(r.trace.t_max_estimate).epsilon(1e-15));
    CHECK(lp_norm(r.states.back(), norm_sup) >= 1e6);

    SolveConfig ch = c;
    ch.time.dt = 2e-6;
    ch.time.steps = 240;
    const SolveResult rh = solve(u0, ch);
    CHECK(rh.trace.status == SolveStatus::blowup_detected);
    CHECK(std::abs(rh.trace.t_max_estimate - r.trace.t_max_estimate) <
          0.1 * r.trace.t_max_estimate);

    SolveConfig cg = c;
    cg.grid = make_spec(97, 96, 8.0, 8.0);
    const SolveResult rg = solve(gaussian_data(cg.grid, 50.0, 0.5), cg);
    CHECK(rg.trace.status == SolveStatus::blowup_detected);
    CHECK(std::abs(rg.trace.t_max_estimate - r.trace.t_max_estimate) <
          0.1 * r.trace.t_max_estimate);
}

TEST_CASE("overflow past the threshold aborts with the last finite state") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 50.0, 0.5);
    SolveConfig c = base_config(s, 1e-5, 50);
    c.params.coeff1 = 0.0;
    c.params.p2 = 5.0;
    c.params.coeff2 = 1.0;
    c.blowup_threshold = 1e300;

    const SolveResult r = solve(u0, c);
    CHECK(r.trace.status == SolveStatus::nan_abort);
    CHECK(r.final_state.all_finite());
    CHECK(std::isnan(r.trace.sup_norms.back()));
    CHECK(r.trace.t_max_estimate < 1e-3);
    CHECK(r.trace.times.size() < 50);
}

TEST_CASE("ball exit diagnostic") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 2.0, 1.0);

    SolveConfig grow = base_config(s, 1.0 / 32.0, 4);
    grow.params.coeff1 = 0.0;
    grow.params.p2 = 3.0;
    grow.params.coeff2 = 2.0;
    grow.ball_radius_factor = 1.0001;
    const SolveResult rg = solve(u0, grow);
    CHECK(rg.trace.ball_exited);
    CHECK(rg.trace.ball_exit_time <= 4.0 / 32.0);

    SolveConfig decay = base_config(s, 1.0 / 32.0, 4);
    decay.params.coeff1 = 0.0;
    decay.params.coeff2 = 0.0;
    decay.ball_radius_factor = 1.0001;
    const SolveResult rd = solve(u0, decay);
    CHECK_FALSE(rd.trace.ball_exited);
    CHECK(rd.trace.ball_exit_time == std::numeric_limits<double>::infinity());
}

TEST_CASE("the march trajectory is a fixed point of the solution operator") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 0.4, 1.0);
    SolveConfig c = base_config(s, 1.0 / 32.0, 6);
    const NonlinearitySpec f = NonlinearitySpec::power(c.params.p1);
    const NonlinearitySpec g = NonlinearitySpec::power(c.params.p2);

    const SolveResult r = march(u0, c, f, g, true);
    REQUIRE(r.states.size() == 7);
    const std::vector<GridFunction> lam = apply_solution_operator(u0, r.states, c, f, g);
    for (int n = 0; n <= 6; ++n) CHECK(sup_diff(lam[n], r.states[n]) == 0.0);
}

TEST_CASE("picard iteration contracts and terminates at the march solution") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 0.1, 1.0);
    SolveConfig c = base_config(s, 1.0 / 32.0, 8);
    c.params.coeff1 = 1.0;
    c.params.coeff2 = 1.0;

    const double T = 0.25;  // 8 steps
    const PicardResult pr = picard_iterate(u0, T, 12, c);
    REQUIRE(pr.distances.size() == 11);
    CHECK_FALSE(pr.contraction_window_violation);
    // Strict decrease while nontrivial, and exact termination once the
    // iteration index passes the number of steps (nilpotency of the
    // discrete Duhamel recursion).
    CHECK(pr.distances[0] > 0.0);
    for (std::size_t k = 1; k < 8; ++k) CHECK(pr.distances[k] <= pr.distances[k - 1]);
    CHECK(pr.distances.back() == 0.0);

    const SolveResult ref = solve(u0, c);
    CHECK(sup_diff(pr.final_state, ref.final_state) == 0.0);
    REQUIRE(pr.state_times.size() == 9);
    CHECK(pr.state_times.back() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("picard flags leaving the contraction window on large data") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 30.0, 1.0);
    SolveConfig c = base_config(s, 1.0 / 32.0, 4);
    c.params.coeff1 = 1.0;
    c.params.p2 = 3.0;
    c.params.coeff2 = 1.0;
    c.blowup_threshold = 1e12;

    const PicardResult pr = picard_iterate(u0, 0.125, 9, c);
    CHECK(pr.contraction_window_violation);
}

TEST_CASE("trace csv layout") {
    const GridSpec s = make_spec(65, 64, 8.0, 8.0);
    const GridFunction u0 = gaussian_data(s, 0.5, 1.0);
    SolveConfig c = base_config(s, 1.0 / 16.0, 5);
    const SolveResult r = solve(u0, c);
    const std::string path = "/tmp/grushin_test_trace.csv";
    write_trace_csv(r.trace, path);

    FILE* f = std::fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    char line[512];
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
    CHECK(std::string(line) == "t,sup_norm,lq_norm,weighted_norm_1,weighted_norm_2,status\n");
    int rows = 0;
    bool all_completed = true;
    while (std::fgets(line, sizeof line, f)) {
        ++rows;
        all_completed = all_completed && std::string(line).find("completed") != std::string::npos;
    }
    std::fclose(f);
    CHECK(rows == 6);
    CHECK(all_completed);
    std::remove(path.c_str());
}
