#include "grushin/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grushin {

namespace {

// Rounding noise of the transform route scales with the state magnitude;
// this sets the per-unit tolerance of the ordering verdicts.
constexpr double kOrderTolPerUnit = 1e-10;

struct MinLoc {
    double value;
    int ix, iy;
};

MinLoc field_min(const GridFunction& u) {
    MinLoc m{u.values.empty() ? 0.0 : u.values[0], 0, 0};
    for (int i = 0; i < u.spec.nx; ++i)
        for (int j = 0; j < u.spec.ny; ++j)
            if (u.at(i, j) < m.value) m = {u.at(i, j), i, j};
    return m;
}

}  // namespace

OrderingReport compare_solutions(const GridFunction& u0, const GridFunction& v0,
                                 const NonlinearitySpec& f, const NonlinearitySpec& g,
                                 const NonlinearitySpec& f_tilde, const NonlinearitySpec& g_tilde,
                                 double T, const SolveConfig& config, double state_range_hint) {
    if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
    if (u0.spec != v0.spec) throw std::invalid_argument("data grids differ");
    if (config.params.coeff1 < 0.0 || config.params.coeff2 < 0.0)
        throw std::invalid_argument("ordered comparison needs k1, k2 >= 0");

    // Precondition sampling before any solving: 0 <= u0 <= v0 and the
    // nonlinearity pairs ordered on the expected state range.
    double v_sup = 0.0;
    for (std::size_t p = 0; p < u0.values.size(); ++p) {
        if (u0.values[p] < 0.0) throw std::invalid_argument("u0 must be nonnegative");
        if (u0.values[p] > v0.values[p]) throw std::invalid_argument("u0 must be <= v0");
        v_sup = std::max(v_sup, std::abs(v0.values[p]));
    }
    const double range = state_range_hint > 0.0 ? state_range_hint : 4.0 * std::max(v_sup, 1e-30);
    if (!dominated_on_range(f, f_tilde, range))
        throw std::invalid_argument("memory nonlinearities not ordered on the state range");
    if (!dominated_on_range(g, g_tilde, range))
        throw std::invalid_argument("instantaneous nonlinearities not ordered on the state range");

    SolveConfig cfg = config;
    cfg.time.steps = std::max(1, static_cast<int>(std::lround(T / cfg.time.dt)));
    const SolveResult ru = march(u0, cfg, f, g, true);
    const SolveResult rv = march(v0, cfg, f_tilde, g_tilde, true);

    OrderingReport rep;
    rep.status_u = ru.trace.status;
    rep.status_v = rv.trace.status;

    double sup_seen = 0.0;
    for (double s : ru.trace.sup_norms)
        if (std::isfinite(s)) sup_seen = std::max(sup_seen, s);
    for (double s : rv.trace.sup_norms)
        if (std::isfinite(s)) sup_seen = std::max(sup_seen, s);
    rep.tolerance = kOrderTolPerUnit * std::max(sup_seen, 1.0);
    rep.range_respected = sup_seen <= range;

    const std::size_t levels = std::min(ru.states.size(), rv.states.size());
    rep.min_defect = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < levels; ++n) {
        const GridFunction& a = ru.states[n];
        const GridFunction& b = rv.states[n];
        for (int i = 0; i < a.spec.nx; ++i) {
            for (int j = 0; j < a.spec.ny; ++j) {
                const double d = b.at(i, j) - a.at(i, j);
                if (d < rep.min_defect) {
                    rep.min_defect = d;
                    rep.argmin_t = ru.state_times[n];
                    rep.argmin_ix = i;
                    rep.argmin_iy = j;
                }
                if (d < -rep.tolerance) ++rep.violation_count;
            }
        }
    }
    if (levels == 0) rep.min_defect = 0.0;
    rep.passed = rep.violation_count == 0;
    return rep;
}

SupersolutionReport supersolution_check(const std::vector<GridFunction>& v_states,
                                        const GridFunction& u0, const SolveConfig& config,
                                        const NonlinearitySpec& f, const NonlinearitySpec& g,
                                        int descent_iterations) {
    config.validate();
    if (v_states.size() != static_cast<std::size_t>(config.time.steps) + 1)
        throw std::invalid_argument("supersolution trajectory must cover every step");
    if (descent_iterations < 1) throw std::invalid_argument("descent_iterations must be >= 1");
    if (u0.spec != config.grid) throw std::invalid_argument("initial state grid mismatch");
    for (const auto& v : v_states)
        if (v.spec != config.grid) throw std::invalid_argument("trajectory grid mismatch");
    for (std::size_t p = 0; p < u0.values.size(); ++p)
        if (v_states[0].values[p] < u0.values[p])
            throw std::invalid_argument("supersolution must start above the initial data");

    SupersolutionReport rep;
    double scale = 1.0;
    for (const auto& v : v_states)
        scale = std::max(scale, lp_norm(v, norm_sup));
    rep.tolerance = kOrderTolPerUnit * scale;

    // Defect of the supersolution inequality v >= Lambda(v), with Lambda
    // anchored at the solution's initial data u0.
    const std::vector<GridFunction> lam =
        apply_solution_operator(u0, v_states, config, f, g);
    rep.worst_defect = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < v_states.size(); ++n) {
        GridFunction diff = v_states[n];
        for (std::size_t p = 0; p < diff.values.size(); ++p)
            diff.values[p] -= lam[n].values[p];
        const MinLoc m = field_min(diff);
        if (m.value < rep.worst_defect) {
            rep.worst_defect = m.value;
            rep.defect_t = n * config.time.dt;
            rep.defect_ix = m.ix;
            rep.defect_iy = m.iy;
        }
    }
    rep.is_supersolution = rep.worst_defect >= -rep.tolerance;
    if (!rep.is_supersolution) return rep;

    // Monotone descent from the supersolution toward the march solution of
    // the u0 problem.
    SolveConfig per_step = config;
    per_step.checkpoint_stride = 1;
    const SolveResult sol = march(u0, per_step, f, g, true);

    std::vector<GridFunction> w = v_states;
    for (int k = 0; k < descent_iterations; ++k) {
        std::vector<GridFunction> next = apply_solution_operator(u0, w, config, f, g);
        double rise = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < w.size(); ++n) {
            for (std::size_t p = 0; p < w[n].values.size(); ++p)
                rise = std::max(rise, next[n].values[p] - w[n].values[p]);
        }
        rep.descent_max_rise.push_back(rise);
        if (rise > rep.tolerance) rep.descent_monotone = false;
        w = std::move(next);
    }

    rep.min_above_solution = std::numeric_limits<double>::infinity();
    const std::size_t levels = std::min(w.size(), sol.states.size());
    for (std::size_t n = 0; n < levels; ++n) {
        for (std::size_t p = 0; p < w[n].values.size(); ++p) {
            rep.min_above_solution =
                std::min(rep.min_above_solution, w[n].values[p] - sol.states[n].values[p]);
        }
    }
    rep.bounded_below_by_solution = rep.min_above_solution >= -rep.tolerance;
    return rep;
}

DominationReport free_domination_check(const GridFunction& u0, double T,
                                       const SolveConfig& config) {
    if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
    if (config.params.coeff1 > 0.0 || config.params.coeff2 > 0.0)
        throw std::invalid_argument("free domination needs k1, k2 <= 0");
    for (double v : u0.values)
        if (v < 0.0) throw std::invalid_argument("u0 must be nonnegative");

    SolveConfig cfg = config;
    cfg.time.steps = std::max(1, static_cast<int>(std::lround(T / cfg.time.dt)));
    const SolveResult run = solve(u0, cfg, true);

    DominationReport rep;
    rep.status = run.trace.status;

    double scale = 1.0;
    for (double s : run.trace.sup_norms)
        if (std::isfinite(s)) scale = std::max(scale, s);
    const double tol = kOrderTolPerUnit * scale;

    // March the free problem with the same operator cache behavior: a
    // zero-coefficient solve reproduces S(n dt) u0 exactly.
    SolveConfig free_cfg = cfg;
    free_cfg.params.coeff1 = 0.0;
    free_cfg.params.coeff2 = 0.0;
    const SolveResult free_run = solve(u0, free_cfg, true);

    rep.worst_defect = std::numeric_limits<double>::infinity();
    rep.min_state = std::numeric_limits<double>::infinity();
    const std::size_t levels = std::min(run.states.size(), free_run.states.size());
    for (std::size_t n = 0; n < levels; ++n) {
        for (std::size_t p = 0; p < run.states[n].values.size(); ++p) {
            const double u = run.states[n].values[p];
            rep.min_state = std::min(rep.min_state, u);
            rep.worst_defect = std::min(rep.worst_defect, free_run.states[n].values[p] - u);
        }
    }
    if (levels == 0) {
        rep.worst_defect = 0.0;
        rep.min_state = 0.0;
    }
    rep.passed = run.trace.status == SolveStatus::completed && rep.worst_defect >= -tol &&
                 rep.min_state >= -tol;
    return rep;
}

}  // namespace grushin
