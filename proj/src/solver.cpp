#include "grushin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>

namespace grushin {

const char* to_string(Scheme s) {
    return s == Scheme::exp_euler ? "expEuler" : "predictorCorrector";
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::completed: return "completed";
        case SolveStatus::blowup_detected: return "blowup_detected";
        case SolveStatus::nan_abort: return "nan_abort";
    }
    return "nan_abort";
}

void SolveConfig::validate() const {
    grid.validate();
    time.validate();
    params.validate();
    if (!(q >= 1.0)) throw std::invalid_argument("q must be >= 1");
    if (!(blowup_threshold > 0.0)) throw std::invalid_argument("blowup_threshold must be > 0");
    if (checkpoint_stride < 1) throw std::invalid_argument("checkpoint_stride must be >= 1");
    if (ball_radius_factor < 0.0) throw std::invalid_argument("ball_radius_factor must be >= 0");
}

namespace {

constexpr double kHomDim = 3.0;  // homogeneous dimension for N = k = 1

std::vector<double> eval_field(const NonlinearitySpec& f, const std::vector<double>& u) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
    std::vector<double> out(u.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f.eval(u[i]);
    return out;
}

struct NormTracker {
    double q, r1, r2, alpha1, alpha2;

    NormTracker(const SolveConfig& cfg) {
        q = cfg.q;
        r1 = cfg.params.p1 * q;
        r2 = cfg.params.p2 * q;
        alpha1 = kHomDim * (cfg.params.p1 - 1.0) / (2.0 * cfg.params.p1 * q);
        alpha2 = kHomDim * (cfg.params.p2 - 1.0) / (2.0 * cfg.params.p2 * q);
    }

    void record(SolveTrace& tr, double t, const GridFunction& u, bool finite) const {
        tr.times.push_back(t);
        if (!finite) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            tr.sup_norms.push_back(nan);
            tr.lq_norms.push_back(nan);
            tr.weighted_norm_1.push_back(nan);
            tr.weighted_norm_2.push_back(nan);
            return;
        }
        tr.sup_norms.push_back(lp_norm(u, norm_sup));
        tr.lq_norms.push_back(lp_norm(u, q));
        tr.weighted_norm_1.push_back(std::pow(t, alpha1) * lp_norm(u, r1));
        tr.weighted_norm_2.push_back(std::pow(t, alpha2) * lp_norm(u, r2));
    }
};

}  // namespace

GridFunction nonlinear_term(const GridFunction& u, double p) {
    GridFunction out;
    out.spec = u.spec;
    out.values = eval_field(NonlinearitySpec::power(p), u.values);
    return out;
}

GridFunction nonlinear_term_serial(const GridFunction& u, double p) {
    GridFunction out;
    out.spec = u.spec;
    out.values.resize(u.values.size());
    for (std::size_t i = 0; i < u.values.size(); ++i)
        out.values[i] = std::copysign(std::pow(std::abs(u.values[i]), p), u.values[i]);
    return out;
}

SolveResult march(const GridFunction& u0, const SolveConfig& config,
                  const NonlinearitySpec& f_memory, const NonlinearitySpec& g_instant,
                  bool keep_states) {
    config.validate();
    f_memory.validate();
    g_instant.validate();
    if (u0.spec != config.grid) throw std::invalid_argument("initial state grid mismatch");
    if (!u0.all_finite()) throw std::invalid_argument("initial state not finite");
    if (!(config.blowup_threshold > lp_norm(u0, norm_sup)))
        throw std::invalid_argument("blowup_threshold must exceed the initial sup norm");

    const int steps = config.time.steps;
    const double dt = config.time.dt;
    const double k1 = config.params.coeff1;
    const double k2 = config.params.coeff2;
    const bool use_mem = k1 != 0.0;
    const std::size_t len = u0.values.size();

    SemigroupOperator op(config.grid, dt);
    MemoryWeights weights(config.params.gamma, dt, steps);
    const NormTracker norms(config);

    SolveResult res;
    res.trace.grid_resolution_warning = op.time_below_grid_resolution();
    res.final_state = u0;

    std::vector<std::vector<double>> g1_history;  // f_memory(u^j), kept per level
    if (use_mem) {
        g1_history.reserve(steps + 1);
        g1_history.push_back(eval_field(f_memory, u0.values));
    }

    // F^n = k1 * sum_{j<=n} w(n,j) g1_history[j] + k2 * g_instant(u^n).
    auto build_rhs = [&](int n, const GridFunction& u, std::vector<double>& out) {
        out.assign(len, 0.0);
        if (use_mem && n >= 1) {
            fractional_integral_fields(g1_history, weights, n, out);
            if (k1 != 1.0) {
                const std::ptrdiff_t plen = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static)
                for (std::ptrdiff_t p = 0; p < plen; ++p) out[p] *= k1;
            }
        }
        if (k2 != 0.0) {
            const std::vector<double> gi = eval_field(g_instant, u.values);
            const std::ptrdiff_t plen = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t p = 0; p < plen; ++p) out[p] += k2 * gi[p];
        }
    };

    GridFunction u = u0;
    norms.record(res.trace, 0.0, u, true);
    const double lq0 = res.trace.lq_norms.back();
    if (keep_states) {
        res.states.push_back(u);
        res.state_times.push_back(0.0);
    }

    std::vector<double> rhs, rhs_star;
    GridFunction stage = GridFunction::zeros(config.grid);

    for (int n = 0; n < steps; ++n) {
        build_rhs(n, u, rhs);

        GridFunction next;
        if (config.scheme == Scheme::exp_euler) {
            const std::ptrdiff_t plen = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t p = 0; p < plen; ++p)
                stage.values[p] = u.values[p] + dt * rhs[p];
            next = op.apply(stage);
        } else {
            // Predictor: exponential Euler endpoint.
            const std::ptrdiff_t plen = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t p = 0; p < plen; ++p)
                stage.values[p] = u.values[p] + dt * rhs[p];
            GridFunction pred = op.apply(stage);

            // Corrector: exponential trapezoid with F re-evaluated at the
            // predicted endpoint (provisional memory level included).
            if (use_mem) g1_history.push_back(eval_field(f_memory, pred.values));
            build_rhs(n + 1, pred, rhs_star);
            if (use_mem) g1_history.pop_back();

#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t p = 0; p < plen; ++p)
                stage.values[p] = u.values[p] + 0.5 * dt * rhs[p];
            next = op.apply(stage);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t p = 0; p < plen; ++p)
                next.values[p] += 0.5 * dt * rhs_star[p];
        }

        const double t_next = (n + 1) * dt;
        const bool finite = next.all_finite();
        norms.record(res.trace, t_next, next, finite);

        if (!finite) {
            res.trace.status = SolveStatus::nan_abort;
            res.trace.t_max_estimate = t_next;
            break;  // final_state stays at the last finite level
        }

        u = std::move(next);
        res.final_state = u;
        if (use_mem) g1_history.push_back(eval_field(f_memory, u.values));

        if (config.ball_radius_factor > 0.0 && !res.trace.ball_exited &&
            res.trace.lq_norms.back() > config.ball_radius_factor * lq0) {
            res.trace.ball_exited = true;
            res.trace.ball_exit_time = t_next;
        }

        const bool checkpoint = ((n + 1) % config.checkpoint_stride == 0) || (n + 1 == steps);
        if (keep_states && checkpoint) {
            res.states.push_back(u);
            res.state_times.push_back(t_next);
        }

        if (res.trace.sup_norms.back() >= config.blowup_threshold) {
            res.trace.status = SolveStatus::blowup_detected;
            res.trace.t_max_estimate = t_next;
            if (keep_states && !checkpoint) {
                res.states.push_back(u);
                res.state_times.push_back(t_next);
            }
            break;
        }
    }
    return res;
}

SolveResult solve(const GridFunction& u0, const SolveConfig& config, bool keep_states) {
    return march(u0, config, NonlinearitySpec::power(config.params.p1),
                 NonlinearitySpec::power(config.params.p2), keep_states);
}

std::vector<GridFunction> apply_solution_operator(const GridFunction& u0,
                                                  const std::vector<GridFunction>& w,
                                                  const SolveConfig& config,
                                                  const NonlinearitySpec& f_memory,
                                                  const NonlinearitySpec& g_instant) {
    config.validate();
    const int steps = config.time.steps;
    if (w.size() != static_cast<std::size_t>(steps) + 1)
        throw std::invalid_argument("trajectory must have steps+1 levels");
    for (const auto& wn : w)
        if (wn.spec != config.grid) throw std::invalid_argument("trajectory grid mismatch");
    if (u0.spec != config.grid) throw std::invalid_argument("initial state grid mismatch");

    const double dt = config.time.dt;
    const double k1 = config.params.coeff1;
    const double k2 = config.params.coeff2;
    const bool use_mem = k1 != 0.0;
    const std::size_t len = u0.values.size();

    SemigroupOperator op(config.grid, dt);
    MemoryWeights weights(config.params.gamma, dt, steps);

    std::vector<std::vector<double>> g1_history;
    if (use_mem) {
        g1_history.reserve(steps + 1);
        for (const auto& wn : w) g1_history.push_back(eval_field(f_memory, wn.values));
    }

    auto build_rhs = [&](int n, std::vector<double>& out) {
        out.assign(len, 0.0);
        if (use_mem && n >= 1) {
            fractional_integral_fields(g1_history, weights, n, out);
            if (k1 != 1.0) {
                const std::ptrdiff_t plen = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static)
                for (std::ptrdiff_t p = 0; p < plen; ++p) out[p] *= k1;
            }
        }
        if (k2 != 0.0) {
            const std::vector<double> gi = eval_field(g_instant, w[n].values);
            const std::ptrdiff_t plen = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t p = 0; p < plen; ++p) out[p] += k2 * gi[p];
        }
    };

    std::vector<GridFunction> out;
    out.reserve(steps + 1);
    out.push_back(u0);
    GridFunction cur = u0;
    GridFunction stage = GridFunction::zeros(config.grid);
    std::vector<double> rhs;
    for (int n = 0; n < steps; ++n) {
        build_rhs(n, rhs);
        const std::ptrdiff_t plen = static_cast<std::ptrdiff_t>(len);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t p = 0; p < plen; ++p)
            stage.values[p] = cur.values[p] + dt * rhs[p];
        cur = op.apply(stage);
        out.push_back(cur);
    }
    return out;
}

PicardResult picard_iterate(const GridFunction& u0, double T, int iterations,
                            const SolveConfig& config) {
    if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
    if (iterations < 2) throw std::invalid_argument("need at least 2 iterations");
    SolveConfig cfg = config;
    cfg.time.steps = std::max(1, static_cast<int>(std::lround(T / cfg.time.dt)));
    cfg.validate();
    if (u0.spec != cfg.grid) throw std::invalid_argument("initial state grid mismatch");

    const int steps = cfg.time.steps;
    const NonlinearitySpec f = NonlinearitySpec::power(cfg.params.p1);
    const NonlinearitySpec g = NonlinearitySpec::power(cfg.params.p2);
    const NormTracker norms(cfg);

    // First iterate: the free evolution sampled on the time grid.
    std::vector<GridFunction> prev;
    prev.reserve(steps + 1);
    prev.push_back(u0);
    {
        SemigroupOperator op(cfg.grid, cfg.time.dt);
        for (int n = 0; n < steps; ++n) prev.push_back(op.apply(prev.back()));
    }

    PicardResult res;
    int rises = 0;
    for (int k = 2; k <= iterations; ++k) {
        std::vector<GridFunction> next = apply_solution_operator(u0, prev, cfg, f, g);

        // d(u_k, u_{k-1}) = max_i sup_n t_n^{alpha_i} ||diff(t_n)||_{r_i}.
        double dist = 0.0;
        bool finite = true;
        for (int n = 0; n <= steps; ++n) {
            GridFunction diff;
            diff.spec = cfg.grid;
            diff.values.resize(next[n].values.size());
            for (std::size_t p = 0; p < diff.values.size(); ++p)
                diff.values[p] = next[n].values[p] - prev[n].values[p];
            if (!diff.all_finite()) {
                finite = false;
                break;
            }
            const double t = n * cfg.time.dt;
            const double d1 = std::pow(t, norms.alpha1) * lp_norm(diff, norms.r1);
            const double d2 = std::pow(t, norms.alpha2) * lp_norm(diff, norms.r2);
            dist = std::max({dist, d1, d2});
        }
        if (!finite) {
            res.distances.push_back(std::numeric_limits<double>::quiet_NaN());
            res.contraction_window_violation = true;
            break;
        }
        res.distances.push_back(dist);
        const std::size_t m = res.distances.size();
        if (m >= 2 && res.distances[m - 1] > res.distances[m - 2]) {
            if (++rises >= 3) res.contraction_window_violation = true;
        } else {
            rises = 0;
        }
        prev = std::move(next);
    }

    res.iterate_states = std::move(prev);
    res.state_times.resize(steps + 1);
    for (int n = 0; n <= steps; ++n) res.state_times[n] = n * cfg.time.dt;
    res.final_state = res.iterate_states.back();
    return res;
}

double residual_check_march(const SolveResult& run, const SolveConfig& config,
                            const NonlinearitySpec& f_memory, const NonlinearitySpec& g_instant) {
    config.validate();
    const std::size_t levels = run.states.size();
    if (levels < 2) throw std::invalid_argument("run must keep states at stride 1");
    const double dt = config.time.dt;
    for (std::size_t n = 0; n < levels; ++n) {
        if (std::abs(run.state_times[n] - n * dt) > 1e-12 * std::max(1.0, n * dt))
            throw std::invalid_argument("run must keep states at stride 1");
    }

    const int nfine = 2 * (static_cast<int>(levels) - 1);
    const double hdt = 0.5 * dt;
    const std::size_t len = run.states[0].values.size();

    // States and nonlinearity levels on the twice-finer grid, linear
    // interpolation at half steps.
    std::vector<std::vector<double>> fine(nfine + 1);
    for (int j = 0; j <= nfine; ++j) {
        if (j % 2 == 0) {
            fine[j] = run.states[j / 2].values;
        } else {
            const auto& a = run.states[j / 2].values;
            const auto& b = run.states[j / 2 + 1].values;
            fine[j].resize(len);
            for (std::size_t p = 0; p < len; ++p) fine[j][p] = 0.5 * (a[p] + b[p]);
        }
    }

    const double k1 = config.params.coeff1;
    const double k2 = config.params.coeff2;
    const bool use_mem = k1 != 0.0;
    MemoryWeights weights(config.params.gamma, hdt, nfine);
    std::vector<std::vector<double>> g1_fine;
    if (use_mem) {
        g1_fine.reserve(nfine + 1);
        for (int j = 0; j <= nfine; ++j)
            g1_fine.push_back(eval_field(f_memory, fine[j]));
    }

    auto rhs_at = [&](int j, std::vector<double>& out) {
        out.assign(len, 0.0);
        if (use_mem && j >= 1) {
            fractional_integral_fields(g1_fine, weights, j, out);
            if (k1 != 1.0)
                for (std::size_t p = 0; p < len; ++p) out[p] *= k1;
        }
        if (k2 != 0.0) {
            std::vector<double> gi = eval_field(g_instant, fine[j]);
            for (std::size_t p = 0; p < len; ++p) out[p] += k2 * gi[p];
        }
    };

    SemigroupOperator op(config.grid, hdt);

    // Exponential-trapezoid Duhamel accumulation on the fine grid:
    //   I_{j+1} = A (I_j + (hdt/2) F_j) + (hdt/2) F_{j+1},  A = S(hdt),
    // alongside the exactly-propagated linear part A^j u0.
    GridFunction integral_part = GridFunction::zeros(config.grid);
    GridFunction linear_part = run.states[0];
    GridFunction stage = GridFunction::zeros(config.grid);
    std::vector<double> f_cur, f_next;
    rhs_at(0, f_cur);

    double worst = 0.0;
    for (int j = 0; j < nfine; ++j) {
        for (std::size_t p = 0; p < len; ++p)
            stage.values[p] = integral_part.values[p] + 0.5 * hdt * f_cur[p];
        integral_part = op.apply(stage);
        rhs_at(j + 1, f_next);
        for (std::size_t p = 0; p < len; ++p)
            integral_part.values[p] += 0.5 * hdt * f_next[p];
        linear_part = op.apply(linear_part);
        f_cur.swap(f_next);

        if ((j + 1) % 2 == 0) {
            const auto& coarse = run.states[(j + 1) / 2].values;
            double m = 0.0;
            for (std::size_t p = 0; p < len; ++p) {
                const double r =
                    std::abs(coarse[p] - linear_part.values[p] - integral_part.values[p]);
                m = std::max(m, r);
            }
            worst = std::max(worst, m);
        }
    }
    return worst;
}

double residual_check(const SolveResult& run, const SolveConfig& config) {
    return residual_check_march(run, config, NonlinearitySpec::power(config.params.p1),
                                NonlinearitySpec::power(config.params.p2));
}

void write_trace_csv(const SolveTrace& trace, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "t,sup_norm,lq_norm,weighted_norm_1,weighted_norm_2,status\n";
    os.precision(17);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        os << trace.times[i] << ',' << trace.sup_norms[i] << ',' << trace.lq_norms[i] << ','
           << trace.weighted_norm_1[i] << ',' << trace.weighted_norm_2[i] << ','
           << to_string(trace.status) << '\n';
    }
    if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace grushin
