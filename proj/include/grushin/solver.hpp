#pragma once

#include <limits>
#include <string>
#include <vector>

#include "grushin/exponents.hpp"
#include "grushin/grid.hpp"
#include "grushin/memory_kernel.hpp"
#include "grushin/nonlinearity.hpp"
#include "grushin/semigroup.hpp"

namespace grushin {

enum class Scheme { exp_euler, predictor_corrector };
enum class SolveStatus { completed, blowup_detected, nan_abort };

const char* to_string(Scheme s);
const char* to_string(SolveStatus s);

struct SolveConfig {
    GridSpec grid;
    TimeGrid time;
    ProblemParams params;
    double q = 2.0;                  // Lebesgue index tracked in the trace
    double blowup_threshold = 1e6;
    int checkpoint_stride = 1;
    Scheme scheme = Scheme::exp_euler;
    // Optional diagnostic: flag when sup_t ||u||_q exceeds this multiple of
    // ||u0||_q (the fixed-point ball the local theory works in); 0 disables.
    double ball_radius_factor = 0.0;

    void validate() const;
};

/**
 * Norm history of a run.  weighted_norm_i is t^{alpha_i} ||u(t)||_{r_i} with
 * r_i = p_i q and alpha_i = Q (p_i - 1) / (2 p_i q), the weighted norms in
 * which the fixed-point argument contracts.  t_max_estimate is +infinity
 * for completed runs and the threshold-crossing time for detected blow-up.
 */
struct SolveTrace {
    std::vector<double> times, sup_norms, lq_norms, weighted_norm_1, weighted_norm_2;
    SolveStatus status = SolveStatus::completed;
    double t_max_estimate = std::numeric_limits<double>::infinity();
    bool grid_resolution_warning = false;  // dt below the mesh scale hx^2
    bool ball_exited = false;
    double ball_exit_time = std::numeric_limits<double>::infinity();
};

struct SolveResult {
    GridFunction final_state;
    SolveTrace trace;
    // States at checkpoint times (always includes t = 0 when kept).
    std::vector<GridFunction> states;
    std::vector<double> state_times;
};

// Pointwise |u|^{p-1} u.  The serial variant is the testing reference.
GridFunction nonlinear_term(const GridFunction& u, double p);
GridFunction nonlinear_term_serial(const GridFunction& u, double p);

/**
 * March the Duhamel form of the problem with exponential Euler steps:
 *
 *   u^{n+1} = S(dt) [ u^n + dt F^n ],
 *   F^n = k1 * sum_{j<=n} w(n,j) G1^j + k2 * g(u^n),   G1^j = f(u^j),
 *
 * where f, g default to the power laws of config.params and w are the
 * product-integration weights.  The linear part is propagated exactly by
 * the cached semigroup, so k1 = k2 = 0 marches reproduce S(n dt) u0 to
 * rounding.  predictor_corrector re-evaluates F at the predicted endpoint
 * and averages (exponential trapezoid), raising the order to two.
 *
 * The full nonlinearity history G1^j is retained (O(steps) fields), making
 * the memory integral a per-point weighted sum.  Blow-up is declared when
 * the sup norm crosses config.blowup_threshold; non-finite values abort
 * with the last finite checkpoint as the final state.
 */
SolveResult solve(const GridFunction& u0, const SolveConfig& config, bool keep_states = false);

// Same march with explicit nonlinearities (comparison experiments).
SolveResult march(const GridFunction& u0, const SolveConfig& config,
                  const NonlinearitySpec& f_memory, const NonlinearitySpec& g_instant,
                  bool keep_states = false);

/**
 * The discrete solution operator Lambda: given a trajectory w at every step
 * of the time grid, returns the Duhamel right side evaluated with the same
 * rectangle rule as the march,
 *
 *   Lambda(w)[n] = S(dt)^n u0 + sum_{j<n} S(dt)^{n-j} dt F_j(w).
 *
 * The march trajectory is its exact fixed point up to rounding.
 */
std::vector<GridFunction> apply_solution_operator(const GridFunction& u0,
                                                  const std::vector<GridFunction>& w,
                                                  const SolveConfig& config,
                                                  const NonlinearitySpec& f_memory,
                                                  const NonlinearitySpec& g_instant);

/**
 * Picard iteration u_1(t) = S(t) u0, u_k = Lambda(u_{k-1}).  distances[k-2]
 * is d(u_k, u_{k-1}) = max_i sup_n t_n^{alpha_i} ||u_k - u_{k-1}||_{r_i}
 * for k = 2, 3, ...; the fixed-point argument makes successive ratios
 * contract inside the local window.  Divergence (three consecutive
 * increases, or non-finite distances) sets the violation flag.
 */
struct PicardResult {
    std::vector<double> distances;
    bool contraction_window_violation = false;
    GridFunction final_state;                // last iterate at t = T
    std::vector<GridFunction> iterate_states;  // last iterate at every step
    std::vector<double> state_times;
};

PicardResult picard_iterate(const GridFunction& u0, double T, int iterations,
                            const SolveConfig& config);

/**
 * Residual of the integral equation: re-evaluates the Duhamel right side on
 * a twice-finer time grid (trapezoid in s, re-built memory weights at dt/2,
 * states interpolated linearly to half steps) and returns
 * max_n || u(t_n) - Lambda_fine(u)(t_n) ||_sup over the stored states.
 * Requires a run kept at checkpoint_stride 1.
 */
double residual_check(const SolveResult& run, const SolveConfig& config);
double residual_check_march(const SolveResult& run, const SolveConfig& config,
                            const NonlinearitySpec& f_memory, const NonlinearitySpec& g_instant);

void write_trace_csv(const SolveTrace& trace, const std::string& path);

}  // namespace grushin
