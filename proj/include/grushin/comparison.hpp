#pragma once

#include "grushin/nonlinearity.hpp"
#include "grushin/solver.hpp"

namespace grushin {

/**
 * Result of an ordering check between two trajectories: the worst value of
 * (v - u) over all checkpoints and grid points, where it occurred, and how
 * many entries fell below -tolerance.  The tolerance scales with the
 * largest sup norm seen, since transform rounding injects noise
 * proportional to magnitude.
 */
struct OrderingReport {
    double min_defect = 0.0;
    double argmin_t = 0.0;
    int argmin_ix = 0, argmin_iy = 0;
    long long violation_count = 0;
    double tolerance = 0.0;
    bool passed = true;
    bool range_respected = true;  // states stayed inside the sampled ordering range
    SolveStatus status_u = SolveStatus::completed, status_v = SolveStatus::completed;
};

/**
 * Comparison of two marches with ordered data and ordered nonlinearities:
 * requires 0 <= u0 <= v0, coefficients k1, k2 >= 0, and f <= f_tilde,
 * g <= g_tilde on [0, state_range_hint] (checked by sampling before any
 * solving; violations throw).  Runs both problems on identical
 * discretizations and reports the ordering defect of v - u.
 * state_range_hint <= 0 defaults to four times the larger initial sup norm.
 */
OrderingReport compare_solutions(const GridFunction& u0, const GridFunction& v0,
                                 const NonlinearitySpec& f, const NonlinearitySpec& g,
                                 const NonlinearitySpec& f_tilde, const NonlinearitySpec& g_tilde,
                                 double T, const SolveConfig& config,
                                 double state_range_hint = 0.0);

/**
 * Supersolution verification for a trajectory v given at every step:
 * v(t_n) >= Lambda(v)(t_n) - tol at each checkpoint, with Lambda the same
 * discrete solution operator the march uses.  When the inequality holds the
 * descent w_1 = v, w_{k+1} = Lambda(w_k) is run; the sequence must be
 * entrywise non-increasing in k and bounded below by the march solution.
 */
struct SupersolutionReport {
    bool is_supersolution = false;
    double worst_defect = 0.0;  // min over checkpoints of min(v - Lambda(v))
    double defect_t = 0.0;
    int defect_ix = 0, defect_iy = 0;
    std::vector<double> descent_max_rise;  // per k, max of (w_{k+1} - w_k); <= tol when monotone
    bool descent_monotone = true;
    double min_above_solution = 0.0;  // min over grid/time of (w_last - u)
    bool bounded_below_by_solution = true;
    double tolerance = 0.0;
};

SupersolutionReport supersolution_check(const std::vector<GridFunction>& v_states,
                                        const GridFunction& u0, const SolveConfig& config,
                                        const NonlinearitySpec& f, const NonlinearitySpec& g,
                                        int descent_iterations = 4);

/**
 * With both coefficients nonpositive and u0 >= 0, the free evolution
 * dominates: S(t_n) u0 - u(t_n) >= -tol and u >= -tol at every checkpoint.
 * The free trajectory is marched with the same operator, so the defect is a
 * purely structural quantity (nonnegative matrices, nonnegative weights).
 */
struct DominationReport {
    double worst_defect = 0.0;  // min over checkpoints of min(S(t) u0 - u)
    double min_state = 0.0;     // min of u over the run
    SolveStatus status = SolveStatus::completed;
    bool passed = true;
};

DominationReport free_domination_check(const GridFunction& u0, double T,
                                       const SolveConfig& config);

}  // namespace grushin
