#pragma once

#include <string>
#include <vector>

#include "grushin/solver.hpp"

namespace grushin {

/**
 * Scan the (p1, p2) plane with a fixed data profile and per-cell budget.
 * Each cell runs one solve; cells that cross the blow-up threshold are
 * re-run at dt/2 and at 1.5x grid resolution, and the blow-up label is kept
 * only when the crossing-time estimates agree within 10 percent, otherwise
 * the cell is demoted to inconclusive.  Cells are independent and run in a
 * dynamically scheduled parallel loop.
 */
struct PhaseScanConfig {
    SolveConfig base;          // params.p1/p2 overwritten per cell
    ProfileSpec profile;
    double p1_min = 2.0, p1_max = 3.0;
    int p1_cells = 3;
    double p2_min = 1.5, p2_max = 2.5;
    int p2_cells = 3;
    bool refine_blowup = true;
    double stability_rtol = 0.10;
};

struct PhaseCell {
    double p1 = 0.0, p2 = 0.0;
    SolveStatus status = SolveStatus::completed;
    bool inconclusive = false;  // blow-up label failed the refinement-stability rule
    double t_max_estimate = std::numeric_limits<double>::infinity();
    double max_sup_norm = 0.0;
    // Crossing times of the two refinement runs (blow-up cells only; NaN otherwise).
    double t_max_half_dt = std::numeric_limits<double>::quiet_NaN();
    double t_max_fine_grid = std::numeric_limits<double>::quiet_NaN();
};

struct PhaseScanResult {
    std::vector<PhaseCell> cells;  // row-major over (p1 index, p2 index)
    int completed = 0, blowup_stable = 0, inconclusive = 0, aborted = 0;
};

PhaseScanResult phase_scan(const PhaseScanConfig& config);

// Status code used in CSV exports: 0 completed, 1 blow-up, 2 non-finite
// abort, 3 inconclusive.
int phase_status_code(const PhaseCell& cell);

void write_phase_csv(const PhaseScanResult& r, const std::string& path);

/**
 * The threshold curves bounding the global-existence regions, sampled over
 * [p1_min, p1_max] for overlay plotting: the constant thresholds p1_star,
 * p2_star, p2_star_star and the critical line p2_tilde(p1).
 */
void write_overlay_csv(const GrushinDims& dims, double gamma,
                       double p1_min, double p1_max, int samples, const std::string& path);

}  // namespace grushin
