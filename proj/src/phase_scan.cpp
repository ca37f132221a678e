#include "grushin/phase_scan.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "grushin/exponents.hpp"

namespace grushin {

namespace {

PhaseCell run_cell(const PhaseScanConfig& config, double p1, double p2) {
    PhaseCell cell;
    cell.p1 = p1;
    cell.p2 = p2;

    SolveConfig cfg = config.base;
    cfg.params.p1 = p1;
    cfg.params.p2 = p2;
    cfg.validate();
    const GridFunction u0 = sample_function(cfg.grid, config.profile);

    const SolveResult run = solve(u0, cfg);
    cell.status = run.trace.status;
    cell.t_max_estimate = run.trace.t_max_estimate;
    for (double s : run.trace.sup_norms)
        if (std::isfinite(s)) cell.max_sup_norm = std::max(cell.max_sup_norm, s);

    if (cell.status == SolveStatus::blowup_detected && config.refine_blowup) {
        // Refinement-stability rule: the crossing-time estimate must agree
        // under dt halving and a 1.5x finer grid, else the label is demoted.
        SolveConfig half = cfg;
        half.time.dt = 0.5 * cfg.time.dt;
        half.time.steps = 2 * cfg.time.steps;
        const SolveResult run_half = solve(sample_function(half.grid, config.profile), half);
        cell.t_max_half_dt = run_half.trace.t_max_estimate;

        SolveConfig fine = cfg;
        fine.grid.nx = (3 * (cfg.grid.nx - 1)) / 2 + 1;
        fine.grid.ny = ((3 * cfg.grid.ny / 2) / 2) * 2;  // keep ny even
        const SolveResult run_fine = solve(sample_function(fine.grid, config.profile), fine);
        cell.t_max_fine_grid = run_fine.trace.t_max_estimate;

        const double t0 = cell.t_max_estimate;
        const bool half_ok = run_half.trace.status == SolveStatus::blowup_detected &&
                             std::abs(cell.t_max_half_dt - t0) <= config.stability_rtol * t0;
        const bool fine_ok = run_fine.trace.status == SolveStatus::blowup_detected &&
                             std::abs(cell.t_max_fine_grid - t0) <= config.stability_rtol * t0;
        cell.inconclusive = !(half_ok && fine_ok);
    }
    return cell;
}

}  // namespace

PhaseScanResult phase_scan(const PhaseScanConfig& config) {
    if (config.p1_cells < 1 || config.p2_cells < 1)
        throw std::invalid_argument("cell counts must be >= 1");
    if (!(config.p1_min > 1.0) || !(config.p2_min > 1.0))
        throw std::invalid_argument("exponents must be > 1");
    if (!(config.p1_max >= config.p1_min) || !(config.p2_max >= config.p2_min))
        throw std::invalid_argument("exponent ranges must be nonempty");
    if (!(config.stability_rtol > 0.0))
        throw std::invalid_argument("stability_rtol must be > 0");

    const int n1 = config.p1_cells, n2 = config.p2_cells;
    auto p1_of = [&](int a) {
        return n1 == 1 ? config.p1_min
                       : config.p1_min + (config.p1_max - config.p1_min) * a / (n1 - 1);
    };
    auto p2_of = [&](int b) {
        return n2 == 1 ? config.p2_min
                       : config.p2_min + (config.p2_max - config.p2_min) * b / (n2 - 1);
    };

    PhaseScanResult res;
    res.cells.resize(static_cast<std::size_t>(n1) * n2);
    // Cells are fully independent; the inner solves are already parallel,
    // so dynamic scheduling here only helps when threads outnumber the
    // per-solve parallelism.
#pragma omp parallel for schedule(dynamic) collapse(2)
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n2; ++b)
            res.cells[static_cast<std::size_t>(a) * n2 + b] = run_cell(config, p1_of(a), p2_of(b));

    for (const PhaseCell& c : res.cells) {
        if (c.status == SolveStatus::completed)
            ++res.completed;
        else if (c.status == SolveStatus::nan_abort)
            ++res.aborted;
        else if (c.inconclusive)
            ++res.inconclusive;
        else
            ++res.blowup_stable;
    }
    return res;
}

int phase_status_code(const PhaseCell& cell) {
    if (cell.status == SolveStatus::completed) return 0;
    if (cell.status == SolveStatus::nan_abort) return 2;
    return cell.inconclusive ? 3 : 1;
}

void write_phase_csv(const PhaseScanResult& r, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "p1,p2,status_code,status,t_max_estimate,max_sup_norm\n";
    os.precision(17);
    for (const PhaseCell& c : r.cells) {
        os << c.p1 << ',' << c.p2 << ',' << phase_status_code(c) << ','
           << (phase_status_code(c) == 3 ? "inconclusive" : to_string(c.status)) << ',';
        if (std::isfinite(c.t_max_estimate))
            os << c.t_max_estimate;
        else
            os << "+inf";
        os << ',' << c.max_sup_norm << '\n';
    }
    if (!os) throw std::runtime_error("short write to " + path);
}

void write_overlay_csv(const GrushinDims& dims, double gamma,
                       double p1_min, double p1_max, int samples, const std::string& path) {
    if (samples < 2) throw std::invalid_argument("samples must be >= 2");
    if (!(p1_max > p1_min) || !(p1_min > 1.0))
        throw std::invalid_argument("p1 range must satisfy 1 < p1_min < p1_max");
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "p1,p1_star,p2_star,p2_star_star,p2_tilde\n";
    os.precision(17);
    for (int s = 0; s < samples; ++s) {
        ProblemParams params;
        params.gamma = gamma;
        params.p1 = p1_min + (p1_max - p1_min) * s / (samples - 1);
        params.p2 = 2.0;  // p2 enters none of the exported curves
        const ExponentReport rep = critical_exponents(dims, params);
        os << params.p1 << ',' << rep.p1_star << ',' << rep.p2_star << ',' << rep.p2_star_star
           << ',' << rep.p2_tilde << '\n';
    }
    if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace grushin
