// Command line driver: experiment configuration, runs, and data export.
//
// Subcommands: exponents, kernel-check, decay-fit, solve, picard, compare,
// phase-scan, export.  Each experiment reads an optional TOML config file,
// applies --set key=value overrides on top, writes a JSON summary embedding
// the resolved configuration, and exits 0 exactly when every in-config
// assertion passed.  Exit codes: 1 failed assertion, 2 invalid config or
// missing input, 3 unexpected blow-up, 4 non-finite abort.
//
// The accepted config subset: "[section]" headers, "key = value" lines with
// quoted strings, numbers, booleans, or flat arrays of numbers, and "#"
// comments.  Keys are flattened to dotted form ("[grid] nx = 65" and
// --set grid.nx=65 address the same entry).

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grushin/comparison.hpp"
#include "grushin/exponents.hpp"
#include "grushin/json_io.hpp"
#include "grushin/kernel.hpp"
#include "grushin/phase_scan.hpp"
#include "grushin/solver.hpp"

using namespace grushin;

namespace {

struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(const std::string& k, const std::string& msg)
        : std::runtime_error(msg), key(k) {}
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

/**
 * Resolved experiment configuration: a flat map from dotted keys to raw
 * value strings.  Values stay textual until a typed getter touches them, so
 * exact fractions like "7/3" survive for the rational classifier.
 */
struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    void set_default(const std::string& key, const std::string& value) {
        kv.emplace(key, value);  // does not overwrite existing entries
    }

    std::string get_string(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError(key, "missing config key");
        return it->second;
    }

    double get_double(const std::string& key) const {
        const std::string raw = get_string(key);
        if (raw == "inf" || raw == "+inf") return std::numeric_limits<double>::infinity();
        // Fractions are accepted anywhere a number is.
        if (const auto r = Rational::parse(raw)) return r->to_double();
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(key, "not a number: '" + raw + "'");
        }
    }

    int get_int(const std::string& key) const {
        const double v = get_double(key);
        const int i = static_cast<int>(std::lround(v));
        if (i != v) throw ConfigError(key, "not an integer: '" + get_string(key) + "'");
        return i;
    }

    bool get_bool(const std::string& key) const {
        const std::string raw = get_string(key);
        if (raw == "true" || raw == "1") return true;
        if (raw == "false" || raw == "0") return false;
        throw ConfigError(key, "not a boolean: '" + raw + "'");
    }

    std::vector<double> get_list(const std::string& key) const {
        const std::string raw = get_string(key);
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError(key, "bad list element: '" + item + "'");
            }
        }
        if (out.empty()) throw ConfigError(key, "empty list");
        return out;
    }
};

std::string parse_toml_value(const std::string& raw, const std::string& key) {
    std::string v = trim(raw);
    if (v.empty()) throw ConfigError(key, "empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ConfigError(key, "unterminated string");
        return v.substr(1, v.size() - 2);
    }
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError(key, "unterminated array");
        std::string inner = v.substr(1, v.size() - 2);
        std::string joined;
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            if (!joined.empty()) joined += ',';
            joined += item;
        }
        return joined;
    }
    return v;
}

void load_toml_file(const std::string& path, Config& cfg) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config", "cannot open config file '" + path + "'");
    std::string line, prefix;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        // Strip comments, respecting quoted strings.
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.erase(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config", "bad section header at line " + std::to_string(lineno));
            prefix = trim(line.substr(1, line.size() - 2));
            if (!prefix.empty()) prefix += '.';
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "expected key = value at line " + std::to_string(lineno));
        const std::string key = prefix + trim(line.substr(0, eq));
        cfg.kv[key] = parse_toml_value(line.substr(eq + 1), key);
    }
}

void apply_overrides(const std::vector<std::string>& sets, Config& cfg) {
    for (const std::string& s : sets) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set", "expected key=value, got '" + s + "'");
        cfg.kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
}

// ---------------------------------------------------------------------------
// Builders from config sections.

GridSpec grid_from(const Config& c) {
    GridSpec s;
    s.nx = c.get_int("grid.nx");
    s.ny = c.get_int("grid.ny");
    s.x_half_width = c.get_double("grid.lx");
    s.y_half_width = c.get_double("grid.ly");
    s.validate();
    return s;
}

ProfileSpec profile_from(const Config& c, const std::string& prefix) {
    ProfileSpec p;
    const std::string kind = c.get_string(prefix + ".kind");
    if (kind == "gaussian")
        p.kind = ProfileSpec::Kind::gaussian;
    else if (kind == "gaussian_x")
        p.kind = ProfileSpec::Kind::gaussian_in_x_only;
    else if (kind == "power_singular")
        p.kind = ProfileSpec::Kind::power_singular;
    else if (kind == "indicator")
        p.kind = ProfileSpec::Kind::indicator_mollified;
    else
        throw ConfigError(prefix + ".kind", "unknown profile kind '" + kind + "'");
    p.amplitude = c.get_double(prefix + ".amplitude");
    p.center_x = c.get_double(prefix + ".center_x");
    p.center_y = c.get_double(prefix + ".center_y");
    p.width_x = c.get_double(prefix + ".width_x");
    p.width_y = c.get_double(prefix + ".width_y");
    p.exponent = c.get_double(prefix + ".exponent");
    p.cutoff_radius = c.get_double(prefix + ".cutoff_radius");
    p.radius = c.get_double(prefix + ".radius");
    p.mollify_width = c.get_double(prefix + ".mollify_width");
    return p;
}

void default_profile(Config& c, const std::string& prefix) {
    c.set_default(prefix + ".kind", "gaussian");
    c.set_default(prefix + ".amplitude", "1");
    c.set_default(prefix + ".center_x", "0");
    c.set_default(prefix + ".center_y", "0");
    c.set_default(prefix + ".width_x", "1.2");
    c.set_default(prefix + ".width_y", "1.2");
    c.set_default(prefix + ".exponent", "1");
    c.set_default(prefix + ".cutoff_radius", "4");
    c.set_default(prefix + ".radius", "1");
    c.set_default(prefix + ".mollify_width", "-1");
}

void default_params(Config& c) {
    c.set_default("params.gamma", "0.5");
    c.set_default("params.p1", "2");
    c.set_default("params.p2", "2");
    c.set_default("params.k1", "0");
    c.set_default("params.k2", "0");
}

ProblemParams params_from(const Config& c, ExactParams* exact = nullptr) {
    ProblemParams p;
    const std::string g = c.get_string("params.gamma");
    const std::string p1 = c.get_string("params.p1");
    const std::string p2 = c.get_string("params.p2");
    const auto rg = Rational::parse(g);
    const auto r1 = Rational::parse(p1);
    const auto r2 = Rational::parse(p2);
    p.gamma = rg ? rg->to_double() : c.get_double("params.gamma");
    p.p1 = r1 ? r1->to_double() : c.get_double("params.p1");
    p.p2 = r2 ? r2->to_double() : c.get_double("params.p2");
    p.coeff1 = c.get_double("params.k1");
    p.coeff2 = c.get_double("params.k2");
    if (exact) {
        exact->gamma = rg;
        exact->p1 = r1;
        exact->p2 = r2;
    }
    p.validate();
    return p;
}

void default_time(Config& c, const std::string& dt, const std::string& steps) {
    c.set_default("time.dt", dt);
    c.set_default("time.steps", steps);
}

SolveConfig solve_config_from(const Config& c) {
    SolveConfig s;
    s.grid = grid_from(c);
    s.time.dt = c.get_double("time.dt");
    s.time.steps = c.get_int("time.steps");
    if (c.has("time.T")) {
        const double T = c.get_double("time.T");
        if (!(T > 0.0)) throw ConfigError("time.T", "T must be > 0");
        s.time.steps = std::max(1, static_cast<int>(std::lround(T / s.time.dt)));
    }
    s.params = params_from(c);
    s.q = c.get_double("solver.q");
    s.blowup_threshold = c.get_double("solver.threshold");
    s.checkpoint_stride = c.get_int("solver.stride");
    s.ball_radius_factor = c.get_double("solver.ball_factor");
    const std::string scheme = c.get_string("solver.scheme");
    if (scheme == "expEuler")
        s.scheme = Scheme::exp_euler;
    else if (scheme == "predictorCorrector")
        s.scheme = Scheme::predictor_corrector;
    else
        throw ConfigError("solver.scheme", "unknown scheme '" + scheme + "'");
    s.validate();
    return s;
}

void default_solver(Config& c) {
    c.set_default("solver.q", "2");
    c.set_default("solver.threshold", "1e6");
    c.set_default("solver.stride", "1");
    c.set_default("solver.scheme", "expEuler");
    c.set_default("solver.ball_factor", "0");
}

// ---------------------------------------------------------------------------
// Output helpers.

json config_json(const Config& c) {
    json j = json::object();
    for (const auto& [k, v] : c.kv) j[k] = v;  // std::map iterates sorted
    return j;
}

std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

void emit_summary(const json& j, const std::string& dir, const std::string& name) {
    const std::string path = out_path(dir, name);
    write_json_file(j, path);
    std::cout << dump_json(j) << '\n';
    std::cerr << "wrote " << path << '\n';
}

int config_error_exit(const ConfigError& e) {
    json err;
    err["error"] = e.what();
    err["where"] = e.key;
    std::cout << dump_json(err) << '\n';
    return 2;
}

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Exit code for a completed run given the optional expected status: findings
// that match the expectation count as passes, unexpected aborts propagate.
int status_exit(SolveStatus status, const Config& c) {
    const std::string expected =
        c.has("expect.status") ? c.get_string("expect.status") : "completed";
    if (std::string(to_string(status)) == expected) return 0;
    if (status == SolveStatus::nan_abort) return 4;
    if (status == SolveStatus::blowup_detected) return 3;
    return 1;  // expected blow-up that did not happen, or similar
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_exponents(Config& c, const std::string& out) {
    c.set_default("dims.n", "1");
    c.set_default("dims.k", "1");
    c.set_default("params.p1", "3");
    c.set_default("params.p2", "7/3");
    c.set_default("params.k1", "1");
    c.set_default("params.k2", "1");
    default_params(c);
    c.set_default("data.nonneg", "false");

    const GrushinDims dims(c.get_int("dims.n"), c.get_int("dims.k"));
    ExactParams exact;
    const ProblemParams params = params_from(c, &exact);
    std::optional<double> q;
    if (c.has("q")) q = c.get_double("q");

    const ExponentReport rep = critical_exponents(dims, params, q);
    const QWindow win = admissible_q_window(dims, params.p1, params.gamma);
    const RegimeVerdict verdict =
        classify_regime(dims, params, c.get_bool("data.nonneg"), &exact);

    json j;
    j["experiment"] = "exponents";
    j["dims"] = {{"n", dims.spatial_n},
                 {"k", dims.degenerate_k},
                 {"Q", dims.homogeneous_dimension()}};
    json e;
    e["p_gamma"] = json_number(rep.p_gamma);
    e["inv_gamma"] = json_number(rep.inv_gamma);
    e["p1_star"] = json_number(rep.p1_star);
    e["p2_star"] = json_number(rep.p2_star);
    e["p2_star_star"] = json_number(rep.p2_star_star);
    e["p2_star_star_singular_branch"] = json_number(rep.p2_star_star_singular_branch);
    e["p1_tilde"] = json_number(rep.p1_tilde);
    e["p2_tilde"] = json_number(rep.p2_tilde);
    e["q_sc1"] = json_number(rep.q_sc1);
    e["q_sc2"] = json_number(rep.q_sc2);
    e["q_sc"] = json_number(rep.q_sc);
    e["q_sc_branch"] = rep.q_sc_branch == ScalingBranch::memory          ? "memory"
                       : rep.q_sc_branch == ScalingBranch::instantaneous ? "instantaneous"
                                                                         : "boundary";
    e["local_q_threshold"] = json_number(rep.local_q_threshold);
    if (rep.alpha1) e["alpha1"] = json_number(*rep.alpha1);
    if (rep.alpha2) e["alpha2"] = json_number(*rep.alpha2);
    if (rep.beta) e["beta"] = json_number(*rep.beta);
    j["exponents"] = e;
    j["q_window"] = {{"empty", win.empty},
                     {"lo", json_number(win.lo)},
                     {"hi", json_number(win.hi)},
                     {"lo_inclusive", win.lo_inclusive}};
    j["verdict"] = {{"case", to_string(verdict.case_tag)},
                    {"required_smallness", verdict.required_smallness},
                    {"matched_conditions", verdict.matched_conditions}};

    bool passed = true;
    if (c.has("expect.case"))
        passed = c.get_string("expect.case") == to_string(verdict.case_tag);
    j["passed"] = passed;
    j["config"] = config_json(c);
    emit_summary(j, out, "exponents_summary.json");
    return passed ? 0 : 1;
}

int cmd_kernel_check(Config& c, const std::string& out) {
    c.set_default("kernel.t", "0.5");
    c.set_default("kernel.n", "1");
    c.set_default("kernel.x_half", "8");
    c.set_default("kernel.y_half", "8");
    c.set_default("kernel.nx", "257");
    c.set_default("kernel.ny", "256");
    c.set_default("kernel.pairs", "100");
    c.set_default("seed", "0");
    c.set_default("kernel.norm_lo", "0.999");
    c.set_default("kernel.norm_hi", "1.001");
    c.set_default("kernel.positivity_tol", "1e-9");
    c.set_default("kernel.symmetry_tol", "1e-8");
    c.set_default("kernel.scaling_tol", "1e-6");

    const double t = c.get_double("kernel.t");
    const int n = c.get_int("kernel.n");
    const double y_half = c.get_double("kernel.y_half");
    QuadratureSpec spec = default_quadrature_for_grid(t, n, y_half);
    if (c.has("quad.xi_max")) spec.xi_max = c.get_double("quad.xi_max");
    if (c.has("quad.nodes")) spec.nodes = c.get_int("quad.nodes");
    spec.validate();

    const KernelPropertyReport rep = kernel_property_report(
        t, c.get_double("kernel.x_half"), y_half, c.get_int("kernel.nx"),
        c.get_int("kernel.ny"), spec, n,
        static_cast<std::uint64_t>(c.get_int("seed")), c.get_int("kernel.pairs"));

    const bool norm_ok = rep.normalization >= c.get_double("kernel.norm_lo") &&
                         rep.normalization <= c.get_double("kernel.norm_hi");
    const bool pos_ok = rep.min_value >= -c.get_double("kernel.positivity_tol");
    const bool sym_ok = rep.max_symmetry_defect <= c.get_double("kernel.symmetry_tol");
    const bool scale_ok = rep.max_scaling_defect <= c.get_double("kernel.scaling_tol");
    const bool passed = norm_ok && pos_ok && sym_ok && scale_ok && rep.box_ok;

    json j;
    j["experiment"] = "kernel-check";
    j["quadrature"] = {{"xi_max", json_number(spec.xi_max)}, {"nodes", spec.nodes}};
    j["report"] = {{"normalization", json_number(rep.normalization)},
                   {"min_value", json_number(rep.min_value)},
                   {"max_symmetry_defect", json_number(rep.max_symmetry_defect)},
                   {"max_scaling_defect", json_number(rep.max_scaling_defect)},
                   {"tail_mass_estimate", json_number(rep.tail_mass_estimate)},
                   {"box_ok", rep.box_ok}};
    j["assertions"] = {{"normalization_in_window", norm_ok},
                       {"positivity", pos_ok},
                       {"symmetry", sym_ok},
                       {"scaling", scale_ok},
                       {"box_ok", rep.box_ok}};
    j["passed"] = passed;
    j["config"] = config_json(c);
    emit_summary(j, out, "kernel_check_summary.json");
    return passed ? 0 : 1;
}

int cmd_decay_fit(Config& c, const std::string& out) {
    // Point-mass decay needs fine y resolution: the evolved spike carries
    // frequencies up to about 2/t, so hy must keep pi/hy well above that.
    c.set_default("grid.nx", "65");
    c.set_default("grid.ny", "128");
    c.set_default("grid.lx", "6");
    c.set_default("grid.ly", "3");
    c.set_default("profile.kind", "indicator");
    c.set_default("profile.radius", "0");
    default_profile(c, "profile");
    c.set_default("fit.p", "1");
    c.set_default("fit.q", "inf");
    c.set_default("fit.times", "0.3,0.375,0.45,0.525,0.6,0.675");
    c.set_default("fit.slope_tol", "0.08");
    c.set_default("fit.residual_tol", "0.05");

    const GridSpec grid = grid_from(c);
    const GridFunction u0 = sample_function(grid, profile_from(c, "profile"));
    const double p = c.get_double("fit.p");
    const double q = c.get_double("fit.q");
    const std::vector<double> times = c.get_list("fit.times");

    const SlopeFit fit = decay_slope_fit(u0, p, q, times);
    const double expected = expected_decay_slope(p, q);
    const bool slope_ok = std::abs(fit.slope - expected) <= c.get_double("fit.slope_tol");
    const bool residual_ok = fit.residual <= c.get_double("fit.residual_tol");
    const bool passed = slope_ok && residual_ok;

    const std::string series = out_path(out, "decay_series.csv");
    {
        std::ofstream os(series, std::ios::trunc);
        if (!os) throw ConfigError("out", "cannot open " + series);
        os << "t,norm\n";
        for (std::size_t i = 0; i < fit.times.size(); ++i)
            os << fmt17(fit.times[i]) << ',' << fmt17(fit.norms[i]) << '\n';
    }

    json j;
    j["experiment"] = "decay-fit";
    j["fit"] = {{"slope", json_number(fit.slope)},
                {"expected_slope", json_number(expected)},
                {"intercept", json_number(fit.intercept)},
                {"residual", json_number(fit.residual)},
                {"c_emp", json_number(fit.c_emp)}};
    json series_json = json::array();
    for (std::size_t i = 0; i < fit.times.size(); ++i)
        series_json.push_back({{"t", json_number(fit.times[i])},
                               {"norm", json_number(fit.norms[i])}});
    j["series"] = series_json;
    j["assertions"] = {{"slope_within_tol", slope_ok}, {"residual_within_tol", residual_ok}};
    j["passed"] = passed;
    j["config"] = config_json(c);
    emit_summary(j, out, "decay_fit_summary.json");
    return passed ? 0 : 1;
}

int cmd_solve(Config& c, const std::string& out) {
    c.set_default("grid.nx", "129");
    c.set_default("grid.ny", "128");
    c.set_default("grid.lx", "8");
    c.set_default("grid.ly", "8");
    default_profile(c, "profile");
    default_params(c);
    default_time(c, "0.015625", "128");
    default_solver(c);
    c.set_default("output.snapshots", "false");

    const SolveConfig cfg = solve_config_from(c);
    const GridFunction u0 = sample_function(cfg.grid, profile_from(c, "profile"));
    const bool snapshots = c.get_bool("output.snapshots");

    const SolveResult res = solve(u0, cfg, snapshots);

    write_trace_csv(res.trace, out_path(out, "trace.csv"));
    write_grid_binary(res.final_state, out_path(out, "final_state.bin"));
    write_grid_csv(res.final_state, out_path(out, "final_state.csv"));
    if (snapshots) {
        for (std::size_t i = 0; i < res.states.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "state_%04zu.bin", i);
            write_grid_binary(res.states[i], out_path(out, name));
        }
    }

    json j;
    j["experiment"] = "solve";
    j["status"] = to_string(res.trace.status);
    j["t_max_estimate"] = json_number(res.trace.t_max_estimate);
    j["final_sup_norm"] = json_number(lp_norm(res.final_state, norm_sup));
    j["final_lq_norm"] = json_number(lp_norm(res.final_state, cfg.q));
    j["grid_resolution_warning"] = res.trace.grid_resolution_warning;
    j["ball_exited"] = res.trace.ball_exited;
    j["ball_exit_time"] = json_number(res.trace.ball_exit_time);
    j["boundary_tail_ratio"] = json_number(boundary_tail_ratio(res.final_state));
    j["checkpoints"] = static_cast<int>(res.trace.times.size());

    int code = status_exit(res.trace.status, c);
    bool passed = code == 0;
    if (passed && c.has("expect.sup_below")) {
        double worst = 0.0;
        for (double s : res.trace.sup_norms)
            if (std::isfinite(s)) worst = std::max(worst, s);
        if (worst > c.get_double("expect.sup_below")) {
            passed = false;
            code = 1;
        }
    }
    j["passed"] = passed;
    j["config"] = config_json(c);
    emit_summary(j, out, "solve_summary.json");
    return code;
}

int cmd_picard(Config& c, const std::string& out) {
    c.set_default("grid.nx", "65");
    c.set_default("grid.ny", "64");
    c.set_default("grid.lx", "6");
    c.set_default("grid.ly", "6");
    c.set_default("profile.amplitude", "0.1");
    default_profile(c, "profile");
    c.set_default("params.k1", "1");  // defaults exercise both couplings
    c.set_default("params.k2", "1");
    default_params(c);
    default_time(c, "0.03125", "8");
    default_solver(c);
    c.set_default("picard.T", "0.25");
    c.set_default("picard.iterations", "8");
    c.set_default("picard.expect_contraction", "true");

    const SolveConfig cfg = solve_config_from(c);
    const GridFunction u0 = sample_function(cfg.grid, profile_from(c, "profile"));
    const PicardResult res =
        picard_iterate(u0, c.get_double("picard.T"), c.get_int("picard.iterations"), cfg);

    json j;
    j["experiment"] = "picard";
    json dist = json::array();
    for (double d : res.distances) dist.push_back(json_number(d));
    j["distances"] = dist;
    j["contraction_window_violation"] = res.contraction_window_violation;
    j["final_sup_norm"] = json_number(lp_norm(res.final_state, norm_sup));
    const bool passed =
        !c.get_bool("picard.expect_contraction") || !res.contraction_window_violation;
    j["passed"] = passed;
    j["config"] = config_json(c);
    emit_summary(j, out, "picard_summary.json");
    return passed ? 0 : 1;
}

int cmd_compare(Config& c, const std::string& out) {
    c.set_default("grid.nx", "65");
    c.set_default("grid.ny", "64");
    c.set_default("grid.lx", "6");
    c.set_default("grid.ly", "6");
    c.set_default("u0.amplitude", "0.4");
    c.set_default("u0.width_x", "1.5");
    c.set_default("u0.width_y", "1.5");
    default_profile(c, "u0");
    c.set_default("v0.amplitude", "1");
    c.set_default("v0.width_x", "1.5");
    c.set_default("v0.width_y", "1.5");
    default_profile(c, "v0");
    c.set_default("params.k1", "0.5");
    c.set_default("params.k2", "0.5");
    default_params(c);
    default_time(c, "0.03125", "8");
    default_solver(c);
    c.set_default("compare.T", "0.25");
    c.set_default("compare.range_hint", "0");

    const SolveConfig cfg = solve_config_from(c);
    const GridFunction u0 = sample_function(cfg.grid, profile_from(c, "u0"));
    const GridFunction v0 = sample_function(cfg.grid, profile_from(c, "v0"));

    // The u problem runs the configured exponents; the v problem runs the
    // tilde pair, defaulting to the same exponents (ordered data only).
    const double p1t = c.has("compare.p1_tilde") ? c.get_double("compare.p1_tilde")
                                                 : cfg.params.p1;
    const double p2t = c.has("compare.p2_tilde") ? c.get_double("compare.p2_tilde")
                                                 : cfg.params.p2;
    const NonlinearitySpec f = NonlinearitySpec::power(cfg.params.p1);
    const NonlinearitySpec g = NonlinearitySpec::power(cfg.params.p2);
    const NonlinearitySpec ft = NonlinearitySpec::power(p1t);
    const NonlinearitySpec gt = NonlinearitySpec::power(p2t);

    const OrderingReport rep =
        compare_solutions(u0, v0, f, g, ft, gt, c.get_double("compare.T"), cfg,
                          c.get_double("compare.range_hint"));

    json j;
    j["experiment"] = "compare";
    j["min_defect"] = json_number(rep.min_defect);
    j["argmin"] = {{"t", json_number(rep.argmin_t)},
                   {"ix", rep.argmin_ix},
                   {"iy", rep.argmin_iy}};
    j["violation_count"] = rep.violation_count;
    j["tolerance"] = json_number(rep.tolerance);
    j["range_respected"] = rep.range_respected;
    j["status_u"] = to_string(rep.status_u);
    j["status_v"] = to_string(rep.status_v);
    j["passed"] = rep.passed;
    j["config"] = config_json(c);
    emit_summary(j, out, "compare_summary.json");
    return rep.passed ? 0 : 1;
}

int cmd_phase_scan(Config& c, const std::string& out) {
    c.set_default("grid.nx", "65");
    c.set_default("grid.ny", "64");
    c.set_default("grid.lx", "6");
    c.set_default("grid.ly", "6");
    c.set_default("profile.amplitude", "0.5");
    default_profile(c, "profile");
    c.set_default("params.k1", "0.5");
    c.set_default("params.k2", "0.5");
    default_params(c);
    default_time(c, "0.03125", "32");
    default_solver(c);
    c.set_default("scan.p1_min", "2");
    c.set_default("scan.p1_max", "3");
    c.set_default("scan.p1_cells", "3");
    c.set_default("scan.p2_min", "1.5");
    c.set_default("scan.p2_max", "2.5");
    c.set_default("scan.p2_cells", "3");
    c.set_default("scan.refine", "true");
    c.set_default("scan.rtol", "0.1");
    c.set_default("scan.overlay_samples", "121");
    c.set_default("expect.all_completed", "false");

    PhaseScanConfig pc;
    pc.base = solve_config_from(c);
    pc.profile = profile_from(c, "profile");
    pc.p1_min = c.get_double("scan.p1_min");
    pc.p1_max = c.get_double("scan.p1_max");
    pc.p1_cells = c.get_int("scan.p1_cells");
    pc.p2_min = c.get_double("scan.p2_min");
    pc.p2_max = c.get_double("scan.p2_max");
    pc.p2_cells = c.get_int("scan.p2_cells");
    pc.refine_blowup = c.get_bool("scan.refine");
    pc.stability_rtol = c.get_double("scan.rtol");

    const PhaseScanResult res = phase_scan(pc);
    write_phase_csv(res, out_path(out, "phase_cells.csv"));
    write_overlay_csv(GrushinDims(1, 1), pc.base.params.gamma, pc.p1_min, pc.p1_max,
                      c.get_int("scan.overlay_samples"), out_path(out, "phase_overlay.csv"));

    json j;
    j["experiment"] = "phase-scan";
    j["counts"] = {{"cells", static_cast<int>(res.cells.size())},
                   {"completed", res.completed},
                   {"blowup_stable", res.blowup_stable},
                   {"inconclusive", res.inconclusive},
                   {"aborted", res.aborted}};
    json cells = json::array();
    for (const PhaseCell& cell : res.cells) {
        cells.push_back({{"p1", json_number(cell.p1)},
                         {"p2", json_number(cell.p2)},
                         {"status_code", phase_status_code(cell)},
                         {"t_max_estimate", json_number(cell.t_max_estimate)},
                         {"max_sup_norm", json_number(cell.max_sup_norm)}});
    }
    j["cells"] = cells;
    const bool passed = !c.get_bool("expect.all_completed") ||
                        res.completed == static_cast<int>(res.cells.size());
    j["passed"] = passed;
    j["config"] = config_json(c);
    emit_summary(j, out, "phase_scan_summary.json");
    return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// export: turn produced series into gnuplot-ready columns.

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("in", "cannot open input '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) cols.push_back(trim(item));
        rows.push_back(std::move(cols));
    }
    if (rows.size() < 2) throw ConfigError("in", "no data rows in '" + path + "'");
    return rows;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw ConfigError("in", "missing column '" + name + "'");
}

int cmd_export(const std::string& kind, const std::string& in, const std::string& out_file) {
    const auto rows = read_csv(in);
    const auto& header = rows.front();

    std::filesystem::path p(out_file);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(out_file, std::ios::trunc);
    if (!os) throw ConfigError("out", "cannot open output '" + out_file + "'");

    if (kind == "trace") {
        const int ct = find_column(header, "t");
        const int cs = find_column(header, "sup_norm");
        os << "# t  sup_norm\n";
        for (std::size_t r = 1; r < rows.size(); ++r)
            os << rows[r][ct] << "  " << rows[r][cs] << '\n';
    } else if (kind == "decay") {
        const int ct = find_column(header, "t");
        const int cn = find_column(header, "norm");
        os << "# log_t  log_norm\n";
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const double t = std::stod(rows[r][ct]);
            const double v = std::stod(rows[r][cn]);
            if (!(t > 0.0) || !(v > 0.0))
                throw ConfigError("in", "nonpositive entry in decay series");
            os << fmt17(std::log(t)) << "  " << fmt17(std::log(v)) << '\n';
        }
    } else if (kind == "phase") {
        const int c1 = find_column(header, "p1");
        const int c2 = find_column(header, "p2");
        const int cc = find_column(header, "status_code");
        os << "# p1  p2  status_code\n";
        for (std::size_t r = 1; r < rows.size(); ++r)
            os << rows[r][c1] << "  " << rows[r][c2] << "  " << rows[r][cc] << '\n';
    } else {
        throw ConfigError("kind", "unknown export kind '" + kind + "'");
    }
    std::cerr << "wrote " << out_file << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grushin heat equation laboratory"};
    app.require_subcommand(1);

    std::string config_file, out_dir = "out";
    std::vector<std::string> sets;
    std::string export_kind, export_in, export_out = "plot.dat";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "TOML config file");
        sub->add_option("--set", sets, "override: key=value (repeatable)");
        sub->add_option("--out", out_dir, "output directory");
    };

    CLI::App* s_exp = app.add_subcommand("exponents", "critical exponents and regime verdict");
    CLI::App* s_ker = app.add_subcommand("kernel-check", "heat kernel property sweep");
    CLI::App* s_dec = app.add_subcommand("decay-fit", "smoothing decay slope fit");
    CLI::App* s_sol = app.add_subcommand("solve", "march one problem");
    CLI::App* s_pic = app.add_subcommand("picard", "Picard iteration distances");
    CLI::App* s_cmp = app.add_subcommand("compare", "ordered pair comparison");
    CLI::App* s_phs = app.add_subcommand("phase-scan", "(p1, p2) outcome scan with overlay");
    CLI::App* s_exo = app.add_subcommand("export", "series to gnuplot columns");
    for (CLI::App* s : {s_exp, s_ker, s_dec, s_sol, s_pic, s_cmp, s_phs}) add_common(s);
    s_exo->add_option("--kind", export_kind, "trace | decay | phase")->required();
    s_exo->add_option("--in", export_in, "input series CSV")->required();
    s_exo->add_option("--out-file", export_out, "output data file");

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg;
        if (!config_file.empty()) load_toml_file(config_file, cfg);
        apply_overrides(sets, cfg);

        if (s_exp->parsed()) return cmd_exponents(cfg, out_dir);
        if (s_ker->parsed()) return cmd_kernel_check(cfg, out_dir);
        if (s_dec->parsed()) return cmd_decay_fit(cfg, out_dir);
        if (s_sol->parsed()) return cmd_solve(cfg, out_dir);
        if (s_pic->parsed()) return cmd_picard(cfg, out_dir);
        if (s_cmp->parsed()) return cmd_compare(cfg, out_dir);
        if (s_phs->parsed()) return cmd_phase_scan(cfg, out_dir);
        if (s_exo->parsed()) return cmd_export(export_kind, export_in, export_out);
    } catch (const ConfigError& e) {
        return config_error_exit(e);
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cout << dump_json(err) << '\n';
        return 2;
    }
    return 2;
}
