#include "grushin/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

namespace grushin {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

// 16-point Gauss-Legendre rule on [-1, 1]; abscissas in ascending magnitude,
// weights sum to 2.
constexpr double kGlX[8] = {
    0.09501250983763744019, 0.28160355077925891323, 0.45801677765722738634,
    0.61787624440264374845, 0.75540440835500303390, 0.86563120238783174388,
    0.94457502307323257608, 0.98940093499164993260};
constexpr double kGlW[8] = {
    0.18945061045506849629, 0.18260341504492358887, 0.16915651939500253819,
    0.14959598881657673208, 0.12462897125553387205, 0.09515851168249278481,
    0.06225352393864789286, 0.02715245941175409485};

struct NodeSet {
    std::vector<double> xi;
    std::vector<double> w;
};

void append_panel(NodeSet& ns, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int g = 7; g >= 0; --g) {
        ns.xi.push_back(mid - half * kGlX[g]);
        ns.w.push_back(half * kGlW[g]);
    }
    for (int g = 0; g < 8; ++g) {
        ns.xi.push_back(mid + half * kGlX[g]);
        ns.w.push_back(half * kGlW[g]);
    }
}

NodeSet build_nodes(const QuadratureSpec& spec) {
    spec.validate();
    NodeSet ns;
    if (spec.rule == QuadratureRule::trapezoid) {
        const int m = spec.nodes;
        const double h = spec.xi_max / (m - 1);
        ns.xi.resize(m);
        ns.w.resize(m);
        for (int i = 0; i < m; ++i) {
            ns.xi[i] = i * h;
            ns.w[i] = (i == 0 || i == m - 1) ? 0.5 * h : h;
        }
        return ns;
    }
    const int P = std::max(1, spec.nodes / 16);
    ns.xi.reserve(16 * P);
    ns.w.reserve(16 * P);
    if (P >= 5) {
        // First slot subdivided geometrically toward 0, remainder uniform.
        const double W = spec.xi_max / (P - 3);
        append_panel(ns, 0.0, W / 8.0);
        append_panel(ns, W / 8.0, W / 4.0);
        append_panel(ns, W / 4.0, W / 2.0);
        append_panel(ns, W / 2.0, W);
        for (int p = 0; p < P - 4; ++p) append_panel(ns, W * (p + 1), W * (p + 2));
    } else {
        const double W = spec.xi_max / P;
        for (int p = 0; p < P; ++p) append_panel(ns, W * p, W * (p + 1));
    }
    return ns;
}

double norm2d(const std::array<double, 2>& v, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[i] * v[i];
    return std::sqrt(s);
}

// Envelope decay rate of the integrand: for xi t beyond order one the
// Mehler factor is below (xi/pi)^{n/2} exp(-xi (n t / 2 + (|x|-|x0|)^2 / 2)).
double envelope_rate(double t, int n, double xn, double x0n) {
    const double d = xn - x0n;
    return 0.5 * n * t + 0.5 * d * d;
}

double tail_integral_estimate(double xi_max, double rho, int n) {
    const double ex = (1.0 / kPi) * std::pow(xi_max / kPi, 0.5 * n) * std::exp(-rho * xi_max);
    double corr = 10.0;
    if (rho * xi_max > n) corr = 1.0 / (1.0 - 0.5 * n / (rho * xi_max));
    return ex * corr / rho;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

}  // namespace

void KernelQuery::validate() const {
    MehlerQuery mq;
    mq.lambda = 0.0;
    mq.x = x;
    mq.x0 = x0;
    mq.t = t;
    mq.n = n;
    mq.validate();
    if (!std::isfinite(y)) throw std::invalid_argument("y must be finite");
}

void QuadratureSpec::validate() const {
    if (!(xi_max > 0.0)) throw std::invalid_argument("xi_max must be > 0");
    if (nodes < 16) throw std::invalid_argument("nodes must be >= 16");
}

QuadratureSpec default_quadrature(const KernelQuery& q, double tol) {
    q.validate();
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tol must be in (0, 1)");
    const double rho = envelope_rate(q.t, q.n, norm2d(q.x, q.n), norm2d(q.x0, q.n));
    const double L = std::log(1.0 / tol) + 5.0;
    const double xi1 = (L + 0.5 * q.n * std::log(std::max(L / rho, 1.0))) / rho;
    const double wt = std::min(6.0 / rho, 4.0 * kPi / (std::abs(q.y) + 1e-300));
    int panels = std::max(5, static_cast<int>(std::ceil(xi1 / wt)) + 3);
    panels = std::min(panels, 8192);
    QuadratureSpec spec;
    spec.xi_max = xi1;
    spec.nodes = 16 * panels;
    spec.rule = QuadratureRule::composite_gauss;
    return spec;
}

QuadratureSpec default_quadrature_for_grid(double t, int n, double y_abs_max, double tol) {
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (n != 1 && n != 2) throw std::invalid_argument("n must be 1 or 2");
    if (!(y_abs_max >= 0.0)) throw std::invalid_argument("y_abs_max must be >= 0");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tol must be in (0, 1)");
    const double rho = 0.5 * n * t;  // worst case |x| = |x0| over the grid
    const double L = std::log(1.0 / tol) + 5.0;
    const double xi1 = (L + 0.5 * n * std::log(std::max(L / rho, 1.0))) / rho;
    const double wt = std::min(6.0 / rho, 4.0 * kPi / (y_abs_max + 1e-300));
    int panels = std::max(5, static_cast<int>(std::ceil(xi1 / wt)) + 3);
    panels = std::min(panels, 8192);
    QuadratureSpec spec;
    spec.xi_max = xi1;
    spec.nodes = 16 * panels;
    spec.rule = QuadratureRule::composite_gauss;
    return spec;
}

KernelValue grushin_kernel(const KernelQuery& q, const QuadratureSpec& spec) {
    q.validate();
    const NodeSet ns = build_nodes(spec);

    double value = 0.0;
    double env = 0.0;
    MehlerQuery mq;
    mq.x = q.x;
    mq.x0 = q.x0;
    mq.t = q.t;
    mq.n = q.n;
    for (std::size_t k = 0; k < ns.xi.size(); ++k) {
        mq.lambda = ns.xi[k];
        const double m = mehler_kernel(mq) * ns.w[k] / kPi;
        if (m == 0.0) continue;
        value += m * std::cos(ns.xi[k] * q.y);
        env += m;
    }

    KernelValue out;
    out.value = value;
    const double rho = envelope_rate(q.t, q.n, norm2d(q.x, q.n), norm2d(q.x0, q.n));
    out.tail_estimate = tail_integral_estimate(spec.xi_max, rho, q.n);
    out.tail_ok = out.tail_estimate <= 1e-9 * std::max(env, 1e-300);
    return out;
}

double grushin_kernel_value(const KernelQuery& q, double tol) {
    return grushin_kernel(q, default_quadrature(q, tol)).value;
}

std::vector<double> grushin_kernel_grid(std::span<const double> xs, std::array<double, 2> x0,
                                        std::span<const double> ys, double t, int n,
                                        const QuadratureSpec& spec) {
    const NodeSet ns = build_nodes(spec);
    const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(xs.size());
    const std::ptrdiff_t ny = static_cast<std::ptrdiff_t>(ys.size());
    const std::ptrdiff_t nk = static_cast<std::ptrdiff_t>(ns.xi.size());
    std::vector<double> out(static_cast<std::size_t>(nx * ny), 0.0);
    std::vector<double> costab(static_cast<std::size_t>(nk * ny));

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < nk; ++k) {
        for (std::ptrdiff_t j = 0; j < ny; ++j)
            costab[k * ny + j] = std::cos(ns.xi[k] * ys[j]);
    }

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
        double* row = &out[i * ny];
        MehlerQuery mq;
        mq.x = {xs[i], 0.0};
        mq.x0 = x0;
        mq.t = t;
        mq.n = n;
        for (std::ptrdiff_t k = 0; k < nk; ++k) {
            mq.lambda = ns.xi[k];
            const double m = mehler_kernel(mq) * ns.w[k] / kPi;
            if (m == 0.0) continue;
            const double* ct = &costab[k * ny];
            for (std::ptrdiff_t j = 0; j < ny; ++j) row[j] += m * ct[j];
        }
    }
    return out;
}

std::vector<double> grushin_kernel_grid_serial(std::span<const double> xs, std::array<double, 2> x0,
                                               std::span<const double> ys, double t, int n,
                                               const QuadratureSpec& spec) {
    const NodeSet ns = build_nodes(spec);
    const std::size_t nx = xs.size();
    const std::size_t ny = ys.size();
    std::vector<double> out(nx * ny, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
        MehlerQuery mq;
        mq.x = {xs[i], 0.0};
        mq.x0 = x0;
        mq.t = t;
        mq.n = n;
        for (std::size_t k = 0; k < ns.xi.size(); ++k) {
            mq.lambda = ns.xi[k];
            const double m = mehler_kernel(mq) * ns.w[k] / kPi;
            if (m == 0.0) continue;
            for (std::size_t j = 0; j < ny; ++j)
                out[i * ny + j] += m * std::cos(ns.xi[k] * ys[j]);
        }
    }
    return out;
}

KernelPropertyReport kernel_property_report(double t, double x_half, double y_half,
                                            int nx, int ny, const QuadratureSpec& spec,
                                            int n, std::uint64_t seed, int sample_pairs) {
    if (!(t > 0.0)) throw std::invalid_argument("t must be > 0");
    if (!(x_half > 0.0 && y_half > 0.0)) throw std::invalid_argument("box must be nonempty");
    if (nx < 3 || ny < 3) throw std::invalid_argument("resolution too small");
    if (n != 1 && n != 2) throw std::invalid_argument("n must be 1 or 2");

    KernelPropertyReport rep;

    // Sample grid and trapezoid weights.  For n = 2 the x integration is
    // radial: K(x, 0, y; t) depends on |x| only, so int_{R^2} f dx =
    // 2 pi int_0^inf r f(r) dr.
    std::vector<double> xs(nx), wx(nx), ys(ny), wy(ny);
    if (n == 1) {
        const double hx = 2.0 * x_half / (nx - 1);
        for (int i = 0; i < nx; ++i) {
            xs[i] = -x_half + i * hx;
            wx[i] = (i == 0 || i == nx - 1) ? 0.5 * hx : hx;
        }
    } else {
        const double hr = x_half / (nx - 1);
        for (int i = 0; i < nx; ++i) {
            xs[i] = i * hr;
            const double wtrap = (i == 0 || i == nx - 1) ? 0.5 * hr : hr;
            wx[i] = 2.0 * kPi * xs[i] * wtrap;
        }
    }
    const double hy = 2.0 * y_half / (ny - 1);
    for (int j = 0; j < ny; ++j) {
        ys[j] = -y_half + j * hy;
        wy[j] = (j == 0 || j == ny - 1) ? 0.5 * hy : hy;
    }

    const std::vector<double> grid = grushin_kernel_grid(xs, {0.0, 0.0}, ys, t, n, spec);

    double norm = 0.0;
    double minv = grid.empty() ? 0.0 : grid[0];
    std::vector<double> y_marginal(ny, 0.0);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double v = grid[static_cast<std::size_t>(i) * ny + j];
            norm += wx[i] * wy[j] * v;
            minv = std::min(minv, v);
            y_marginal[j] += wx[i] * v;
        }
    }
    rep.normalization = norm;
    rep.min_value = minv;

    // Tail mass outside the box.  In x the y-integrated marginal is exactly
    // the Euclidean heat kernel, so that part is closed form.  In y,
    // extrapolate the computed marginal with its local exponential rate.
    const double a = x_half / std::sqrt(2.0 * t);
    const double x_tail = n == 1 ? std::erfc(a) : std::exp(-a * a);
    double y_tail = 1.0;
    bool y_ok = false;
    const double m_last = y_marginal[ny - 1];
    const double m_prev = y_marginal[ny - 2];
    if (m_last > 0.0 && m_prev > m_last) {
        const double rate = std::log(m_prev / m_last) / hy;
        y_tail = 2.0 * m_last / rate;
        y_ok = true;
    } else if (m_last == 0.0) {
        y_tail = 0.0;
        y_ok = true;
    }
    rep.tail_mass_estimate = x_tail + y_tail;
    rep.box_ok = y_ok && rep.tail_mass_estimate < 1e-4;

    // Random pointwise property samples.
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull);
    const int q_dim = n + 2;
    for (int s = 0; s < sample_pairs; ++s) {
        KernelQuery q;
        q.n = n;
        q.t = t;
        for (int c = 0; c < n; ++c) {
            q.x[c] = uniform(rng, -3.0, 3.0);
            q.x0[c] = uniform(rng, -3.0, 3.0);
        }
        q.y = uniform(rng, -3.0, 3.0);
        KernelQuery qs = q;
        std::swap(qs.x, qs.x0);
        const double k1 = grushin_kernel(q, spec).value;
        const double k2 = grushin_kernel(qs, spec).value;
        rep.max_symmetry_defect = std::max(rep.max_symmetry_defect, std::abs(k1 - k2));

        KernelQuery qa;
        qa.n = n;
        qa.t = t;
        for (int c = 0; c < n; ++c) {
            qa.x[c] = uniform(rng, -2.0, 2.0);
            qa.x0[c] = uniform(rng, -2.0, 2.0);
        }
        qa.y = uniform(rng, -2.0, 2.0);
        const double r = (s % 2 == 0) ? 2.0 : 0.5;
        KernelQuery qb = qa;
        for (int c = 0; c < n; ++c) {
            qb.x[c] *= r;
            qb.x0[c] *= r;
        }
        qb.y *= r * r;
        qb.t *= r * r;
        const double ka = grushin_kernel_value(qa);
        const double kb = grushin_kernel_value(qb);
        const double defect = std::abs(std::pow(r, q_dim) * kb - ka) / std::max(std::abs(ka), 1e-300);
        rep.max_scaling_defect = std::max(rep.max_scaling_defect, defect);
    }
    return rep;
}

}  // namespace grushin
