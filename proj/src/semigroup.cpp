#include "grushin/semigroup.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "grushin/mehler.hpp"

namespace grushin {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

// The fftw planner has global state; plan creation and destruction must be
// serialized (the new-array execute calls are safe concurrently).
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* p = nullptr;
    explicit FftwBuffer(std::size_t n) {
        p = static_cast<double*>(fftw_malloc(n * sizeof(double)));
        if (!p) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

struct FftwComplexBuffer {
    fftw_complex* p = nullptr;
    explicit FftwComplexBuffer(std::size_t n) {
        p = static_cast<fftw_complex*>(fftw_malloc(n * sizeof(fftw_complex)));
        if (!p) throw std::bad_alloc();
    }
    ~FftwComplexBuffer() { fftw_free(p); }
    FftwComplexBuffer(const FftwComplexBuffer&) = delete;
    FftwComplexBuffer& operator=(const FftwComplexBuffer&) = delete;
};

}  // namespace

struct SemigroupOperator::Impl {
    GridSpec spec;
    double t = 0.0;
    bool identity = false;
    bool below_resolution = false;
    int modes = 0;                  // ny/2 + 1
    std::vector<double> matrices;   // modes blocks of nx*nx, row-major
    double min_entry = 0.0;
    fftw_plan forward = nullptr;    // many r2c transforms, one per x row
    fftw_plan backward = nullptr;   // many c2r transforms

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

SemigroupOperator::SemigroupOperator(const GridSpec& spec, double t) : impl_(new Impl) {
    spec.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("time step must be >= 0");
    Impl& im = *impl_;
    im.spec = spec;
    im.t = t;
    const double hx = spec.hx();
    im.identity = t < 1e-3 * hx * hx;
    im.below_resolution = t < hx * hx;

    const int nx = spec.nx, ny = spec.ny;
    im.modes = ny / 2 + 1;

    if (!im.identity) {
        im.matrices.assign(static_cast<std::size_t>(im.modes) * nx * nx, 0.0);
        const double ly = spec.y_half_width;
#pragma omp parallel for schedule(static)
        for (int m = 0; m < im.modes; ++m) {
            const double xi = kPi * m / ly;
            double* mat = &im.matrices[static_cast<std::size_t>(m) * nx * nx];
            MehlerQuery q;
            q.lambda = xi;
            q.t = t;
            q.n = 1;
            for (int i = 0; i < nx; ++i) {
                q.x = {spec.x(i), 0.0};
                for (int j = 0; j < nx; ++j) {
                    q.x0 = {spec.x(j), 0.0};
                    mat[i * nx + j] = mehler_kernel(q) * spec.x_weight(j);
                }
            }
        }
        double mn = im.matrices.empty() ? 0.0 : im.matrices[0];
        for (double v : im.matrices) mn = std::min(mn, v);
        im.min_entry = mn;
    }

    // Plans are created against scratch buffers and executed on caller
    // arrays via the new-array interface; UNALIGNED keeps that valid for
    // any double array.
    FftwBuffer scratch_r(static_cast<std::size_t>(nx) * ny);
    FftwComplexBuffer scratch_c(static_cast<std::size_t>(nx) * im.modes);
    const int rank = 1;
    int n_sizes[1] = {ny};
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        im.forward = fftw_plan_many_dft_r2c(rank, n_sizes, nx, scratch_r.p, nullptr, 1, ny,
                                            scratch_c.p, nullptr, 1, im.modes,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        im.backward = fftw_plan_many_dft_c2r(rank, n_sizes, nx, scratch_c.p, nullptr, 1, im.modes,
                                             scratch_r.p, nullptr, 1, ny,
                                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    if (!im.forward || !im.backward) throw std::runtime_error("fftw plan creation failed");
}

SemigroupOperator::~SemigroupOperator() = default;
SemigroupOperator::SemigroupOperator(SemigroupOperator&&) noexcept = default;
SemigroupOperator& SemigroupOperator::operator=(SemigroupOperator&&) noexcept = default;

const GridSpec& SemigroupOperator::grid() const { return impl_->spec; }
double SemigroupOperator::time_step() const { return impl_->t; }
bool SemigroupOperator::identity_shortcut() const { return impl_->identity; }
bool SemigroupOperator::time_below_grid_resolution() const { return impl_->below_resolution; }
double SemigroupOperator::min_matrix_entry() const { return impl_->min_entry; }

std::span<const double> SemigroupOperator::mode_matrix(int m) const {
    const Impl& im = *impl_;
    if (m < 0 || m >= im.modes) throw std::out_of_range("mode index");
    if (im.identity) throw std::logic_error("identity shortcut active; no matrices cached");
    const int nx = im.spec.nx;
    return {&im.matrices[static_cast<std::size_t>(m) * nx * nx],
            static_cast<std::size_t>(nx) * nx};
}

GridFunction SemigroupOperator::apply(const GridFunction& u) const {
    const Impl& im = *impl_;
    if (u.spec != im.spec) throw std::invalid_argument("grid mismatch");
    if (im.identity) return u;

    const int nx = im.spec.nx, ny = im.spec.ny, modes = im.modes;

    FftwBuffer re(static_cast<std::size_t>(nx) * ny);
    FftwComplexBuffer hat(static_cast<std::size_t>(nx) * modes);
    FftwComplexBuffer prop(static_cast<std::size_t>(nx) * modes);
    std::memcpy(re.p, u.values.data(), static_cast<std::size_t>(nx) * ny * sizeof(double));
    fftw_execute_dft_r2c(im.forward, re.p, hat.p);

    // Per mode: multiply the x profile (a complex nx vector strided across
    // rows) by the real Mehler matrix.  Modes are independent, and each
    // output entry is one serial dot product, so the result does not depend
    // on the number of threads.
#pragma omp parallel for schedule(static)
    for (int m = 0; m < modes; ++m) {
        const double* mat = &im.matrices[static_cast<std::size_t>(m) * nx * nx];
        for (int i = 0; i < nx; ++i) {
            double sr = 0.0, si = 0.0;
            const double* arow = &mat[static_cast<std::size_t>(i) * nx];
            for (int j = 0; j < nx; ++j) {
                const double a = arow[j];
                sr += a * hat.p[static_cast<std::size_t>(j) * modes + m][0];
                si += a * hat.p[static_cast<std::size_t>(j) * modes + m][1];
            }
            prop.p[static_cast<std::size_t>(i) * modes + m][0] = sr;
            prop.p[static_cast<std::size_t>(i) * modes + m][1] = si;
        }
    }

    fftw_execute_dft_c2r(im.backward, prop.p, re.p);
    GridFunction out = GridFunction::zeros(im.spec);
    const double scale = 1.0 / ny;  // fftw transforms are unnormalized
    for (std::size_t idx = 0; idx < out.values.size(); ++idx) out.values[idx] = re.p[idx] * scale;
    return out;
}

GridFunction SemigroupOperator::apply_serial(const GridFunction& u) const {
    const Impl& im = *impl_;
    if (u.spec != im.spec) throw std::invalid_argument("grid mismatch");
    if (im.identity) return u;

    const int nx = im.spec.nx, ny = im.spec.ny, modes = im.modes;
    using cplx = std::complex<double>;

    // Naive forward DFT along y per row.
    std::vector<cplx> hat(static_cast<std::size_t>(nx) * modes);
    for (int i = 0; i < nx; ++i) {
        for (int m = 0; m < modes; ++m) {
            cplx s = 0.0;
            for (int j = 0; j < ny; ++j) {
                const double ang = -2.0 * kPi * m * j / ny;
                s += u.at(i, j) * cplx(std::cos(ang), std::sin(ang));
            }
            hat[static_cast<std::size_t>(i) * modes + m] = s;
        }
    }

    std::vector<cplx> prop(static_cast<std::size_t>(nx) * modes);
    for (int m = 0; m < modes; ++m) {
        const double* mat = &im.matrices[static_cast<std::size_t>(m) * nx * nx];
        for (int i = 0; i < nx; ++i) {
            double sr = 0.0, si = 0.0;
            const double* arow = &mat[static_cast<std::size_t>(i) * nx];
            for (int j = 0; j < nx; ++j) {
                const double a = arow[j];
                sr += a * hat[static_cast<std::size_t>(j) * modes + m].real();
                si += a * hat[static_cast<std::size_t>(j) * modes + m].imag();
            }
            prop[static_cast<std::size_t>(i) * modes + m] = cplx(sr, si);
        }
    }

    // Naive inverse real DFT: values are real because the input was real and
    // the per-mode multipliers are real matrices.
    GridFunction out = GridFunction::zeros(im.spec);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            double s = prop[static_cast<std::size_t>(i) * modes + 0].real();
            for (int m = 1; m < modes; ++m) {
                const double ang = 2.0 * kPi * m * j / ny;
                const cplx z = prop[static_cast<std::size_t>(i) * modes + m];
                const double term = 2.0 * (z.real() * std::cos(ang) - z.imag() * std::sin(ang));
                // The Nyquist mode (m = ny/2) appears once, not twice.
                s += (m == modes - 1 && ny % 2 == 0) ? 0.5 * term : term;
            }
            out.at(i, j) = s / ny;
        }
    }
    return out;
}

GridFunction apply_semigroup(const GridFunction& u, double t) {
    SemigroupOperator op(u.spec, t);
    return op.apply(u);
}

SlopeFit decay_slope_fit(const GridFunction& u0, double p, double q,
                         std::span<const double> t_list) {
    if (t_list.size() < 2) throw std::invalid_argument("need at least two times");
    SlopeFit fit;
    fit.times.assign(t_list.begin(), t_list.end());
    fit.norms.reserve(t_list.size());
    for (double t : t_list) {
        if (!(t > 0.0)) throw std::invalid_argument("times must be positive");
        fit.norms.push_back(lp_norm(apply_semigroup(u0, t), q));
    }

    // Least squares of log norm against log t.
    const std::size_t n = fit.times.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(fit.times[i]);
        const double lyv = std::log(fit.norms[i]);
        sx += lx;
        sy += lyv;
        sxx += lx * lx;
        sxy += lx * lyv;
    }
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(fit.norms[i]) - (fit.intercept + fit.slope * std::log(fit.times[i]));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.c_emp = std::exp(fit.intercept) / lp_norm(u0, p);
    return fit;
}

double expected_decay_slope(double p, double q) {
    const double big_q = 3.0;  // homogeneous dimension for N = k = 1
    return -(big_q / 2.0) * (1.0 / p - 1.0 / q);
}

std::vector<double> smoothing_decay_probe(const GridFunction& phi, double q, double r,
                                          std::span<const double> t_list, double* alpha_out) {
    const double big_q = 3.0;
    const double alpha = (big_q / 2.0) * (1.0 / q - 1.0 / r);
    if (alpha_out) *alpha_out = alpha;
    std::vector<double> out;
    out.reserve(t_list.size());
    for (double t : t_list) {
        if (!(t > 0.0)) throw std::invalid_argument("times must be positive");
        out.push_back(std::pow(t, alpha) * lp_norm(apply_semigroup(phi, t), r));
    }
    return out;
}

}  // namespace grushin
