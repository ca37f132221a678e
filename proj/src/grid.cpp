#include "grushin/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace grushin {

void GridSpec::validate() const {
    if (!(x_half_width > 0.0) || !(y_half_width > 0.0))
        throw std::invalid_argument("grid half-widths must be positive");
    if (nx < 32 || ny < 32) throw std::invalid_argument("nx, ny must be >= 32");
    if (ny % 2 != 0) throw std::invalid_argument("ny must be even");
}

GridFunction GridFunction::zeros(const GridSpec& spec) {
    spec.validate();
    GridFunction u;
    u.spec = spec;
    u.values.assign(static_cast<std::size_t>(spec.nx) * spec.ny, 0.0);
    return u;
}

bool GridFunction::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {

double bump(double r, double cutoff) {
    // C^infinity bump exp(1 - 1/(1 - (r/R)^2)) on r < R, 0 outside.
    if (r >= cutoff) return 0.0;
    const double s = r / cutoff;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double ramp(double r, double radius, double w) {
    // C^1 ramp: 1 on r <= radius - w, 0 on r >= radius + w, cubic smoothstep between.
    if (r <= radius - w) return 1.0;
    if (r >= radius + w) return 0.0;
    const double s = (radius + w - r) / (2.0 * w);  // 0 at outer edge, 1 at inner
    return s * s * (3.0 - 2.0 * s);
}

}  // namespace

GridFunction sample_function(const GridSpec& spec, const ProfileSpec& profile) {
    GridFunction u = GridFunction::zeros(spec);
    const int nx = spec.nx, ny = spec.ny;
    int center_i = -1, center_j = -1;

    switch (profile.kind) {
        case ProfileSpec::Kind::gaussian:
            for (int i = 0; i < nx; ++i) {
                const double ex = (spec.x(i) - profile.center_x) / profile.width_x;
                for (int j = 0; j < ny; ++j) {
                    const double ey = (spec.y(j) - profile.center_y) / profile.width_y;
                    u.at(i, j) = profile.amplitude * std::exp(-ex * ex - ey * ey);
                }
            }
            break;
        case ProfileSpec::Kind::gaussian_in_x_only:
            for (int i = 0; i < nx; ++i) {
                const double ex = (spec.x(i) - profile.center_x) / profile.width_x;
                const double v = profile.amplitude * std::exp(-ex * ex);
                for (int j = 0; j < ny; ++j) u.at(i, j) = v;
            }
            break;
        case ProfileSpec::Kind::power_singular:
            for (int i = 0; i < nx; ++i) {
                for (int j = 0; j < ny; ++j) {
                    const double dx = spec.x(i) - profile.center_x;
                    const double dy = spec.y(j) - profile.center_y;
                    const double r = std::hypot(dx, dy);
                    if (r == 0.0) {
                        center_i = i;
                        center_j = j;
                        continue;
                    }
                    u.at(i, j) = profile.amplitude * std::pow(r, -profile.exponent) *
                                 bump(r, profile.cutoff_radius);
                }
            }
            if (center_i >= 0) {
                const int il = (center_i + nx - 1) % nx, ir = (center_i + 1) % nx;
                const int jl = (center_j + ny - 1) % ny, jr = (center_j + 1) % ny;
                u.at(center_i, center_j) = 0.25 * (u.at(il, center_j) + u.at(ir, center_j) +
                                                   u.at(center_i, jl) + u.at(center_i, jr));
            }
            break;
        case ProfileSpec::Kind::indicator_mollified: {
            const double w =
                profile.mollify_width > 0.0 ? profile.mollify_width : std::max(spec.hx(), spec.hy());
            if (profile.radius <= 0.0) {
                // Grid-scale spike: unit mass concentrated in one cell.
                int ci = 0, cj = 0;
                double best = std::numeric_limits<double>::infinity();
                for (int i = 0; i < nx; ++i) {
                    const double d = std::abs(spec.x(i) - profile.center_x);
                    if (d < best) best = d, ci = i;
                }
                best = std::numeric_limits<double>::infinity();
                for (int j = 0; j < ny; ++j) {
                    const double d = std::abs(spec.y(j) - profile.center_y);
                    if (d < best) best = d, cj = j;
                }
                u.at(ci, cj) = profile.amplitude / (spec.x_weight(ci) * spec.hy());
            } else {
                for (int i = 0; i < nx; ++i) {
                    for (int j = 0; j < ny; ++j) {
                        const double r = std::hypot(spec.x(i) - profile.center_x,
                                                    spec.y(j) - profile.center_y);
                        u.at(i, j) = profile.amplitude * ramp(r, profile.radius, w);
                    }
                }
            }
            break;
        }
    }
    return u;
}

double lp_norm(const GridFunction& u, double p) {
    const GridSpec& g = u.spec;
    if (p == norm_sup) {
        std::vector<double> partial(g.nx, 0.0);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < g.nx; ++i) {
            double m = 0.0;
            for (int j = 0; j < g.ny; ++j) m = std::max(m, std::abs(u.at(i, j)));
            partial[i] = m;
        }
        double m = 0.0;
        for (double v : partial) m = std::max(m, v);
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1 or infinity");
    std::vector<double> partial(g.nx, 0.0);
    const double hy = g.hy();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (int j = 0; j < g.ny; ++j) s += std::pow(std::abs(u.at(i, j)), p);
        partial[i] = s * g.x_weight(i) * hy;
    }
    double s = 0.0;
    for (double v : partial) s += v;
    return std::pow(s, 1.0 / p);
}

double integral(const GridFunction& u) {
    const GridSpec& g = u.spec;
    std::vector<double> partial(g.nx, 0.0);
    const double hy = g.hy();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (int j = 0; j < g.ny; ++j) s += u.at(i, j);
        partial[i] = s * g.x_weight(i) * hy;
    }
    double s = 0.0;
    for (double v : partial) s += v;
    return s;
}

double boundary_tail_ratio(const GridFunction& u) {
    const GridSpec& g = u.spec;
    double interior = 0.0, boundary = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const double v = std::abs(u.at(i, j));
            interior = std::max(interior, v);
            if (i == 0 || i == g.nx - 1) boundary = std::max(boundary, v);
        }
    }
    if (interior == 0.0) return 0.0;
    return boundary / interior;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

void put_i64(std::ofstream& os, std::int64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ofstream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

void write_grid_binary(const GridFunction& u, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    put_i64(os, u.spec.nx);
    put_i64(os, u.spec.ny);
    put_f64(os, u.spec.x_half_width);
    put_f64(os, u.spec.y_half_width);
    os.write(reinterpret_cast<const char*>(u.values.data()),
             static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("short write to " + path);
}

GridFunction read_grid_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::int64_t nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    is.read(reinterpret_cast<char*>(&nx), sizeof nx);
    is.read(reinterpret_cast<char*>(&ny), sizeof ny);
    is.read(reinterpret_cast<char*>(&lx), sizeof lx);
    is.read(reinterpret_cast<char*>(&ly), sizeof ly);
    if (!is || nx <= 0 || ny <= 0 || nx > (1 << 20) || ny > (1 << 20))
        throw std::runtime_error("corrupt snapshot header in " + path);
    GridFunction u;
    u.spec.nx = static_cast<int>(nx);
    u.spec.ny = static_cast<int>(ny);
    u.spec.x_half_width = lx;
    u.spec.y_half_width = ly;
    u.values.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    is.read(reinterpret_cast<char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated snapshot in " + path);
    return u;
}

void write_grid_csv(const GridFunction& u, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "x,y,value\n";
    os.precision(17);
    for (int i = 0; i < u.spec.nx; ++i)
        for (int j = 0; j < u.spec.ny; ++j)
            os << u.spec.x(i) << ',' << u.spec.y(j) << ',' << u.at(i, j) << '\n';
    if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace grushin
