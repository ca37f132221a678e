#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace grushin {

/**
 * Tensor grid on [-Lx, Lx] x [-Ly, Ly].  The x direction is a plain
 * non-periodic grid with nx points (trapezoid quadrature, Dirichlet-like
 * truncation); the y direction is periodically identified with ny uniform
 * cells, so y_j = -Ly + j*hy and the point y = Ly is the same as y = -Ly.
 */
struct GridSpec {
    double x_half_width = 8.0;
    double y_half_width = 8.0;
    int nx = 129;
    int ny = 128;

    void validate() const;  // nx, ny >= 32, ny even, positive widths
    double hx() const { return 2.0 * x_half_width / (nx - 1); }
    double hy() const { return 2.0 * y_half_width / ny; }
    double x(int i) const { return -x_half_width + i * hx(); }
    double y(int j) const { return -y_half_width + j * hy(); }
    // Trapezoid weight of column i (hx, halved at the two ends).
    double x_weight(int i) const { return (i == 0 || i == nx - 1) ? 0.5 * hx() : hx(); }

    bool operator==(const GridSpec&) const = default;
};

struct GridFunction {
    GridSpec spec;
    std::vector<double> values;  // row-major, values[i * ny + j]

    static GridFunction zeros(const GridSpec& spec);
    double& at(int i, int j) { return values[static_cast<size_t>(i) * spec.ny + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * spec.ny + j]; }
    bool all_finite() const;
};

/**
 * Analytic initial profiles.
 *
 * gaussian:            A exp(-((x-cx)/wx)^2 - ((y-cy)/wy)^2)
 * gaussian_in_x_only:  A exp(-((x-cx)/wx)^2), constant in y
 * power_singular:      A r^{-a} with a smooth bump cutoff at radius R,
 *                      r the distance to the center; a node exactly at the
 *                      center is set to the average of its four neighbors
 * indicator_mollified: A times a C^1 ramp from 1 (r <= R - w) to 0
 *                      (r >= R + w); w defaults to the grid spacing, and
 *                      R = 0 gives a grid-scale spike (discrete delta)
 */
struct ProfileSpec {
    enum class Kind { gaussian, gaussian_in_x_only, power_singular, indicator_mollified };
    Kind kind = Kind::gaussian;
    double amplitude = 1.0;
    double center_x = 0.0, center_y = 0.0;
    double width_x = 1.0, width_y = 1.0;   // gaussian widths
    double exponent = 1.0;                 // power_singular: the a of r^{-a}
    double cutoff_radius = 4.0;            // power_singular: bump support radius
    double radius = 1.0;                   // indicator_mollified: plateau radius
    double mollify_width = -1.0;           // indicator_mollified: ramp half-width; <0 = grid scale
};

GridFunction sample_function(const GridSpec& spec, const ProfileSpec& profile);

// Trapezoid L^p norm over the box; p = infinity is the grid max of |u|.
double lp_norm(const GridFunction& u, double p);
constexpr double norm_sup = std::numeric_limits<double>::infinity();

double integral(const GridFunction& u);

// max |boundary value| / max |value|; tail diagnostic for truncation quality.
double boundary_tail_ratio(const GridFunction& u);

/**
 * Flat binary snapshot format: header of four little-endian 64-bit values
 * (nx, ny as signed integers, then Lx, Ly as doubles), followed by the
 * nx*ny values row-major as 64-bit doubles.
 */
void write_grid_binary(const GridFunction& u, const std::string& path);
GridFunction read_grid_binary(const std::string& path);

// CSV rows "x,y,value" for plotting.
void write_grid_csv(const GridFunction& u, const std::string& path);

}  // namespace grushin
