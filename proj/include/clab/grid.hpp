#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace clab {

/// Uniform discretization of the interval (0, L) with Dirichlet endpoints.
struct SpatialGrid {
    double length = 1.0;
    int node_count = 0;
    double spacing = 0.0;

    double node(int i) const {
        if (i == 0) return 0.0;
        if (i == node_count - 1) return length;
        return length * static_cast<double>(i) / static_cast<double>(node_count - 1);
    }
    int interior_begin() const { return 1; }
    int interior_end() const { return node_count - 1; }
};

/// Uniform discretization of the time window (t0, T). The step count is kept
/// even so that the midpoint T' = (t0 + T)/2 is exactly a grid node.
struct TimeGrid {
    double t_begin = 0.0;
    double t_end = 1.0;
    int step_count = 0;
    double dt = 0.0;

    int node_count() const { return step_count + 1; }
    double node(int k) const {
        if (k == 0) return t_begin;
        if (k == step_count) return t_end;
        return t_begin + (t_end - t_begin) * static_cast<double>(k) / static_cast<double>(step_count);
    }
    int midpoint_index() const { return step_count / 2; }
    double midpoint() const { return node(midpoint_index()); }
    double window() const { return t_end - t_begin; }

    /// 1/((t - t0)(T - t)); +inf at the window endpoints.
    double endpoint_factor(double t) const;
};

SpatialGrid build_spatial_grid(double length, int node_count);
TimeGrid build_time_grid(double t_begin, double t_end, int step_count);

/// Real-valued samples on the nodes of a SpatialGrid.
struct ScalarField {
    SpatialGrid grid;
    std::vector<double> values;

    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    int size() const { return static_cast<int>(values.size()); }
};

ScalarField make_field(const SpatialGrid& grid, double fill = 0.0);

template <typename Fn>
ScalarField make_field_from(const SpatialGrid& grid, Fn&& fn) {
    ScalarField f = make_field(grid);
    for (int i = 0; i < grid.node_count; ++i) f[i] = fn(grid.node(i));
    return f;
}

/// sin(j pi x / L) sampled on the grid, with the endpoint samples forced to
/// exactly zero so Dirichlet compatibility checks hold bitwise.
ScalarField sine_mode_field(const SpatialGrid& grid, int mode, double amplitude = 1.0);

/// Real-valued samples on the tensor grid (time node, space node), row-major in time.
struct SpaceTimeField {
    SpatialGrid space;
    TimeGrid time;
    std::vector<double> values;

    double at(int k, int i) const { return values[static_cast<size_t>(k) * space.node_count + i]; }
    double& at(int k, int i) { return values[static_cast<size_t>(k) * space.node_count + i]; }
    std::span<const double> slice(int k) const {
        return {values.data() + static_cast<size_t>(k) * space.node_count,
                static_cast<size_t>(space.node_count)};
    }
    ScalarField snapshot(int k) const;
};

SpaceTimeField make_spacetime_field(const SpatialGrid& space, const TimeGrid& time, double fill = 0.0);

/// Closed interval of the spatial domain.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Nested observation geometry: omega_prime inside omega_second inside omega,
/// all strictly inside (0, L) with positive clearances.
struct SubIntervalSet {
    Interval omega;         // outer observation region
    Interval omega_second;  // cut-off support
    Interval omega_prime;   // cut-off plateau, holds the critical point
};

SubIntervalSet make_subintervals(Interval omega, Interval omega_second, Interval omega_prime,
                                 double domain_length);

/// Trapezoidal integral of the piecewise-linear interpolant of f over region.
/// Region endpoints that fall inside a cell are handled exactly for the
/// interpolant (linear end-cell weighting). Empty regions integrate to zero.
double integrate_space(const ScalarField& f, Interval region);

/// Per-node weights w such that sum_i w_i f_i == integrate_space(f, region).
std::vector<double> quadrature_weights(const SpatialGrid& grid, Interval region);

/// Tensor-product trapezoidal rule over region x (t0, T). Integrand values at
/// the time endpoints are used as supplied; weighted integrands are expected
/// to vanish there.
double integrate_spacetime(const SpaceTimeField& f, Interval region);

/// Same rule restricted to time nodes [k_begin, k_end].
double integrate_spacetime_window(const SpaceTimeField& f, Interval region, int k_begin, int k_end);

double l2_norm_sq(const ScalarField& f);
double l2_norm_sq(const ScalarField& f, Interval region);

void write_csv(const ScalarField& f, const std::string& path);
void write_csv(const SpaceTimeField& f, const std::string& path);

}  // namespace clab
