#include "clab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "clab/csv.hpp"
#include "clab/errors.hpp"

namespace clab {

double TimeGrid::endpoint_factor(double t) const {
    const double d = (t - t_begin) * (t_end - t);
    if (d <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / d;
}

SpatialGrid build_spatial_grid(double length, int node_count) {
    if (!(length > 0.0)) throw ConfigError("spatial grid: length must be positive");
    if (node_count < 3) throw ConfigError("spatial grid: need at least 3 nodes");
    SpatialGrid g;
    g.length = length;
    g.node_count = node_count;
    g.spacing = length / static_cast<double>(node_count - 1);
    return g;
}

TimeGrid build_time_grid(double t_begin, double t_end, int step_count) {
    if (!(t_begin < t_end)) throw ConfigError("time grid: t0 must be below T");
    if (step_count < 4) throw ConfigError("time grid: need at least 4 steps");
    if (step_count % 2 != 0)
        throw ConfigError("time grid: step count must be even (T' must be a grid node)");
    TimeGrid g;
    g.t_begin = t_begin;
    g.t_end = t_end;
    g.step_count = step_count;
    g.dt = (t_end - t_begin) / static_cast<double>(step_count);
    return g;
}

ScalarField make_field(const SpatialGrid& grid, double fill) {
    ScalarField f;
    f.grid = grid;
    f.values.assign(static_cast<size_t>(grid.node_count), fill);
    return f;
}

ScalarField sine_mode_field(const SpatialGrid& grid, int mode, double amplitude) {
    ScalarField f = make_field(grid);
    const int last = grid.node_count - 1;
    for (int i = 1; i < last; ++i)
        f[i] = amplitude * std::sin(mode * M_PI * grid.node(i) / grid.length);
    return f;
}

ScalarField SpaceTimeField::snapshot(int k) const {
    ScalarField f = make_field(space);
    const auto s = slice(k);
    std::copy(s.begin(), s.end(), f.values.begin());
    return f;
}

SpaceTimeField make_spacetime_field(const SpatialGrid& space, const TimeGrid& time, double fill) {
    SpaceTimeField f;
    f.space = space;
    f.time = time;
    f.values.assign(static_cast<size_t>(time.node_count()) * space.node_count, fill);
    return f;
}

SubIntervalSet make_subintervals(Interval omega, Interval omega_second, Interval omega_prime,
                                 double domain_length) {
    auto ordered = [](const Interval& v) { return v.lo < v.hi; };
    if (!ordered(omega) || !ordered(omega_second) || !ordered(omega_prime))
        throw ConfigError("subintervals: each interval needs lo < hi");
    auto strictly_inside = [](const Interval& inner, const Interval& outer) {
        return inner.lo > outer.lo && inner.hi < outer.hi;
    };
    if (!strictly_inside(omega, {0.0, domain_length}))
        throw ConfigError("subintervals: omega must be strictly inside the domain");
    if (!strictly_inside(omega_second, omega))
        throw ConfigError("subintervals: omega'' must be strictly inside omega");
    if (!strictly_inside(omega_prime, omega_second))
        throw ConfigError("subintervals: omega' must be strictly inside omega''");
    return {omega, omega_second, omega_prime};
}

namespace {

// Integral of the piecewise-linear interpolant from node 0 up to coordinate c.
double interpolant_antiderivative(const ScalarField& f, double c) {
    const SpatialGrid& g = f.grid;
    const double h = g.spacing;
    if (c <= 0.0) return 0.0;
    int cell = static_cast<int>(std::floor(c / h));
    cell = std::clamp(cell, 0, g.node_count - 2);
    double acc = 0.0;
    for (int j = 0; j < cell; ++j) acc += 0.5 * h * (f[j] + f[j + 1]);
    const double x_cell = g.node(cell);
    const double frac = std::min(c, g.length) - x_cell;
    if (frac > 0.0) {
        const double theta = frac / h;
        const double f_at_c = f[cell] * (1.0 - theta) + f[cell + 1] * theta;
        acc += 0.5 * frac * (f[cell] + f_at_c);
    }
    return acc;
}

void check_region(const SpatialGrid& g, Interval region) {
    const double slack = 1e-12 * g.length;
    if (region.lo < -slack || region.hi > g.length + slack)
        throw PreconditionError("integration region must lie within [0, L]");
}

}  // namespace

double integrate_space(const ScalarField& f, Interval region) {
    check_region(f.grid, region);
    if (!(region.hi > region.lo)) return 0.0;
    return interpolant_antiderivative(f, region.hi) - interpolant_antiderivative(f, region.lo);
}

std::vector<double> quadrature_weights(const SpatialGrid& grid, Interval region) {
    check_region(grid, region);
    std::vector<double> w(static_cast<size_t>(grid.node_count), 0.0);
    if (!(region.hi > region.lo)) return w;
    const double h = grid.spacing;
    for (int j = 0; j + 1 < grid.node_count; ++j) {
        const double a = std::max(region.lo, grid.node(j));
        const double b = std::min(region.hi, grid.node(j + 1));
        if (!(b > a)) continue;
        // Exact integral of the linear interpolant over [a, b] within cell j.
        const double ta = (a - grid.node(j)) / h;
        const double tb = (b - grid.node(j)) / h;
        const double len = b - a;
        const double mid = 0.5 * (ta + tb);
        w[static_cast<size_t>(j)] += len * (1.0 - mid);
        w[static_cast<size_t>(j) + 1] += len * mid;
    }
    return w;
}

double integrate_spacetime(const SpaceTimeField& f, Interval region) {
    return integrate_spacetime_window(f, region, 0, f.time.step_count);
}

double integrate_spacetime_window(const SpaceTimeField& f, Interval region, int k_begin, int k_end) {
    double acc = 0.0;
    ScalarField slice = make_field(f.space);
    for (int k = k_begin; k <= k_end; ++k) {
        const auto s = f.slice(k);
        std::copy(s.begin(), s.end(), slice.values.begin());
        const double wt = (k == k_begin || k == k_end) ? 0.5 * f.time.dt : f.time.dt;
        acc += wt * integrate_space(slice, region);
    }
    return acc;
}

double l2_norm_sq(const ScalarField& f) { return l2_norm_sq(f, {0.0, f.grid.length}); }

double l2_norm_sq(const ScalarField& f, Interval region) {
    ScalarField sq = make_field(f.grid);
    for (int i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
    return integrate_space(sq, region);
}

void write_csv(const ScalarField& f, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"x", "value"});
    for (int i = 0; i < f.size(); ++i) csv.row({f.grid.node(i), f[i]});
}

void write_csv(const SpaceTimeField& f, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"x", "t", "value"});
    for (int k = 0; k <= f.time.step_count; ++k)
        for (int i = 0; i < f.space.node_count; ++i)
            csv.row({f.space.node(i), f.time.node(k), f.at(k, i)});
}

}  // namespace clab
