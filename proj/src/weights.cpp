#include "clab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clab/csv.hpp"
#include "clab/errors.hpp"

namespace clab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void validate(const CarlemanConfig& cfg) {
    if (!(cfg.lambda >= 1.0)) throw ConfigError("carleman config: lambda must be >= 1");
    if (!(cfg.s > 1.0)) throw ConfigError("carleman config: s must be > 1");
    if (!(cfg.m > 1.0)) throw ConfigError("carleman config: m must be > 1");
    const Interval& wp = cfg.subintervals.omega_prime;
    if (!(cfg.x0 > wp.lo && cfg.x0 < wp.hi))
        throw ConfigError("carleman config: x0 must be strictly inside omega'");
}

BetaProfile build_beta(const SpatialGrid& grid, const SubIntervalSet& subintervals, double x0,
                       double m) {
    const double L = grid.length;
    const Interval& wp = subintervals.omega_prime;
    if (!(x0 > wp.lo && x0 < wp.hi))
        throw ConfigError("beta profile: x0 must be strictly inside omega'");
    if (!(m > 1.0)) throw ConfigError("beta profile: m must be > 1");

    // kappa tilts the parabola x(L-x) so the critical point lands on x0.
    const double kappa = (L - 2.0 * x0) / (x0 * (L - x0));
    if (!(std::abs(kappa) < 1.0 / L))
        throw ConfigError(
            "beta profile: x0 too far off-center for a valid cubic tilt; recenter omega'");

    BetaProfile p;
    p.length = L;
    p.kappa = kappa;
    p.x_crit = x0;
    p.m = m;
    p.scale = 1.0;
    const double a = 1.0 + kappa * x0;
    p.c3 = kappa;
    p.c2 = -(a + kappa * L);
    p.c1 = a * L;
    p.max_value = p.value(x0);
    p.K = m * p.max_value;
    return p;
}

BetaValidation validate_beta(const BetaProfile& profile, const SubIntervalSet& subintervals,
                             const SpatialGrid& grid) {
    BetaValidation v;
    v.interior_positive = true;
    for (int i = 1; i < grid.node_count - 1; ++i)
        if (!(profile.value(grid.node(i)) > 0.0)) v.interior_positive = false;
    v.boundary_zero = profile.value(0.0) == 0.0 && profile.value(grid.length) == 0.0;

    const Interval& wp = subintervals.omega_prime;
    double min_grad = kInf;
    for (int i = 0; i < grid.node_count; ++i) {
        const double x = grid.node(i);
        if (x > wp.lo && x < wp.hi) continue;
        min_grad = std::min(min_grad, std::abs(profile.derivative(x)));
    }
    v.min_gradient_outside = min_grad;
    v.gradient_bounded_away = min_grad > 0.0;
    v.endpoint_signs = profile.derivative(0.0) > 0.0 && profile.derivative(grid.length) < 0.0;
    return v;
}

namespace {

// Quintic smoothstep: C^2, flat to second order at both ends.
double smoothstep5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep5_d1(double t) { return t * t * (30.0 + t * (-60.0 + 30.0 * t)); }
double smoothstep5_d2(double t) { return t * (60.0 + t * (-180.0 + 120.0 * t)); }

}  // namespace

double CutoffProfile::value(double x) const {
    if (x <= support.lo || x >= support.hi) return 0.0;
    if (x >= plateau.lo && x <= plateau.hi) return 1.0;
    const double raw = x < plateau.lo
                           ? smoothstep5((x - support.lo) / (plateau.lo - support.lo))
                           : smoothstep5((support.hi - x) / (support.hi - plateau.hi));
    return std::min(1.0, std::max(0.0, raw));
}

double CutoffProfile::derivative(double x) const {
    if (x <= support.lo || x >= support.hi) return 0.0;
    if (x >= plateau.lo && x <= plateau.hi) return 0.0;
    if (x < plateau.lo) {
        const double g = plateau.lo - support.lo;
        return smoothstep5_d1((x - support.lo) / g) / g;
    }
    const double g = support.hi - plateau.hi;
    return -smoothstep5_d1((support.hi - x) / g) / g;
}

double CutoffProfile::second_derivative(double x) const {
    if (x <= support.lo || x >= support.hi) return 0.0;
    if (x >= plateau.lo && x <= plateau.hi) return 0.0;
    if (x < plateau.lo) {
        const double g = plateau.lo - support.lo;
        return smoothstep5_d2((x - support.lo) / g) / (g * g);
    }
    const double g = support.hi - plateau.hi;
    return smoothstep5_d2((support.hi - x) / g) / (g * g);
}

CutoffProfile build_cutoff(const SubIntervalSet& subintervals) {
    const Interval& inner = subintervals.omega_prime;
    const Interval& outer = subintervals.omega_second;
    if (!(inner.lo > outer.lo && inner.hi < outer.hi))
        throw ConfigError("cutoff: omega' must be strictly inside omega''");
    return {inner, outer};
}

WeightSet::WeightSet(BetaProfile beta, TimeGrid window, double lambda, SubIntervalSet subintervals)
    : beta_(beta), window_(window), lambda_(lambda), subintervals_(subintervals) {
    if (!(lambda >= 0.0)) throw ConfigError("weights: lambda must be nonnegative");
    exp_2lk_ = std::exp(2.0 * lambda_ * beta_.K);
}

WeightSet make_weight_set(const BetaProfile& beta, const TimeGrid& window, double lambda,
                          const SubIntervalSet& subintervals) {
    return WeightSet(beta, window, lambda, subintervals);
}

void WeightSet::check_domain(double t) const {
    if (t < window_.t_begin || t > window_.t_end)
        throw std::domain_error("weight evaluation outside the time window");
}

bool WeightSet::at_window_edge(double t) const {
    return t == window_.t_begin || t == window_.t_end;
}

double WeightSet::phi(double x, double t) const {
    check_domain(t);
    if (at_window_edge(t)) return kInf;
    return std::exp(lambda_ * beta_.lifted(x)) * window_.endpoint_factor(t);
}

double WeightSet::eta(double x, double t) const {
    check_domain(t);
    if (at_window_edge(t)) return lambda_ == 0.0 ? 0.0 : kInf;
    return (exp_2lk_ - std::exp(lambda_ * beta_.lifted(x))) * window_.endpoint_factor(t);
}

double WeightSet::log_phi(double x, double t) const {
    check_domain(t);
    if (at_window_edge(t)) return kInf;
    const double d = (t - window_.t_begin) * (window_.t_end - t);
    return lambda_ * beta_.lifted(x) - std::log(d);
}

double WeightSet::dt_phi(double x, double t) const {
    check_domain(t);
    const double d = (t - window_.t_begin) * (window_.t_end - t);
    const double dp = window_.t_begin + window_.t_end - 2.0 * t;  // d/dt of the denominator
    if (d <= 0.0) return kInf;
    return -std::exp(lambda_ * beta_.lifted(x)) * dp / (d * d);
}

double WeightSet::dt_eta(double x, double t) const {
    check_domain(t);
    const double d = (t - window_.t_begin) * (window_.t_end - t);
    const double dp = window_.t_begin + window_.t_end - 2.0 * t;
    if (d <= 0.0) return kInf;
    return -(exp_2lk_ - std::exp(lambda_ * beta_.lifted(x))) * dp / (d * d);
}

double WeightSet::exponent(double x, double t, int k, double s) const {
    check_domain(t);
    const double d = (t - window_.t_begin) * (window_.t_end - t);
    const double eta_num = exp_2lk_ - std::exp(lambda_ * beta_.lifted(x));
    return -2.0 * s * eta_num / d + k * (lambda_ * beta_.lifted(x) - std::log(d));
}

double WeightSet::weighted(double x, double t, int k, double s) const {
    check_domain(t);
    if (at_window_edge(t)) return (s == 0.0 && k == 0) ? 1.0 : 0.0;
    return std::exp(exponent(x, t, k, s));
}

double WeightSet::decay(double x, double t, double s) const {
    check_domain(t);
    if (at_window_edge(t)) return s == 0.0 ? 1.0 : 0.0;
    const double d = (t - window_.t_begin) * (window_.t_end - t);
    const double eta_num = exp_2lk_ - std::exp(lambda_ * beta_.lifted(x));
    return std::exp(-s * eta_num / d);
}

WeightTables build_weight_tables(const WeightSet& w, const SpatialGrid& space,
                                 const TimeGrid& time) {
    WeightTables t;
    const int n = space.node_count;
    t.lam_beta.resize(static_cast<size_t>(n));
    t.eta_num.resize(static_cast<size_t>(n));
    t.beta_prime.resize(static_cast<size_t>(n));
    const double e2lk = std::exp(2.0 * w.lambda() * w.beta().K);
    for (int i = 0; i < n; ++i) {
        const double x = space.node(i);
        t.lam_beta[static_cast<size_t>(i)] = w.lambda() * w.beta().lifted(x);
        t.eta_num[static_cast<size_t>(i)] = e2lk - std::exp(t.lam_beta[static_cast<size_t>(i)]);
        t.beta_prime[static_cast<size_t>(i)] = w.beta().derivative(x);
    }
    const int nk = time.node_count();
    t.inv_d.assign(static_cast<size_t>(nk), 0.0);
    t.log_d.assign(static_cast<size_t>(nk), 0.0);
    t.d_prime.assign(static_cast<size_t>(nk), 0.0);
    for (int k = 1; k < time.step_count; ++k) {
        const double tk = time.node(k);
        const double d = (tk - time.t_begin) * (time.t_end - tk);
        t.inv_d[static_cast<size_t>(k)] = 1.0 / d;
        t.log_d[static_cast<size_t>(k)] = std::log(d);
        t.d_prime[static_cast<size_t>(k)] = time.t_begin + time.t_end - 2.0 * tk;
    }
    return t;
}

WeightBoundReport check_weight_bounds(const WeightSet& w, const SpatialGrid& space,
                                      const TimeGrid& time) {
    WeightBoundReport r;
    const double t_scale = time.t_end;
    const double t2 = t_scale * t_scale;
    const double t4 = t2 * t2;
    const double t6 = t4 * t2;
    const double t8 = t4 * t4;
    double phi_min = kInf;
    for (int k = 1; k < time.step_count; ++k) {
        const double t = time.node(k);
        for (int i = 0; i < space.node_count; ++i) {
            const double x = space.node(i);
            const double phi = w.phi(x, t);
            const double phi2 = phi * phi;
            phi_min = std::min(phi_min, phi);
            r.c_dt_phi = std::max(r.c_dt_phi, std::abs(w.dt_phi(x, t)) / (t_scale * phi2));
            r.c_dt_eta = std::max(r.c_dt_eta, std::abs(w.dt_eta(x, t)) / (t_scale * phi2));
            r.c_phi_vs_phi3 = std::max(r.c_phi_vs_phi3, 1.0 / (t4 * phi2));
            r.c_phi3_vs_phi7 = std::max(r.c_phi3_vs_phi7, 1.0 / (t8 * phi2 * phi2));
            r.c_one_vs_phi3 = std::max(r.c_one_vs_phi3, 1.0 / (t6 * phi2 * phi));
        }
    }
    r.phi_min = phi_min;
    r.all_finite = std::isfinite(r.c_dt_phi) && std::isfinite(r.c_dt_eta) &&
                   std::isfinite(r.c_phi_vs_phi3) && std::isfinite(r.c_phi3_vs_phi7) &&
                   std::isfinite(r.c_one_vs_phi3);
    return r;
}

void write_weight_snapshot_csv(const WeightSet& w, const SpatialGrid& space, const TimeGrid& time,
                               double s, int k, const std::string& path) {
    CsvWriter csv(path);
    csv.raw_row({"x", "t", "phi", "eta", "w" + std::to_string(k)});
    for (int kt = 0; kt <= time.step_count; ++kt) {
        const double t = time.node(kt);
        for (int i = 0; i < space.node_count; ++i) {
            const double x = space.node(i);
            const bool edge = w.at_window_edge(t);
            csv.row({x, t, edge ? std::numeric_limits<double>::infinity() : w.phi(x, t),
                     edge ? std::numeric_limits<double>::infinity() : w.eta(x, t),
                     w.weighted(x, t, k, s)});
        }
    }
}

}  // namespace clab
