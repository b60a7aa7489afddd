#pragma once

#include <vector>

#include "clab/grid.hpp"

namespace clab {

/// Parameters of the weighted estimates: the geometry profile is scaled by
/// lambda, the decay strength by s, and the profile lift by m.
struct CarlemanConfig {
    double lambda = 2.0;  // >= 1
    double s = 8.0;       // > 1
    double m = 1.2;       // > 1
    SubIntervalSet subintervals;
    double x0 = 0.5;  // critical point, strictly inside omega_prime
};

void validate(const CarlemanConfig& cfg);

/// Cubic geometry profile b(x) = x (L - x) (1 + kappa (x_crit - x)), positive
/// inside (0, L), vanishing at the endpoints, with its unique interior
/// critical point at x_crit and inward-sloping boundary derivatives. The
/// lifted profile is b(x) + K with K = m * max b.
struct BetaProfile {
    double length = 1.0;
    double kappa = 0.0;
    double x_crit = 0.5;
    double m = 2.0;
    double scale = 1.0;       // amplitude of the cubic (0 models a degenerate profile)
    double max_value = 0.25;  // attained at x_crit
    double K = 0.5;           // m * max_value
    // expanded coefficients of the cubic (for derivative evaluation)
    double c3 = 0.0, c2 = -1.0, c1 = 1.0;

    double value(double x) const {
        return scale * x * (length - x) * (1.0 + kappa * (x_crit - x));
    }
    double derivative(double x) const { return (3.0 * c3 * x + 2.0 * c2) * x + c1; }
    double second_derivative(double x) const { return 6.0 * c3 * x + 2.0 * c2; }
    double lifted(double x) const { return value(x) + K; }
    double lifted_max() const { return max_value + K; }
};

BetaProfile build_beta(const SpatialGrid& grid, const SubIntervalSet& subintervals, double x0,
                       double m);

struct BetaValidation {
    bool interior_positive = false;
    bool boundary_zero = false;
    bool gradient_bounded_away = false;
    bool endpoint_signs = false;
    double min_gradient_outside = 0.0;
    bool pass() const {
        return interior_positive && boundary_zero && gradient_bounded_away && endpoint_signs;
    }
};

BetaValidation validate_beta(const BetaProfile& profile, const SubIntervalSet& subintervals,
                             const SpatialGrid& grid);

/// C^2 cut-off: 1 on omega_prime, quintic-smoothstep transitions inside
/// omega_second, 0 outside.
struct CutoffProfile {
    Interval plateau;  // omega_prime
    Interval support;  // omega_second

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;
};

CutoffProfile build_cutoff(const SubIntervalSet& subintervals);

/// Weight evaluators built from a geometry profile, a time window, and lambda.
///
/// phi(x,t) = exp(lambda beta(x)) / ((t - t0)(T - t))
/// eta(x,t) = (exp(2 lambda K) - exp(lambda beta(x))) / ((t - t0)(T - t))
///
/// Products exp(-2 s eta) phi^k are evaluated entirely in log space; the
/// value at t in {t0, T} is the analytic limit 0 (1 for the empty exponent
/// s = 0, k = 0).
class WeightSet {
public:
    WeightSet(BetaProfile beta, TimeGrid window, double lambda, SubIntervalSet subintervals);

    const BetaProfile& beta() const { return beta_; }
    const TimeGrid& window() const { return window_; }
    double lambda() const { return lambda_; }
    const SubIntervalSet& subintervals() const { return subintervals_; }

    double phi(double x, double t) const;
    double eta(double x, double t) const;
    double log_phi(double x, double t) const;
    double dt_phi(double x, double t) const;
    double dt_eta(double x, double t) const;

    /// -2 s eta + k log phi at an interior time.
    double exponent(double x, double t, int k, double s) const;
    /// exp(-2 s eta) phi^k with the endpoint limit convention.
    double weighted(double x, double t, int k, double s) const;
    /// exp(-s eta) with the endpoint limit convention.
    double decay(double x, double t, double s) const;

    bool at_window_edge(double t) const;

private:
    void check_domain(double t) const;
    BetaProfile beta_;
    TimeGrid window_;
    double lambda_;
    SubIntervalSet subintervals_;
    double exp_2lk_;  // exp(2 lambda K)
};

WeightSet make_weight_set(const BetaProfile& beta, const TimeGrid& window, double lambda,
                          const SubIntervalSet& subintervals);

/// Per-node tables for tight evaluation loops over a full space-time grid.
struct WeightTables {
    std::vector<double> lam_beta;    // lambda * beta(x_i)
    std::vector<double> eta_num;     // exp(2 lambda K) - exp(lambda beta(x_i))
    std::vector<double> beta_prime;  // beta'(x_i)
    std::vector<double> inv_d;       // 1 / ((t_k - t0)(T - t_k)), 0 at window edges
    std::vector<double> log_d;       // log of the denominator, interior nodes
    std::vector<double> d_prime;     // d/dt of the denominator: t0 + T - 2 t_k
};

WeightTables build_weight_tables(const WeightSet& w, const SpatialGrid& space, const TimeGrid& time);

/// Empirical minimal constants of the pointwise weight bounds, scanned over
/// interior grid nodes with closed-form time derivatives:
///   |dphi/dt| <= c T phi^2,  |deta/dt| <= c T phi^2,
///   phi <= c T^4 phi^3,      phi^3 <= c T^8 phi^7,   1 <= c T^6 phi^3.
struct WeightBoundReport {
    double c_dt_phi = 0.0;
    double c_dt_eta = 0.0;
    double c_phi_vs_phi3 = 0.0;
    double c_phi3_vs_phi7 = 0.0;
    double c_one_vs_phi3 = 0.0;
    double phi_min = 0.0;  // over the scanned interior nodes
    bool all_finite = false;
};

WeightBoundReport check_weight_bounds(const WeightSet& w, const SpatialGrid& space,
                                      const TimeGrid& time);

/// Snapshot export (x, t, phi, eta, w_k) for plotting.
void write_weight_snapshot_csv(const WeightSet& w, const SpatialGrid& space, const TimeGrid& time,
                               double s, int k, const std::string& path);

}  // namespace clab
