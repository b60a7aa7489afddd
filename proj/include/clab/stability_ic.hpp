#pragma once

#include <span>
#include <string>
#include <vector>

#include "clab/scenario.hpp"

namespace clab {

/// Max over the first half-window of (|y1(t)|^2 + |z1(t)|^2) / |gamma|^2 for
/// the source-driven split part with zero initial data.
struct GronwallReport {
    double empirical_constant = 0.0;
    double gamma_norm_sq = 0.0;
    bool degenerate = false;  // gamma identically zero
};

GronwallReport lemma41_check(const Scenario& sc, const ScalarField& gamma);

/// Sup-norm of the 2x2 coupling matrix field (largest spectral norm over the
/// nodes); anchors the scan of the convexity rate constant.
double coupling_sup_norm(const CoefficientSet& coeffs);

/// Interpolation profile mu(t) = (e^{-C t0} - e^{-C t}) / (e^{-C t0} - e^{-C T'}).
double convexity_profile(double t, double c, double t_begin, double t_mid);

/// Log-convexity check of the data-driven split part W = (y2, z2): searches
/// the scanned rate constants for the smallest C1 >= 1 with
///   |W(t)|^2 <= C1 M^{1-mu(t)} (|W(T')|^2)^{mu(t)}  on [t0, T'],
/// where M = sup of |W(t)|^2 over the half-window.
struct LogConvexityRecord {
    double scan_constant = 0.0;  // best C from the scan
    double c1 = 0.0;             // smallest admissible C1 for it
    double bound_m = 0.0;
    std::vector<double> t, wnorm_sq, mu, rhs, margin;  // per node of [t0, T']
    bool pass = false;
    bool degenerate = false;
};

LogConvexityRecord logconvexity_check(const Scenario& sc, const ScalarField& y0,
                                      const ScalarField& z0, std::span<const double> c_scan);

/// Data-derived initial condition for the difference dynamics built from a
/// perturbed/reference pair, then the same check.
LogConvexityRecord logconvexity_check_pair(const Scenario& sc, const ScalarField& gamma,
                                           const ScalarField& du0, const ScalarField& dv0,
                                           std::span<const double> c_scan);

enum class ICRecordFlag { Ok, DegenerateZero, OutOfRange };

/// One point of the log-stability experiment: the data error E, the squared
/// initial-condition error, and their log product. Records with E = 0 or
/// E >= 1 fall outside the bound's regime and are flagged.
struct ICStabilityRecord {
    double eps = 0.0;
    double data_error = 0.0;  // E
    double ic_error = 0.0;
    double product = 0.0;  // ic_error * |log E|
    ICRecordFlag flag = ICRecordFlag::Ok;
};

std::vector<ICStabilityRecord> ic_stability_experiment(const Scenario& sc,
                                                       std::span<const double> eps_list,
                                                       const ScalarField& gamma_shape,
                                                       const ScalarField& du0_shape,
                                                       const ScalarField& dv0_shape);

double max_product(std::span<const ICStabilityRecord> records);

/// Cross-check of the time-translation identity U(t0) = U(T') - int y dt over
/// the half-window (trapezoidal); returns the relative L2 error.
double initial_reconstruction_error(const Scenario& sc, const ScalarField& gamma,
                                    const ScalarField& du0, const ScalarField& dv0);

/// Squared H2-type snapshot norm: |f|^2 + |lap f|^2 with boundary rows of the
/// discrete Laplacian excluded.
double h2_norm_sq(const ScalarField& f);

void write_ic_records_csv(std::span<const ICStabilityRecord> records, const std::string& path);
void write_logconvexity_csv(const LogConvexityRecord& rec, const std::string& path);

}  // namespace clab
