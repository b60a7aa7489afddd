#pragma once

#include "clab/grid.hpp"
#include "clab/weights.hpp"

namespace clab {

/// Three-point second-difference at interior nodes; boundary rows carry the
/// identity (Dirichlet values are prescribed, not differentiated).
ScalarField discrete_laplacian(const ScalarField& f);
SpaceTimeField discrete_laplacian(const SpaceTimeField& f);

/// Centered differences at interior time nodes, one-sided second order at the
/// window edges. Exact on polynomials of degree <= 2.
SpaceTimeField time_derivative(const SpaceTimeField& f);

/// Centered first differences in x, one-sided second order at the endpoints.
SpaceTimeField spatial_gradient(const SpaceTimeField& f);
ScalarField spatial_gradient(const ScalarField& f);

/// psi = exp(-s eta) q, exactly zero on the window-edge slices.
SpaceTimeField conjugate_decay(const SpaceTimeField& q, const WeightSet& w, double s);

/// M1 psi = -lap psi - s^2 lambda^2 |beta'|^2 phi^2 psi + s (dt eta) psi.
/// The weight-coefficient terms take their analytic-limit value 0 on the
/// window-edge slices (where psi itself decays to zero) and drop out
/// entirely for s = 0.
SpaceTimeField apply_M1(const SpaceTimeField& psi, const WeightSet& w, double s);

/// M2 psi = dt psi + 2 s lambda phi beta' dx psi + 2 s lambda^2 phi |beta'|^2 psi.
SpaceTimeField apply_M2(const SpaceTimeField& psi, const WeightSet& w, double s);

/// The three weighted energy terms of the functional
///   I(q) = 1/s  iint e^{-2 s eta} phi^-1 (|dt q|^2 + |lap q|^2)
///        + s l^2 iint e^{-2 s eta} phi   |dx q|^2
///        + s^3 l^4 iint e^{-2 s eta} phi^3 |q|^2.
struct FunctionalBreakdown {
    double s = 0.0;
    double lambda = 0.0;
    double term_dtlap = 0.0;
    double term_grad = 0.0;
    double term_zero = 0.0;
    double total() const { return term_dtlap + term_grad + term_zero; }
};

/// Requires q = 0 on the spatial boundary at every time node.
FunctionalBreakdown eval_I(const SpaceTimeField& q, const WeightSet& w, double s);

void append_csv_row(const FunctionalBreakdown& b, class CsvWriter& csv);

}  // namespace clab
