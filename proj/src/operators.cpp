#include "clab/operators.hpp"

#include <cmath>

#include "clab/csv.hpp"
#include "clab/errors.hpp"

namespace clab {

ScalarField discrete_laplacian(const ScalarField& f) {
    ScalarField out = make_field(f.grid);
    const int n = f.grid.node_count;
    const double inv_h2 = 1.0 / (f.grid.spacing * f.grid.spacing);
    out[0] = f[0];
    out[n - 1] = f[n - 1];
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_h2;
    return out;
}

SpaceTimeField discrete_laplacian(const SpaceTimeField& f) {
    SpaceTimeField out = make_spacetime_field(f.space, f.time);
    const int n = f.space.node_count;
    const double inv_h2 = 1.0 / (f.space.spacing * f.space.spacing);
    for (int k = 0; k <= f.time.step_count; ++k) {
        out.at(k, 0) = f.at(k, 0);
        out.at(k, n - 1) = f.at(k, n - 1);
        for (int i = 1; i < n - 1; ++i)
            out.at(k, i) = (f.at(k, i - 1) - 2.0 * f.at(k, i) + f.at(k, i + 1)) * inv_h2;
    }
    return out;
}

SpaceTimeField time_derivative(const SpaceTimeField& f) {
    SpaceTimeField out = make_spacetime_field(f.space, f.time);
    const int nt = f.time.step_count;
    const int n = f.space.node_count;
    const double inv_2dt = 1.0 / (2.0 * f.time.dt);
    for (int i = 0; i < n; ++i) {
        out.at(0, i) = (-3.0 * f.at(0, i) + 4.0 * f.at(1, i) - f.at(2, i)) * inv_2dt;
        out.at(nt, i) = (3.0 * f.at(nt, i) - 4.0 * f.at(nt - 1, i) + f.at(nt - 2, i)) * inv_2dt;
    }
    for (int k = 1; k < nt; ++k)
        for (int i = 0; i < n; ++i) out.at(k, i) = (f.at(k + 1, i) - f.at(k - 1, i)) * inv_2dt;
    return out;
}

ScalarField spatial_gradient(const ScalarField& f) {
    ScalarField out = make_field(f.grid);
    const int n = f.grid.node_count;
    const double inv_2h = 1.0 / (2.0 * f.grid.spacing);
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv_2h;
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv_2h;
    for (int i = 1; i < n - 1; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv_2h;
    return out;
}

SpaceTimeField spatial_gradient(const SpaceTimeField& f) {
    SpaceTimeField out = make_spacetime_field(f.space, f.time);
    const int n = f.space.node_count;
    const double inv_2h = 1.0 / (2.0 * f.space.spacing);
    for (int k = 0; k <= f.time.step_count; ++k) {
        out.at(k, 0) = (-3.0 * f.at(k, 0) + 4.0 * f.at(k, 1) - f.at(k, 2)) * inv_2h;
        out.at(k, n - 1) =
            (3.0 * f.at(k, n - 1) - 4.0 * f.at(k, n - 2) + f.at(k, n - 3)) * inv_2h;
        for (int i = 1; i < n - 1; ++i) out.at(k, i) = (f.at(k, i + 1) - f.at(k, i - 1)) * inv_2h;
    }
    return out;
}

SpaceTimeField conjugate_decay(const SpaceTimeField& q, const WeightSet& w, double s) {
    SpaceTimeField out = make_spacetime_field(q.space, q.time);
    const WeightTables tab = build_weight_tables(w, q.space, q.time);
    const int n = q.space.node_count;
    for (int k = 0; k <= q.time.step_count; ++k) {
        const bool edge = k == 0 || k == q.time.step_count;
        for (int i = 0; i < n; ++i) {
            if (edge) {
                out.at(k, i) = s == 0.0 ? q.at(k, i) : 0.0;
            } else {
                const double e = -s * tab.eta_num[static_cast<size_t>(i)] *
                                 tab.inv_d[static_cast<size_t>(k)];
                out.at(k, i) = std::exp(e) * q.at(k, i);
            }
        }
    }
    return out;
}

SpaceTimeField apply_M1(const SpaceTimeField& psi, const WeightSet& w, double s) {
    const SpaceTimeField lap = discrete_laplacian(psi);
    SpaceTimeField out = make_spacetime_field(psi.space, psi.time);
    if (s == 0.0) {
        for (size_t idx = 0; idx < out.values.size(); ++idx) out.values[idx] = -lap.values[idx];
        return out;
    }
    const WeightTables tab = build_weight_tables(w, psi.space, psi.time);
    const double lam = w.lambda();
    const int n = psi.space.node_count;
    for (int k = 0; k <= psi.time.step_count; ++k) {
        const double inv_d = tab.inv_d[static_cast<size_t>(k)];
        const double dp = tab.d_prime[static_cast<size_t>(k)];
        for (int i = 0; i < n; ++i) {
            double v = -lap.at(k, i);
            const double p = psi.at(k, i);
            if (p != 0.0) {
                const double phi = std::exp(tab.lam_beta[static_cast<size_t>(i)]) * inv_d;
                const double bp = tab.beta_prime[static_cast<size_t>(i)];
                const double dteta =
                    -tab.eta_num[static_cast<size_t>(i)] * dp * inv_d * inv_d;
                v += -s * s * lam * lam * bp * bp * phi * phi * p + s * dteta * p;
            }
            out.at(k, i) = v;
        }
    }
    return out;
}

SpaceTimeField apply_M2(const SpaceTimeField& psi, const WeightSet& w, double s) {
    const SpaceTimeField dt = time_derivative(psi);
    if (s == 0.0) return dt;
    const SpaceTimeField dx = spatial_gradient(psi);
    SpaceTimeField out = make_spacetime_field(psi.space, psi.time);
    const WeightTables tab = build_weight_tables(w, psi.space, psi.time);
    const double lam = w.lambda();
    const int n = psi.space.node_count;
    for (int k = 0; k <= psi.time.step_count; ++k) {
        const double inv_d = tab.inv_d[static_cast<size_t>(k)];
        const bool edge = k == 0 || k == psi.time.step_count;
        for (int i = 0; i < n; ++i) {
            double v = dt.at(k, i);
            if (!edge) {
                const double phi = std::exp(tab.lam_beta[static_cast<size_t>(i)]) * inv_d;
                const double bp = tab.beta_prime[static_cast<size_t>(i)];
                const double g = dx.at(k, i);
                const double p = psi.at(k, i);
                if (g != 0.0) v += 2.0 * s * lam * phi * bp * g;
                if (p != 0.0) v += 2.0 * s * lam * lam * phi * bp * bp * p;
            }
            out.at(k, i) = v;
        }
    }
    return out;
}

namespace {

void require_zero_boundary(const SpaceTimeField& q) {
    const int last = q.space.node_count - 1;
    for (int k = 0; k <= q.time.step_count; ++k)
        if (q.at(k, 0) != 0.0 || q.at(k, last) != 0.0)
            throw PreconditionError("field must vanish on the spatial boundary");
}

}  // namespace

FunctionalBreakdown eval_I(const SpaceTimeField& q, const WeightSet& w, double s) {
    require_zero_boundary(q);
    const SpaceTimeField dt = time_derivative(q);
    const SpaceTimeField lap = discrete_laplacian(q);
    const SpaceTimeField dx = spatial_gradient(q);
    const WeightTables tab = build_weight_tables(w, q.space, q.time);

    SpaceTimeField f_dtlap = make_spacetime_field(q.space, q.time);
    SpaceTimeField f_grad = make_spacetime_field(q.space, q.time);
    SpaceTimeField f_zero = make_spacetime_field(q.space, q.time);
    const int n = q.space.node_count;
    for (int k = 1; k < q.time.step_count; ++k) {
        const double inv_d = tab.inv_d[static_cast<size_t>(k)];
        const double log_d = tab.log_d[static_cast<size_t>(k)];
        for (int i = 0; i < n; ++i) {
            const double lb = tab.lam_beta[static_cast<size_t>(i)];
            const double core = -2.0 * s * tab.eta_num[static_cast<size_t>(i)] * inv_d;
            const double logphi = lb - log_d;
            const double w_m1 = std::exp(core - logphi);
            const double w_p1 = std::exp(core + logphi);
            const double w_p3 = std::exp(core + 3.0 * logphi);
            f_dtlap.at(k, i) = w_m1 * (dt.at(k, i) * dt.at(k, i) + lap.at(k, i) * lap.at(k, i));
            f_grad.at(k, i) = w_p1 * dx.at(k, i) * dx.at(k, i);
            f_zero.at(k, i) = w_p3 * q.at(k, i) * q.at(k, i);
        }
    }
    const Interval full{0.0, q.space.length};
    const double lam = w.lambda();
    FunctionalBreakdown b;
    b.s = s;
    b.lambda = lam;
    b.term_dtlap = integrate_spacetime(f_dtlap, full) / s;
    b.term_grad = s * lam * lam * integrate_spacetime(f_grad, full);
    b.term_zero = s * s * s * lam * lam * lam * lam * integrate_spacetime(f_zero, full);
    return b;
}

void append_csv_row(const FunctionalBreakdown& b, CsvWriter& csv) {
    csv.row({b.s, b.lambda, b.term_dtlap, b.term_grad, b.term_zero, b.total()});
}

}  // namespace clab
