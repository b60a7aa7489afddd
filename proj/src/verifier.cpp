#include "clab/verifier.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "clab/csv.hpp"
#include "clab/errors.hpp"
#include "clab/parallel.hpp"

namespace clab {

namespace {

constexpr double kDegenerateFloor = 1e-300;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

void require_zero_boundary(const SpaceTimeField& q) {
    const int last = q.space.node_count - 1;
    for (int k = 0; k <= q.time.step_count; ++k)
        if (q.at(k, 0) != 0.0 || q.at(k, last) != 0.0)
            throw PreconditionError("test field must vanish on the spatial boundary");
}

std::string fingerprint(const char* id, const WeightSet& w, const SpaceTimeField& q, double s) {
    std::ostringstream os;
    os << id << ";n=" << q.space.node_count << ";nt=" << q.time.step_count
       << ";L=" << format_double(q.space.length) << ";t0=" << format_double(q.time.t_begin)
       << ";T=" << format_double(q.time.t_end) << ";lambda=" << format_double(w.lambda())
       << ";s=" << format_double(s) << ";m=" << format_double(w.beta().m)
       << ";x0=" << format_double(w.beta().x_crit);
    return os.str();
}

double sq_norm_over(const SpaceTimeField& f, Interval region) {
    SpaceTimeField sq = make_spacetime_field(f.space, f.time);
    for (size_t i = 0; i < f.values.size(); ++i) sq.values[i] = f.values[i] * f.values[i];
    return integrate_spacetime(sq, region);
}

// iint over region of e^{-2 s eta} phi^k g^2, window-edge slices excluded
double weighted_sq_integral(const SpaceTimeField& g, const WeightSet& w, double s, int k_exp,
                            Interval region) {
    SpaceTimeField f = make_spacetime_field(g.space, g.time);
    const WeightTables tab = build_weight_tables(w, g.space, g.time);
    for (int k = 1; k < g.time.step_count; ++k) {
        const double inv_d = tab.inv_d[static_cast<size_t>(k)];
        const double log_d = tab.log_d[static_cast<size_t>(k)];
        for (int i = 0; i < g.space.node_count; ++i) {
            const double e = -2.0 * s * tab.eta_num[static_cast<size_t>(i)] * inv_d +
                             k_exp * (tab.lam_beta[static_cast<size_t>(i)] - log_d);
            f.at(k, i) = std::exp(e) * g.at(k, i) * g.at(k, i);
        }
    }
    return integrate_spacetime(f, region);
}

void finish_report(CarlemanReport& r) {
    r.lhs_total = 0.0;
    for (const auto& [name, v] : r.lhs_terms) r.lhs_total += v;
    r.rhs_total = 0.0;
    for (const auto& [name, v] : r.rhs_terms) r.rhs_total += v;
    r.degenerate = r.lhs_total < kDegenerateFloor && r.rhs_total < kDegenerateFloor;
    r.ratio = (!r.degenerate && r.rhs_total > 0.0) ? r.lhs_total / r.rhs_total : quiet_nan();
}

SpaceTimeField residual_heat(const SpaceTimeField& q) {
    const SpaceTimeField dt = time_derivative(q);
    const SpaceTimeField lap = discrete_laplacian(q);
    SpaceTimeField r = make_spacetime_field(q.space, q.time);
    for (size_t i = 0; i < r.values.size(); ++i) r.values[i] = dt.values[i] - lap.values[i];
    return r;
}

}  // namespace

const char* estimate_name(EstimateId id) {
    switch (id) {
        case EstimateId::Est3: return "EST3";
        case EstimateId::Est4: return "EST4";
        case EstimateId::Est10: return "EST10";
    }
    return "?";
}

CarlemanReport eval_estimate3(const SpaceTimeField& q, const WeightSet& w, double s) {
    require_zero_boundary(q);
    const double lam = w.lambda();
    const SpaceTimeField psi = conjugate_decay(q, w, s);
    const SpaceTimeField m1 = apply_M1(psi, w, s);
    const SpaceTimeField m2 = apply_M2(psi, w, s);
    const Interval full{0.0, q.space.length};
    const double s3l4 = s * s * s * lam * lam * lam * lam;

    CarlemanReport r;
    r.id = EstimateId::Est3;
    r.s = s;
    r.lambda = lam;
    r.fingerprint = fingerprint("est3", w, q, s);
    r.lhs_terms.emplace_back("m1_sq", sq_norm_over(m1, full));
    r.lhs_terms.emplace_back("m2_sq", sq_norm_over(m2, full));
    r.lhs_terms.emplace_back("grad",
                             s * lam * lam * weighted_sq_integral(spatial_gradient(q), w, s, 1, full));
    r.lhs_terms.emplace_back("zero", s3l4 * weighted_sq_integral(q, w, s, 3, full));
    r.rhs_terms.emplace_back(
        "obs", s3l4 * weighted_sq_integral(q, w, s, 3, w.subintervals().omega));
    r.rhs_terms.emplace_back("residual", weighted_sq_integral(residual_heat(q), w, s, 0, full));
    finish_report(r);
    return r;
}

CarlemanReport eval_estimate4(const SpaceTimeField& q, const WeightSet& w, double s) {
    require_zero_boundary(q);
    const double lam = w.lambda();
    const FunctionalBreakdown b = eval_I(q, w, s);
    const Interval full{0.0, q.space.length};
    const double s3l4 = s * s * s * lam * lam * lam * lam;

    CarlemanReport r;
    r.id = EstimateId::Est4;
    r.s = s;
    r.lambda = lam;
    r.fingerprint = fingerprint("est4", w, q, s);
    r.lhs_terms.emplace_back("dtlap", b.term_dtlap);
    r.lhs_terms.emplace_back("grad", b.term_grad);
    r.lhs_terms.emplace_back("zero", b.term_zero);
    r.rhs_terms.emplace_back(
        "obs", s3l4 * weighted_sq_integral(q, w, s, 3, w.subintervals().omega));
    r.rhs_terms.emplace_back("residual", weighted_sq_integral(residual_heat(q), w, s, 0, full));
    finish_report(r);
    return r;
}

CarlemanReport eval_estimate10(const SystemTrajectory& yz, const ScalarField& gamma,
                               const SystemTrajectory& reference, const WeightSet& w, double s,
                               double c0) {
    const Interval omega = w.subintervals().omega;
    for (int i = 0; i < yz.coeffs.c.size(); ++i) {
        const double x = yz.coeffs.c.grid.node(i);
        if (omega.contains(x) && yz.coeffs.c[i] < c0)
            throw PreconditionError("coupling coefficient c falls below c0 on omega");
    }
    const double lam = w.lambda();
    const FunctionalBreakdown iy = eval_I(yz.u, w, s);
    const FunctionalBreakdown iz = eval_I(yz.v, w, s);
    const Interval full{0.0, yz.u.space.length};

    const SpaceTimeField dtv = time_derivative(reference.v);
    SpaceTimeField src = make_spacetime_field(dtv.space, dtv.time);
    for (int k = 0; k <= dtv.time.step_count; ++k)
        for (int i = 0; i < dtv.space.node_count; ++i) src.at(k, i) = gamma[i] * dtv.at(k, i);

    const double s7 = std::pow(s, 7);
    const double l8 = std::pow(lam, 8);

    CarlemanReport r;
    r.id = EstimateId::Est10;
    r.s = s;
    r.lambda = lam;
    r.fingerprint = fingerprint("est10", w, yz.u, s);
    r.lhs_terms.emplace_back("I_y", iy.total());
    r.lhs_terms.emplace_back("I_z", iz.total());
    r.rhs_terms.emplace_back("obs", s7 * l8 * weighted_sq_integral(yz.v, w, s, 7, omega));
    r.rhs_terms.emplace_back("source", weighted_sq_integral(src, w, s, 0, full));
    finish_report(r);
    return r;
}

namespace {

// Deterministic cross-platform generator (splitmix64).
struct SplitMix64 {
    uint64_t state;
    uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double symmetric() { return 2.0 * ((next() >> 11) * 0x1.0p-53) - 1.0; }
};

}  // namespace

SpaceTimeField generate_test_field(uint64_t seed, int modes, const SpatialGrid& space,
                                   const TimeGrid& time) {
    if (modes < 0 || modes > 8) throw ConfigError("test field: modes must be between 0 and 8");
    SpaceTimeField q = make_spacetime_field(space, time);
    SplitMix64 rng{seed};
    for (int j = 1; j <= modes; ++j) {
        const double amp = rng.symmetric();
        const double c0 = rng.symmetric();
        const double c1 = rng.symmetric();
        const double c2 = rng.symmetric();
        const double c3 = rng.symmetric();
        const ScalarField mode = sine_mode_field(space, j, amp);
        for (int k = 0; k <= time.step_count; ++k) {
            const double tau = static_cast<double>(k) / time.step_count;
            const double p = c0 + tau * (c1 + tau * (c2 + tau * c3));
            for (int i = 1; i < space.node_count - 1; ++i) q.at(k, i) += mode[i] * p;
        }
    }
    return q;
}

SweepTable constant_sweep(EstimateId id, int ensemble_size, uint64_t base_seed,
                          std::span<const double> s_list, std::span<const double> lambda_list,
                          const BetaProfile& beta, const SubIntervalSet& subintervals,
                          const SpatialGrid& space, const TimeGrid& time, int modes) {
    if (s_list.empty() || lambda_list.empty())
        throw ConfigError("sweep: s and lambda lists must be nonempty");
    if (id == EstimateId::Est10)
        throw ConfigError("sweep: only the test-field estimates can be swept here");

    std::vector<WeightSet> weights;
    weights.reserve(lambda_list.size());
    for (double lam : lambda_list)
        weights.push_back(make_weight_set(beta, time, lam, subintervals));

    const int rows_per_member = static_cast<int>(s_list.size() * lambda_list.size());
    std::vector<SweepRow> rows(static_cast<size_t>(ensemble_size) * rows_per_member);
    parallel_for(ensemble_size, [&](int e) {
        const uint64_t seed = base_seed + static_cast<uint64_t>(e);
        const SpaceTimeField q = generate_test_field(seed, modes, space, time);
        int slot = e * rows_per_member;
        for (size_t si = 0; si < s_list.size(); ++si) {
            for (size_t li = 0; li < lambda_list.size(); ++li) {
                const CarlemanReport rep =
                    id == EstimateId::Est3 ? eval_estimate3(q, weights[li], s_list[si])
                                           : eval_estimate4(q, weights[li], s_list[si]);
                rows[static_cast<size_t>(slot++)] = {seed,          rep.s,         rep.lambda,
                                                     rep.lhs_total, rep.rhs_total, rep.ratio,
                                                     rep.degenerate};
            }
        }
    });

    SweepTable table;
    table.id = id;
    table.rows = std::move(rows);
    for (double s : s_list) {
        for (double lam : lambda_list) {
            SweepSummaryRow sum;
            sum.s = s;
            sum.lambda = lam;
            sum.max_ratio = quiet_nan();
            for (const SweepRow& row : table.rows) {
                if (row.s != s || row.lambda != lam) continue;
                ++sum.evaluated;
                if (row.degenerate || std::isnan(row.ratio)) {
                    ++sum.degenerate_count;
                    continue;
                }
                if (std::isnan(sum.max_ratio) || row.ratio > sum.max_ratio) {
                    sum.max_ratio = row.ratio;
                    sum.argmax_seed = row.seed;
                }
            }
            table.summary.push_back(sum);
        }
    }
    return table;
}

void write_sweep_csv(const SweepTable& table, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"seed", "s", "lambda", "lhs_total", "rhs_total", "ratio", "flag"});
    for (const SweepRow& r : table.rows)
        csv.raw_row({std::to_string(r.seed), format_double(r.s), format_double(r.lambda),
                     format_double(r.lhs_total), format_double(r.rhs_total),
                     format_double(r.ratio), r.degenerate ? "degenerate" : "ok"});
}

void write_sweep_summary_csv(const SweepTable& table, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"s", "lambda", "max_ratio", "argmax_seed", "evaluated", "degenerate"});
    for (const SweepSummaryRow& r : table.summary)
        csv.raw_row({format_double(r.s), format_double(r.lambda), format_double(r.max_ratio),
                     std::to_string(r.argmax_seed), std::to_string(r.evaluated),
                     std::to_string(r.degenerate_count)});
}

}  // namespace clab
