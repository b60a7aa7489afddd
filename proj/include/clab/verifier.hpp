#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clab/forward.hpp"
#include "clab/grid.hpp"
#include "clab/operators.hpp"
#include "clab/weights.hpp"

namespace clab {

enum class EstimateId { Est3, Est4, Est10 };
const char* estimate_name(EstimateId id);

/// Numerically evaluated weighted energy estimate: named terms of both sides
/// and the empirical ratio LHS/RHS. Both sides below 1e-300 flag the report
/// degenerate and no numeric ratio is produced.
struct CarlemanReport {
    EstimateId id = EstimateId::Est3;
    double s = 0.0;
    double lambda = 0.0;
    std::vector<std::pair<std::string, double>> lhs_terms;
    std::vector<std::pair<std::string, double>> rhs_terms;
    double lhs_total = 0.0;
    double rhs_total = 0.0;
    double ratio = 0.0;  // NaN when degenerate
    bool degenerate = false;
    std::string fingerprint;
};

/// Full-form estimate: conjugated-operator norms plus the gradient and
/// zero-order weighted energies against the observation and residual terms.
CarlemanReport eval_estimate3(const SpaceTimeField& q, const WeightSet& w, double s);

/// Derivative-form estimate: the functional I(q) against the same right side.
CarlemanReport eval_estimate4(const SpaceTimeField& q, const WeightSet& w, double s);

/// Coupled-system estimate: I(y) + I(z) against the phi^7-weighted
/// observation of z on omega plus the weighted source energy. Requires
/// c >= c0 on omega.
CarlemanReport eval_estimate10(const SystemTrajectory& yz, const ScalarField& gamma,
                               const SystemTrajectory& reference, const WeightSet& w, double s,
                               double c0);

/// Seeded band-limited test field: a sum of at most 8 sine modes in x with
/// random cubic time envelopes. Deterministic in the seed; zero on the
/// spatial boundary by construction.
SpaceTimeField generate_test_field(uint64_t seed, int modes, const SpatialGrid& space,
                                   const TimeGrid& time);

struct SweepRow {
    uint64_t seed = 0;
    double s = 0.0;
    double lambda = 0.0;
    double lhs_total = 0.0;
    double rhs_total = 0.0;
    double ratio = 0.0;
    bool degenerate = false;
};

struct SweepSummaryRow {
    double s = 0.0;
    double lambda = 0.0;
    double max_ratio = 0.0;
    uint64_t argmax_seed = 0;
    int evaluated = 0;
    int degenerate_count = 0;
};

struct SweepTable {
    EstimateId id = EstimateId::Est3;
    std::vector<SweepRow> rows;          // ordered by (seed, s, lambda)
    std::vector<SweepSummaryRow> summary;  // ordered by (s, lambda)
};

/// Max empirical ratio over a seeded ensemble for every (s, lambda) pair.
/// Ensemble members run in parallel; the tables are reduced in fixed order.
SweepTable constant_sweep(EstimateId id, int ensemble_size, uint64_t base_seed,
                          std::span<const double> s_list, std::span<const double> lambda_list,
                          const BetaProfile& beta, const SubIntervalSet& subintervals,
                          const SpatialGrid& space, const TimeGrid& time, int modes = 5);

void write_sweep_csv(const SweepTable& table, const std::string& path);
void write_sweep_summary_csv(const SweepTable& table, const std::string& path);

}  // namespace clab
