#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clab/scenario.hpp"

namespace clab {

/// Closed-form field expression: a sum of constants and sine modes,
/// e.g. "const:1 + sine:1:0.5" or just "0.25".
struct FieldExpr {
    struct Term {
        bool is_sine = false;
        int mode = 0;
        double amplitude = 0.0;
    };
    std::vector<Term> terms;

    ScalarField evaluate(const SpatialGrid& grid) const;
    bool is_zero() const;
};

FieldExpr parse_field_expr(const std::string& text);

/// Fully resolved scenario configuration. Defaults cover every key; the echo
/// map carries the resolved value of each key for the run manifest.
struct ScenarioConfig {
    double length = 1.0;
    int n = 201;
    double t0 = 0.0;
    double t_end = 2.0;
    int nt = 400;

    Interval omega{0.3, 0.7};
    Interval omega_second{0.375, 0.625};
    Interval omega_prime{0.45, 0.55};
    double x0 = 0.5;

    double m = 1.2;
    std::vector<double> s_list{8.0, 16.0, 32.0};
    std::vector<double> lambda_list{2.0, 4.0};

    double bound_R = 10.0;
    double r = 1.0;
    double c0 = 1.0;
    FieldExpr a, b, c, d, u0, v0;
    double g = 0.0;
    double h = 1.0;

    std::vector<double> eps_list{1e-3, 1e-2, 1e-1};
    uint64_t seed = 1;
    int ensemble = 20;
    int modes = 5;
    FieldExpr gamma_shape, du0_shape, dv0_shape;
    double alpha = 1e-8;
    int max_iterations = 30;
    std::string out_dir = "runs";

    std::map<std::string, std::string> echo;
};

ScenarioConfig default_config();

/// Parses the INI-style file and validates every cross-field constraint the
/// owning modules enforce (interval nesting, even step count, coefficient
/// bound). Parse failures carry the line number.
ScenarioConfig load_config(const std::string& path);

/// Applies textual section/key/value triplets on top of a config (the same
/// code path the file loader uses).
void apply_entry(ScenarioConfig& cfg, const std::string& section, const std::string& key,
                 const std::string& value, int line_no);

/// Re-runs the cross-field validation; throws ConfigError on violations.
void validate(const ScenarioConfig& cfg);

/// Regenerates the echo map from the current field values.
void refresh_echo(ScenarioConfig& cfg);

/// Materializes grids, geometry, coefficients, and data into a Scenario.
Scenario build_scenario(const ScenarioConfig& cfg);

}  // namespace clab
