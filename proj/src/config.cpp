#include "clab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "clab/csv.hpp"
#include "clab/errors.hpp"

namespace clab {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string at_line(int line_no) {
    return line_no > 0 ? "line " + std::to_string(line_no) + ": " : std::string();
}

double parse_double(const std::string& s, int line_no) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(at_line(line_no) + "expected a number, got '" + s + "'");
    }
}

int parse_int(const std::string& s, int line_no) {
    const double v = parse_double(s, line_no);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError(at_line(line_no) + "expected an integer, got '" + s + "'");
    return i;
}

std::vector<double> parse_list(const std::string& s, int line_no) {
    std::vector<double> out;
    for (const std::string& item : split(s, ','))
        if (!item.empty()) out.push_back(parse_double(item, line_no));
    if (out.empty()) throw ConfigError(at_line(line_no) + "empty list");
    return out;
}

Interval parse_interval(const std::string& s, int line_no) {
    const std::vector<double> v = parse_list(s, line_no);
    if (v.size() != 2)
        throw ConfigError(at_line(line_no) + "interval needs two values");
    return {v[0], v[1]};
}

}  // namespace

ScalarField FieldExpr::evaluate(const SpatialGrid& grid) const {
    ScalarField f = make_field(grid);
    for (const Term& t : terms) {
        if (t.is_sine) {
            const ScalarField mode = sine_mode_field(grid, t.mode, t.amplitude);
            for (int i = 0; i < grid.node_count; ++i) f[i] += mode[i];
        } else {
            for (int i = 0; i < grid.node_count; ++i) f[i] += t.amplitude;
        }
    }
    return f;
}

bool FieldExpr::is_zero() const {
    for (const Term& t : terms)
        if (t.amplitude != 0.0) return false;
    return true;
}

FieldExpr parse_field_expr(const std::string& text) {
    FieldExpr expr;
    for (const std::string& raw : split(text, '+')) {
        const std::string term = trim(raw);
        if (term.empty()) throw ConfigError("field expression: empty term in '" + text + "'");
        FieldExpr::Term t;
        if (term.rfind("sine:", 0) == 0) {
            const std::vector<std::string> parts = split(term, ':');
            if (parts.size() != 3)
                throw ConfigError("field expression: sine term needs sine:<mode>:<amplitude>");
            t.is_sine = true;
            t.mode = parse_int(parts[1], 0);
            if (t.mode < 1 || t.mode > 8)
                throw ConfigError("field expression: sine mode must be between 1 and 8");
            t.amplitude = parse_double(parts[2], 0);
        } else if (term.rfind("const:", 0) == 0) {
            t.amplitude = parse_double(term.substr(6), 0);
        } else {
            t.amplitude = parse_double(term, 0);
        }
        expr.terms.push_back(t);
    }
    return expr;
}

namespace {

std::string expr_to_string(const FieldExpr& e) {
    std::string out;
    for (const auto& t : e.terms) {
        if (!out.empty()) out += " + ";
        out += t.is_sine ? "sine:" + std::to_string(t.mode) + ":" + format_double(t.amplitude)
                         : "const:" + format_double(t.amplitude);
    }
    return out.empty() ? "const:0" : out;
}

std::string list_to_string(const std::vector<double>& v) {
    std::string out;
    for (double x : v) {
        if (!out.empty()) out += ", ";
        out += format_double(x);
    }
    return out;
}

}  // namespace

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    cfg.a = parse_field_expr("0");
    cfg.b = parse_field_expr("1");
    cfg.c = parse_field_expr("1");
    cfg.d = parse_field_expr("0");
    cfg.u0 = parse_field_expr("0");
    cfg.v0 = parse_field_expr("const:1 + sine:1:0.5");
    cfg.gamma_shape = parse_field_expr("sine:1:1");
    cfg.du0_shape = parse_field_expr("sine:1:1");
    cfg.dv0_shape = parse_field_expr("0");
    return cfg;
}

void apply_entry(ScenarioConfig& cfg, const std::string& section, const std::string& key,
                 const std::string& value, int line_no) {
    auto unknown = [&]() {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + section + "." +
                          key + "'");
    };
    if (section == "grid") {
        if (key == "L") cfg.length = parse_double(value, line_no);
        else if (key == "n") cfg.n = parse_int(value, line_no);
        else if (key == "t0") cfg.t0 = parse_double(value, line_no);
        else if (key == "T") cfg.t_end = parse_double(value, line_no);
        else if (key == "nt") cfg.nt = parse_int(value, line_no);
        else unknown();
    } else if (section == "geometry") {
        if (key == "omega") cfg.omega = parse_interval(value, line_no);
        else if (key == "omega_second") cfg.omega_second = parse_interval(value, line_no);
        else if (key == "omega_prime") cfg.omega_prime = parse_interval(value, line_no);
        else if (key == "x0") cfg.x0 = parse_double(value, line_no);
        else unknown();
    } else if (section == "carleman") {
        if (key == "m") cfg.m = parse_double(value, line_no);
        else if (key == "s") cfg.s_list = parse_list(value, line_no);
        else if (key == "lambda") cfg.lambda_list = parse_list(value, line_no);
        else unknown();
    } else if (section == "system") {
        if (key == "R") cfg.bound_R = parse_double(value, line_no);
        else if (key == "r") cfg.r = parse_double(value, line_no);
        else if (key == "c0") cfg.c0 = parse_double(value, line_no);
        else if (key == "a") cfg.a = parse_field_expr(value);
        else if (key == "b") cfg.b = parse_field_expr(value);
        else if (key == "c") cfg.c = parse_field_expr(value);
        else if (key == "d") cfg.d = parse_field_expr(value);
        else if (key == "g") cfg.g = parse_double(value, line_no);
        else if (key == "h") cfg.h = parse_double(value, line_no);
        else if (key == "u0") cfg.u0 = parse_field_expr(value);
        else if (key == "v0") cfg.v0 = parse_field_expr(value);
        else unknown();
    } else if (section == "experiment") {
        if (key == "eps") cfg.eps_list = parse_list(value, line_no);
        else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_int(value, line_no));
        else if (key == "ensemble") cfg.ensemble = parse_int(value, line_no);
        else if (key == "modes") cfg.modes = parse_int(value, line_no);
        else if (key == "gamma") cfg.gamma_shape = parse_field_expr(value);
        else if (key == "du0") cfg.du0_shape = parse_field_expr(value);
        else if (key == "dv0") cfg.dv0_shape = parse_field_expr(value);
        else if (key == "alpha") cfg.alpha = parse_double(value, line_no);
        else if (key == "max_iterations") cfg.max_iterations = parse_int(value, line_no);
        else if (key == "out") cfg.out_dir = value;
        else unknown();
    } else {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section '" + section +
                          "'");
    }
}

void validate(const ScenarioConfig& cfg) {
    // grid and geometry constructors own their invariants
    const SpatialGrid space = build_spatial_grid(cfg.length, cfg.n);
    const TimeGrid time = build_time_grid(cfg.t0, cfg.t_end, cfg.nt);
    (void)time;
    const SubIntervalSet subs =
        make_subintervals(cfg.omega, cfg.omega_second, cfg.omega_prime, cfg.length);
    (void)build_beta(space, subs, cfg.x0, cfg.m);
    if (!(cfg.bound_R > 0.0)) throw ConfigError("system.R must be positive");
    if (!(cfg.r > 0.0)) throw ConfigError("system.r must be positive");
    if (!(cfg.c0 > 0.0)) throw ConfigError("system.c0 must be positive");
    if (cfg.ensemble < 1) throw ConfigError("experiment.ensemble must be at least 1");
    if (cfg.modes < 0 || cfg.modes > 8)
        throw ConfigError("experiment.modes must be between 0 and 8");
    if (!(cfg.alpha > 0.0)) throw ConfigError("experiment.alpha must be positive");
    if (cfg.max_iterations < 1) throw ConfigError("experiment.max_iterations must be at least 1");
    for (double s : cfg.s_list)
        if (!(s > 1.0)) throw ConfigError("carleman.s entries must be > 1");
    for (double l : cfg.lambda_list)
        if (!(l >= 1.0)) throw ConfigError("carleman.lambda entries must be >= 1");
    // the coefficient bound check needs the fields on the grid
    (void)make_coefficients(cfg.a.evaluate(space), cfg.b.evaluate(space), cfg.c.evaluate(space),
                            cfg.d.evaluate(space), cfg.bound_R);
}

void refresh_echo(ScenarioConfig& cfg) {
    std::map<std::string, std::string>& e = cfg.echo;
    e.clear();
    e["grid.L"] = format_double(cfg.length);
    e["grid.n"] = std::to_string(cfg.n);
    e["grid.t0"] = format_double(cfg.t0);
    e["grid.T"] = format_double(cfg.t_end);
    e["grid.nt"] = std::to_string(cfg.nt);
    e["geometry.omega"] = format_double(cfg.omega.lo) + ", " + format_double(cfg.omega.hi);
    e["geometry.omega_second"] =
        format_double(cfg.omega_second.lo) + ", " + format_double(cfg.omega_second.hi);
    e["geometry.omega_prime"] =
        format_double(cfg.omega_prime.lo) + ", " + format_double(cfg.omega_prime.hi);
    e["geometry.x0"] = format_double(cfg.x0);
    e["carleman.m"] = format_double(cfg.m);
    e["carleman.s"] = list_to_string(cfg.s_list);
    e["carleman.lambda"] = list_to_string(cfg.lambda_list);
    e["system.R"] = format_double(cfg.bound_R);
    e["system.r"] = format_double(cfg.r);
    e["system.c0"] = format_double(cfg.c0);
    e["system.a"] = expr_to_string(cfg.a);
    e["system.b"] = expr_to_string(cfg.b);
    e["system.c"] = expr_to_string(cfg.c);
    e["system.d"] = expr_to_string(cfg.d);
    e["system.g"] = format_double(cfg.g);
    e["system.h"] = format_double(cfg.h);
    e["system.u0"] = expr_to_string(cfg.u0);
    e["system.v0"] = expr_to_string(cfg.v0);
    e["experiment.eps"] = list_to_string(cfg.eps_list);
    e["experiment.seed"] = std::to_string(cfg.seed);
    e["experiment.ensemble"] = std::to_string(cfg.ensemble);
    e["experiment.modes"] = std::to_string(cfg.modes);
    e["experiment.gamma"] = expr_to_string(cfg.gamma_shape);
    e["experiment.du0"] = expr_to_string(cfg.du0_shape);
    e["experiment.dv0"] = expr_to_string(cfg.dv0_shape);
    e["experiment.alpha"] = format_double(cfg.alpha);
    e["experiment.max_iterations"] = std::to_string(cfg.max_iterations);
    e["experiment.out"] = cfg.out_dir;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ScenarioConfig cfg = default_config();
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        apply_entry(cfg, section, key, value, line_no);
    }
    validate(cfg);
    refresh_echo(cfg);
    return cfg;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    Scenario sc;
    sc.space = build_spatial_grid(cfg.length, cfg.n);
    sc.time = build_time_grid(cfg.t0, cfg.t_end, cfg.nt);
    sc.geometry = make_subintervals(cfg.omega, cfg.omega_second, cfg.omega_prime, cfg.length);
    sc.x0 = cfg.x0;
    sc.m = cfg.m;
    sc.reference_coeffs =
        make_coefficients(cfg.a.evaluate(sc.space), cfg.b.evaluate(sc.space),
                          cfg.c.evaluate(sc.space), cfg.d.evaluate(sc.space), cfg.bound_R);
    sc.bc = constant_boundary(sc.time, cfg.g, cfg.h);
    sc.u0_ref = cfg.u0.evaluate(sc.space);
    sc.v0_ref = cfg.v0.evaluate(sc.space);
    sc.r = cfg.r;
    sc.c0 = cfg.c0;
    return sc;
}

}  // namespace clab
