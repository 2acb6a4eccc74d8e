#include "chj/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "chj/text.hpp"

namespace chj {

namespace {

std::string located(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
    const YAML::Mark m = node.Mark();
    if (m.is_null()) throw ConfigError(message);
    throw ConfigError(message, m.line + 1, m.column + 1);
}

void require_map(const YAML::Node& node, const std::string& block) {
    if (!node.IsMap()) fail(node, "'" + block + "' must be a mapping");
}

void allow_keys(const YAML::Node& node, const std::string& block, std::set<std::string> allowed) {
    require_map(node, block);
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in '" + block + "'");
    }
}

template <typename T>
T convert(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::BadConversion&) {
        fail(node, "bad value for '" + key + "'");
    }
}

template <typename T>
void read(const YAML::Node& block, const char* key, T& target) {
    const YAML::Node n = block[key];
    if (n) target = convert<T>(n, key);
}

template <typename T>
void read(const YAML::Node& block, const char* key, std::optional<T>& target) {
    const YAML::Node n = block[key];
    if (n && !n.IsNull()) target = convert<T>(n, key);
}

void read_positive(const YAML::Node& block, const char* key, double& target) {
    const YAML::Node n = block[key];
    if (!n) return;
    target = convert<double>(n, key);
    if (!(target > 0.0)) fail(n, "'" + std::string(key) + "' must be positive");
}

std::vector<double> read_list(const YAML::Node& n, const std::string& key) {
    if (n.IsScalar()) return {convert<double>(n, key)};
    if (!n.IsSequence()) fail(n, "'" + key + "' must be a number or a list");
    std::vector<double> out;
    for (const auto& e : n) out.push_back(convert<double>(e, key));
    return out;
}

void parse_model(const YAML::Node& n, ModelBlock& m) {
    allow_keys(n, "model", {"kind", "expression", "dim", "A", "V0", "g", "lambda", "p_max", "u_max", "x_nodes",
                            "alpha", "beta"});
    if (n["expression"]) m.kind = "expression";
    read(n, "kind", m.kind);
    if (m.kind != "quadratic" && m.kind != "expression")
        fail(n["kind"], "model kind must be 'quadratic' or 'expression'");
    read(n, "expression", m.expression);
    if (m.kind == "expression" && m.expression.empty()) fail(n, "missing key 'model.expression'");
    read(n, "dim", m.dim);
    if (m.dim != 0 && m.dim != 1 && m.dim != 2) fail(n["dim"], "'dim' must be 1 or 2");
    if (const auto a = n["A"]) {
        if (a.IsMap()) {
            allow_keys(a, "model.A", {"files"});
            if (!a["files"] || !a["files"].IsSequence()) fail(a, "'model.A.files' must be a list of grid files");
            for (const auto& f : a["files"]) m.inverse_mass_files.push_back(convert<std::string>(f, "files"));
        } else {
            m.inverse_mass = read_list(a, "A");
            if (m.inverse_mass.size() != 1 && m.inverse_mass.size() != 3)
                fail(a, "'A' takes one value (d=1) or three values a11, a12, a22 (d=2)");
        }
    }
    read(n, "V0", m.potential);
    if (const auto g = n["g"]) {
        if (g.IsScalar()) {
            m.coupling = "linear";
            m.coupling_coef = convert<double>(g, "g");
        } else {
            allow_keys(g, "model.g", {"linear", "sin"});
            if (g.size() != 1) fail(g, "'g' takes exactly one of 'linear' or 'sin'");
            m.coupling = g["linear"] ? "linear" : "sin";
            m.coupling_coef = convert<double>(g[m.coupling], "g");
        }
    }
    read(n, "lambda", m.lambda);
    read_positive(n, "p_max", m.p_max);
    read_positive(n, "u_max", m.u_max);
    read(n, "x_nodes", m.x_nodes);
    read(n, "alpha", m.alpha);
    read(n, "beta", m.beta);
    if (m.alpha.has_value() != m.beta.has_value()) fail(n, "'alpha' and 'beta' must be given together");
}

void parse_grid(const YAML::Node& n, GridBlock& g) {
    allow_keys(n, "grid", {"dim", "period", "resolution"});
    read(n, "dim", g.dim);
    if (g.dim != 0 && g.dim != 1 && g.dim != 2) fail(n["dim"], "'dim' must be 1 or 2");
    read_positive(n, "period", g.period);
    if (const auto r = n["resolution"]) {
        const auto v = read_list(r, "resolution");
        if (v.size() > 2) fail(r, "'resolution' takes at most two values");
        g.resolution = {static_cast<int>(v[0]), static_cast<int>(v.size() == 2 ? v[1] : v[0])};
        if (g.resolution[0] < 2 || g.resolution[1] < 2) fail(r, "'resolution' must be at least 2");
    }
}

void parse_evolution(const YAML::Node& n, EvolutionBlock& e) {
    allow_keys(n, "evolution", {"dt", "v_max", "v_res", "picard_tol", "picard_max", "snapshot_every", "refine",
                                "golden_iterations", "monotone_tol", "t", "direction"});
    auto& c = e.config;
    read_positive(n, "dt", c.dt);
    read_positive(n, "v_max", c.v_max);
    read(n, "v_res", c.v_res);
    read_positive(n, "picard_tol", c.picard_tol);
    read(n, "picard_max", c.picard_max);
    read(n, "snapshot_every", c.snapshot_every);
    read(n, "refine", c.refine);
    read(n, "golden_iterations", c.golden_iterations);
    read(n, "monotone_tol", c.monotone_tol);
    read(n, "t", e.t);
    if (e.t < 0.0) fail(n["t"], "'t' must be non-negative");
    read(n, "direction", e.direction);
    if (e.direction != "backward" && e.direction != "forward")
        fail(n["direction"], "'direction' must be 'backward' or 'forward'");
}

void parse_battery(const YAML::Node& n, RunConfig& cfg) {
    allow_keys(n, "battery", {"name", "horizons", "samples", "boundary_fraction", "p_cap", "u_cap", "seed",
                              "tol_constant", "tol", "quotient_times", "require_strictness", "mode", "flow_step",
                              "ceiling"});
    auto& b = cfg.battery_config;
    read(n, "name", cfg.battery);
    if (const auto h = n["horizons"]) b.horizons = read_list(h, "horizons");
    read(n, "samples", b.samples);
    read(n, "boundary_fraction", b.boundary_fraction);
    if (b.boundary_fraction < 0.0 || b.boundary_fraction > 1.0)
        fail(n["boundary_fraction"], "'boundary_fraction' must lie in [0, 1]");
    read_positive(n, "p_cap", b.p_cap);
    read_positive(n, "u_cap", b.u_cap);
    read(n, "seed", b.seed);
    read_positive(n, "tol_constant", b.tol_constant);
    read(n, "tol", b.tol);
    if (const auto q = n["quotient_times"]) {
        b.quotient_times = read_list(q, "quotient_times");
        if (b.quotient_times.size() != 2) fail(q, "'quotient_times' takes two values");
    }
    read(n, "require_strictness", b.require_strictness);
    if (const auto m = n["mode"]) {
        const auto text = convert<std::string>(m, "mode");
        try {
            b.mode = parse_mode(text);
        } catch (const InvalidArgument& e) {
            fail(m, e.what());
        }
    }
    read_positive(n, "flow_step", b.flow_step);
    read_positive(n, "ceiling", b.ceiling);
}

void parse_flow(const YAML::Node& n, FlowBlock& f) {
    allow_keys(n, "flow", {"states", "T", "h", "adaptive", "energy_tol", "ceiling"});
    if (const auto s = n["states"]) {
        if (!s.IsSequence() || s.size() == 0) fail(s, "'states' must be a non-empty list");
        f.states.clear();
        // A single state may be given flat: [x, p, u].
        if (s[0].IsScalar()) {
            f.states.push_back(read_list(s, "states"));
        } else {
            for (const auto& e : s) f.states.push_back(read_list(e, "states"));
        }
        for (std::size_t k = 0; k < f.states.size(); ++k)
            if (f.states[k].size() != 3 && f.states[k].size() != 5)
                fail(s, "each state is [x, p, u] (d=1) or [x1, x2, p1, p2, u] (d=2)");
    }
    read(n, "T", f.T);
    if (f.T < 0.0) fail(n["T"], "'T' must be non-negative");
    read_positive(n, "h", f.h);
    read(n, "adaptive", f.adaptive);
    read_positive(n, "energy_tol", f.energy_tol);
    read_positive(n, "ceiling", f.ceiling);
}

void parse_action(const YAML::Node& n, ActionBlock& a) {
    allow_keys(n, "action", {"x0", "u0", "x", "t", "direction", "p_shoot", "scan_points", "k_max", "hit_tol", "step",
                             "t_min", "ceiling"});
    auto& q = a.query;
    auto& s = a.shooting;
    read(n, "x0", q.x0);
    read(n, "u0", q.u0);
    read(n, "x", q.x);
    read_positive(n, "t", q.t);
    if (const auto d = n["direction"]) {
        const auto text = convert<std::string>(d, "direction");
        if (text == "backward") q.direction = ActionDirection::Backward;
        else if (text == "forward") q.direction = ActionDirection::Forward;
        else fail(d, "'direction' must be 'backward' or 'forward'");
    }
    read_positive(n, "p_shoot", s.p_shoot);
    read(n, "scan_points", s.scan_points);
    read(n, "k_max", s.k_max);
    read_positive(n, "hit_tol", s.hit_tol);
    read_positive(n, "step", s.step);
    read_positive(n, "t_min", s.t_min);
    read_positive(n, "ceiling", s.ceiling);
}

void parse_legendre(const YAML::Node& n, LegendreBlock& l) {
    allow_keys(n, "legendre", {"x", "u", "v_max", "count"});
    if (const auto x = n["x"]) {
        l.x = read_list(x, "x");
        if (l.x.size() > 2) fail(x, "'x' takes one or two coordinates");
    }
    read(n, "u", l.u);
    read_positive(n, "v_max", l.v_max);
    read(n, "count", l.count);
    if (l.count < 2) fail(n["count"], "'count' must be at least 2");
}

void parse_initial(const YAML::Node& n, InitialBlock& i) {
    if (n.IsScalar()) {
        i.expression = convert<std::string>(n, "initial");
        return;
    }
    allow_keys(n, "initial", {"expression", "file"});
    read(n, "expression", i.expression);
    read(n, "file", i.file);
    if (!i.expression.empty() && !i.file.empty()) fail(n, "'initial' takes one of 'expression' or 'file', not both");
}

void parse_io(const YAML::Node& n, RunConfig& cfg) {
    allow_keys(n, "io", {"out", "workers"});
    read(n, "out", cfg.out);
    if (const auto w = n["workers"]) {
        const auto workers = convert<unsigned>(w, "workers");
        cfg.evolution.config.workers = workers;
        cfg.battery_config.workers = workers;
        cfg.action.shooting.workers = workers;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* direction_name(ActionDirection d) { return d == ActionDirection::Backward ? "backward" : "forward"; }

}  // namespace

ConfigError::ConfigError(const std::string& message, int line, int column)
    : InvalidArgument(located(message, line, column)), line_(line), column_(column) {}

SubsolutionMode parse_mode(const std::string& s) {
    if (s == "ae") return SubsolutionMode::AlmostEverywhere;
    if (s == "superdifferential") return SubsolutionMode::Superdifferential;
    throw InvalidArgument("mode must be 'ae' or 'superdifferential', got '" + s + "'");
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    RunConfig cfg;
    if (!root || root.IsNull()) return cfg;
    allow_keys(root, "config", {"model", "grid", "evolution", "battery", "io", "flow", "action", "legendre",
                                "initial"});
    if (const auto n = root["model"]) {
        parse_model(n, cfg.model);
        cfg.has_model = true;
    }
    if (const auto n = root["grid"]) parse_grid(n, cfg.grid);
    if (const auto n = root["evolution"]) parse_evolution(n, cfg.evolution);
    if (const auto n = root["battery"]) parse_battery(n, cfg);
    if (const auto n = root["flow"]) parse_flow(n, cfg.flow);
    if (const auto n = root["action"]) parse_action(n, cfg.action);
    if (const auto n = root["legendre"]) parse_legendre(n, cfg.legendre);
    if (const auto n = root["initial"]) parse_initial(n, cfg.initial);
    if (const auto n = root["io"]) parse_io(n, cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string echo_config(const RunConfig& cfg) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;

    const auto& m = cfg.model;
    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << m.kind;
    if (m.kind == "expression") {
        out << YAML::Key << "expression" << YAML::Value << YAML::DoubleQuoted << m.expression;
    } else {
        if (m.inverse_mass_files.empty()) {
            out << YAML::Key << "A" << YAML::Value << YAML::Flow << m.inverse_mass;
        } else {
            out << YAML::Key << "A" << YAML::Value << YAML::BeginMap << YAML::Key << "files" << YAML::Value
                << YAML::Flow << m.inverse_mass_files << YAML::EndMap;
        }
        out << YAML::Key << "V0" << YAML::Value << YAML::DoubleQuoted << m.potential;
        out << YAML::Key << "g" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << m.coupling
            << YAML::Value << m.coupling_coef << YAML::EndMap;
    }
    out << YAML::Key << "dim" << YAML::Value << m.dim;
    out << YAML::Key << "lambda" << YAML::Value;
    if (m.lambda) out << *m.lambda; else out << YAML::Null;
    out << YAML::Key << "p_max" << YAML::Value << m.p_max;
    out << YAML::Key << "u_max" << YAML::Value << m.u_max;
    out << YAML::Key << "x_nodes" << YAML::Value << m.x_nodes;
    out << YAML::Key << "alpha" << YAML::Value;
    if (m.alpha) out << *m.alpha; else out << YAML::Null;
    out << YAML::Key << "beta" << YAML::Value;
    if (m.beta) out << *m.beta; else out << YAML::Null;
    out << YAML::EndMap;

    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dim" << YAML::Value << cfg.grid.dim;
    out << YAML::Key << "period" << YAML::Value << cfg.grid.period;
    out << YAML::Key << "resolution" << YAML::Value << YAML::Flow << YAML::BeginSeq << cfg.grid.resolution[0]
        << cfg.grid.resolution[1] << YAML::EndSeq;
    out << YAML::EndMap;

    const auto& e = cfg.evolution.config;
    out << YAML::Key << "evolution" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "t" << YAML::Value << cfg.evolution.t;
    out << YAML::Key << "direction" << YAML::Value << cfg.evolution.direction;
    out << YAML::Key << "dt" << YAML::Value << e.dt;
    out << YAML::Key << "v_max" << YAML::Value << e.v_max;
    out << YAML::Key << "v_res" << YAML::Value << e.v_res;
    out << YAML::Key << "picard_tol" << YAML::Value << e.picard_tol;
    out << YAML::Key << "picard_max" << YAML::Value << e.picard_max;
    out << YAML::Key << "snapshot_every" << YAML::Value << e.snapshot_every;
    out << YAML::Key << "refine" << YAML::Value << e.refine;
    out << YAML::Key << "golden_iterations" << YAML::Value << e.golden_iterations;
    out << YAML::Key << "monotone_tol" << YAML::Value << e.monotone_tol;
    out << YAML::EndMap;

    const auto& b = cfg.battery_config;
    out << YAML::Key << "battery" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << cfg.battery;
    out << YAML::Key << "horizons" << YAML::Value << YAML::Flow << b.horizons;
    out << YAML::Key << "samples" << YAML::Value << b.samples;
    out << YAML::Key << "boundary_fraction" << YAML::Value << b.boundary_fraction;
    out << YAML::Key << "p_cap" << YAML::Value << b.p_cap;
    out << YAML::Key << "u_cap" << YAML::Value << b.u_cap;
    out << YAML::Key << "seed" << YAML::Value << b.seed;
    out << YAML::Key << "tol_constant" << YAML::Value << b.tol_constant;
    out << YAML::Key << "tol" << YAML::Value;
    if (b.tol) out << *b.tol; else out << YAML::Null;
    out << YAML::Key << "quotient_times" << YAML::Value << YAML::Flow << b.quotient_times;
    out << YAML::Key << "require_strictness" << YAML::Value << b.require_strictness;
    out << YAML::Key << "mode" << YAML::Value << to_string(b.mode);
    out << YAML::Key << "flow_step" << YAML::Value << b.flow_step;
    out << YAML::Key << "ceiling" << YAML::Value << b.ceiling;
    out << YAML::EndMap;

    const auto& f = cfg.flow;
    out << YAML::Key << "flow" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "states" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : f.states) out << YAML::Flow << s;
    out << YAML::EndSeq;
    out << YAML::Key << "T" << YAML::Value << f.T;
    out << YAML::Key << "h" << YAML::Value << f.h;
    out << YAML::Key << "adaptive" << YAML::Value << f.adaptive;
    out << YAML::Key << "energy_tol" << YAML::Value << f.energy_tol;
    out << YAML::Key << "ceiling" << YAML::Value << f.ceiling;
    out << YAML::EndMap;

    const auto& q = cfg.action.query;
    const auto& s = cfg.action.shooting;
    out << YAML::Key << "action" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "x0" << YAML::Value << q.x0;
    out << YAML::Key << "u0" << YAML::Value << q.u0;
    out << YAML::Key << "x" << YAML::Value << q.x;
    out << YAML::Key << "t" << YAML::Value << q.t;
    out << YAML::Key << "direction" << YAML::Value << direction_name(q.direction);
    out << YAML::Key << "p_shoot" << YAML::Value << s.p_shoot;
    out << YAML::Key << "scan_points" << YAML::Value << s.scan_points;
    out << YAML::Key << "k_max" << YAML::Value << s.k_max;
    out << YAML::Key << "hit_tol" << YAML::Value << s.hit_tol;
    out << YAML::Key << "step" << YAML::Value << s.step;
    out << YAML::Key << "t_min" << YAML::Value << s.t_min;
    out << YAML::Key << "ceiling" << YAML::Value << s.ceiling;
    out << YAML::EndMap;

    const auto& l = cfg.legendre;
    out << YAML::Key << "legendre" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "x" << YAML::Value << YAML::Flow << l.x;
    out << YAML::Key << "u" << YAML::Value << l.u;
    out << YAML::Key << "v_max" << YAML::Value << l.v_max;
    out << YAML::Key << "count" << YAML::Value << l.count;
    out << YAML::EndMap;

    out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "expression" << YAML::Value << YAML::DoubleQuoted << cfg.initial.expression;
    out << YAML::Key << "file" << YAML::Value << YAML::DoubleQuoted << cfg.initial.file;
    out << YAML::EndMap;

    out << YAML::Key << "io" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "out" << YAML::Value << cfg.out;
    out << YAML::Key << "workers" << YAML::Value << cfg.evolution.config.workers;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

HamiltonianModel build_model(const RunConfig& cfg) {
    if (!cfg.has_model) throw ConfigError("missing key 'model'");
    const auto& m = cfg.model;
    const Vec period{cfg.grid.period, cfg.grid.period};
    if (m.kind == "expression") {
        auto model = parse_hamiltonian(m.expression, m.lambda.value_or(1.0), period);
        if (m.dim != 0 && m.dim != model.dim()) {
            // An explicit dimension may only raise the inferred one.
            if (m.dim < model.dim()) throw ConfigError("'model.dim' is smaller than the expression's dimension");
            model = HamiltonianModel::from_expression(
                Expression::parse(m.expression, VariableSet::hamiltonian(m.dim)), m.dim, m.lambda.value_or(1.0),
                period);
        }
        return model;
    }

    QuadraticContact q;
    q.dim = m.dim != 0 ? m.dim : (cfg.grid.dim != 0 ? cfg.grid.dim : (m.inverse_mass.size() == 3 ? 2 : 1));
    if (!m.inverse_mass_files.empty()) {
        const std::size_t want = q.dim == 1 ? 1 : 3;
        if (m.inverse_mass_files.size() != want)
            throw ConfigError("'model.A.files' needs " + std::to_string(want) + " grid files for d=" +
                              std::to_string(q.dim));
        std::vector<GridFunction> entries;
        for (const auto& path : m.inverse_mass_files) {
            if (!std::filesystem::exists(path)) throw ConfigError("missing file '" + path + "'");
            entries.push_back(load_grid_function(path));
        }
        q.inverse_mass = InverseMass::sampled(q.dim, std::move(entries));
    } else if (m.inverse_mass.size() == 1) {
        const double a = m.inverse_mass[0];
        q.inverse_mass = q.dim == 1 ? InverseMass::scalar(a) : InverseMass::constant(2, {Vec{a, 0.0}, Vec{0.0, a}});
    } else {
        if (q.dim != 2) throw ConfigError("'model.A' with three entries needs d=2");
        q.inverse_mass =
            InverseMass::constant(2, {Vec{m.inverse_mass[0], m.inverse_mass[1]}, Vec{m.inverse_mass[1], m.inverse_mass[2]}});
    }
    if (!m.potential.empty()) q.potential = Expression::parse(m.potential, VariableSet::position_only(q.dim));
    q.coupling = m.coupling == "sin" ? Coupling::sinusoidal(m.coupling_coef) : Coupling::linear(m.coupling_coef);
    return HamiltonianModel::quadratic_contact(std::move(q), m.lambda, period);
}

TorusSpec build_grid(const RunConfig& cfg, int model_dim) {
    const int dim = cfg.grid.dim != 0 ? cfg.grid.dim : model_dim;
    if (dim != model_dim) throw ConfigError("'grid.dim' does not match the model dimension");
    return TorusSpec(dim, cfg.grid.resolution, Vec{cfg.grid.period, dim == 2 ? cfg.grid.period : 0.0});
}

GridFunction build_initial(const RunConfig& cfg, const TorusSpec& spec) {
    const auto& init = cfg.initial;
    if (!init.file.empty()) {
        if (!std::filesystem::exists(init.file)) throw ConfigError("missing file '" + init.file + "'");
        auto f = load_grid_function(init.file);
        if (f.spec().dim() != spec.dim()) throw ConfigError("initial data file has the wrong dimension");
        return f;
    }
    if (init.expression.empty()) throw ConfigError("missing key 'initial' (or --phi)");
    const auto e = Expression::parse(init.expression, VariableSet::position_only(spec.dim()));
    return GridFunction::sample(spec, [&](const Vec& x) { return e.value(x, Vec{}, 0.0); });
}

SamplingPlan build_sampling_plan(const RunConfig& cfg) {
    SamplingPlan plan;
    plan.p_max = cfg.model.p_max;
    plan.u_max = cfg.model.u_max;
    plan.x_nodes = cfg.model.x_nodes;
    if (cfg.model.alpha) plan.envelope = std::array<double, 2>{*cfg.model.alpha, *cfg.model.beta};
    return plan;
}

}  // namespace chj
