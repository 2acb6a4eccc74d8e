#include "chj/verify.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "chj/parallel.hpp"
#include "chj/text.hpp"

namespace chj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string vec_text(const Vec& v, int dim) {
    if (dim == 1) return format_double(v[0]);
    return "(" + format_double(v[0]) + ", " + format_double(v[1]) + ")";
}

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<double> sorted_horizons(const std::vector<double>& in) {
    if (in.empty()) throw InvalidArgument("at least one horizon is required");
    std::vector<double> h = in;
    std::sort(h.begin(), h.end());
    for (double t : h)
        if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("horizons must be finite and > 0");
    h.erase(std::unique(h.begin(), h.end()), h.end());
    return h;
}

// T_t phi at every horizon, chaining through the semigroup law.
std::vector<GridFunction> evolve_through(const HamiltonianModel& model, const GridFunction& phi,
                                         const std::vector<double>& horizons, const EvolutionConfig& cfg,
                                         bool backward) {
    std::vector<GridFunction> out;
    GridFunction cur = phi;
    double t = 0.0;
    for (double h : horizons) {
        cur = backward ? evolve_backward(model, cur, h - t, cfg).final : evolve_forward(model, cur, h - t, cfg).final;
        out.push_back(cur);
        t = h;
    }
    return out;
}

// Flows every sample through the horizons; records are sample-major.
std::vector<SampleRecord> flow_samples(const HamiltonianModel& model, const GridFunction& phi,
                                       const std::vector<ContactState>& base, const std::vector<bool>& boundary,
                                       const std::vector<double>& horizons, const BatteryConfig& cfg) {
    const std::size_t nh = horizons.size();
    std::vector<SampleRecord> out(base.size() * nh);
    parallel_for(base.size(), cfg.workers, [&](std::size_t k) {
        ContactState s = base[k];
        const double base_gap = s.u - interpolate(phi, s.x);
        double t = 0.0;
        bool alive = true;
        for (std::size_t j = 0; j < nh; ++j) {
            SampleRecord& r = out[k * nh + j];
            r.sample = k;
            r.boundary = boundary[k];
            r.base = base[k];
            r.base_gap = base_gap;
            r.horizon = horizons[j];
            if (alive) {
                const double span = horizons[j] - t;
                const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(span / cfg.flow_step)));
                try {
                    s = advance(model, s, span, steps, TimeDirection::Forward, cfg.ceiling);
                } catch (const BlowUp&) {
                    alive = false;
                } catch (const EvaluationOverflow&) {
                    alive = false;
                }
                t = horizons[j];
            }
            r.complete = alive;
            if (alive) {
                r.state = s;
                r.final_gap = s.u - interpolate(phi, s.x);
            }
        }
    });
    return out;
}

std::string sample_witness(const SampleRecord& r, int dim) {
    std::ostringstream os;
    os << "sample " << r.sample << (r.boundary ? " (boundary)" : "") << " from x=" << vec_text(r.base.x, dim)
       << " p=" << vec_text(r.base.p, dim) << " u=" << format_double(r.base.u) << " at t=" << format_double(r.horizon)
       << ": final_gap=" << format_double(r.final_gap);
    return os.str();
}

std::string node_witness(const GridFunction& f, std::size_t node, double t) {
    return "node " + std::to_string(node) + " x=" + vec_text(f.spec().node_point(node), f.spec().dim()) +
           " t=" + format_double(t);
}

void common_parameters(VerificationReport& r, const HamiltonianModel& model, const GridFunction& phi,
                       const BatteryConfig& cfg, double tol) {
    const TorusSpec& s = phi.spec();
    std::string res = std::to_string(s.resolution(0));
    if (s.dim() == 2) res += "," + std::to_string(s.resolution(1));
    std::string horizons;
    for (double h : cfg.horizons) horizons += (horizons.empty() ? "" : ",") + format_double(h);
    r.parameters = {{"model", model.describe()},
                    {"lambda", format_double(model.lambda_bound())},
                    {"dim", std::to_string(s.dim())},
                    {"resolution", res},
                    {"horizons", horizons},
                    {"samples", std::to_string(cfg.samples)},
                    {"boundary_fraction", format_double(cfg.boundary_fraction)},
                    {"p_cap", format_double(cfg.p_cap)},
                    {"u_cap", format_double(cfg.u_cap)},
                    {"seed", std::to_string(cfg.seed)},
                    {"dt", format_double(cfg.evolution.dt)},
                    {"v_max", format_double(cfg.evolution.v_max)},
                    {"v_res", std::to_string(cfg.evolution.v_res)},
                    {"flow_step", format_double(cfg.flow_step)},
                    {"tolerance", format_double(tol)},
                    {"tolerance_rule", cfg.tol ? "fixed" : "C*(h+dt), C=" + format_double(cfg.tol_constant)}};
}

Verdict subsolution_verdict(const SubsolutionReport& s, int dim) {
    Verdict v{"subsolution", s.passed, s.worst_margin, s.tolerance_used, {}};
    v.witness = "node " + std::to_string(s.witness_node) + " x=" + vec_text(s.witness_x, dim) +
                " p=" + vec_text(s.witness_p, dim) + " H=" + format_double(s.worst_margin);
    return v;
}

// Per-node two-point extrapolation to t = 0 of sign * (T_t phi - phi) / t,
// minimized over nodes.
struct RateEstimate {
    double c = 0.0;
    std::size_t node = 0;
};

RateEstimate small_time_rate(const HamiltonianModel& model, const GridFunction& phi, const BatteryConfig& cfg,
                             bool backward) {
    if (cfg.quotient_times.size() != 2) throw InvalidArgument("rate extrapolation needs exactly two quotient times");
    const double t1 = std::max(cfg.quotient_times[0], cfg.quotient_times[1]);
    const double t2 = std::min(cfg.quotient_times[0], cfg.quotient_times[1]);
    if (!(t2 > 0.0) || t1 == t2) throw InvalidArgument("quotient times must be distinct and positive");
    auto quotient = [&](double t) {
        const GridFunction T =
            backward ? evolve_backward(model, phi, t, cfg.evolution).final : evolve_forward(model, phi, t, cfg.evolution).final;
        std::vector<double> q(phi.size());
        const double sign = backward ? 1.0 : -1.0;
        for (std::size_t i = 0; i < phi.size(); ++i) q[i] = sign * (T[i] - phi[i]) / t;
        return q;
    };
    const auto q1 = quotient(t1);
    const auto q2 = quotient(t2);
    RateEstimate est{kInf, 0};
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double r = (t1 * q2[i] - t2 * q1[i]) / (t1 - t2);
        if (r < est.c) est = {r, i};
    }
    return est;
}

double rate_floor(double c, double lambda, double t) { return c * (1.0 - std::exp(-lambda * t)) / lambda; }

}  // namespace

const char* to_string(SubsolutionMode mode) {
    return mode == SubsolutionMode::AlmostEverywhere ? "ae" : "superdifferential";
}

double default_subsolution_tolerance(const HamiltonianModel& model, const GridFunction& phi) {
    double hp = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const Vec p = difference_quotients(phi, i).central();
        hp = std::max(hp, norm(model.eval(phi.spec().node_point(i), p, phi[i]).d_p));
    }
    return (1.0 + hp) * phi.spec().max_spacing();
}

SubsolutionReport check_subsolution(const HamiltonianModel& model, const GridFunction& phi, SubsolutionMode mode,
                                    std::optional<double> tol) {
    const TorusSpec& spec = phi.spec();
    if (spec.dim() != model.dim()) throw InvalidArgument("grid and model dimensions differ");
    if (mode == SubsolutionMode::Superdifferential && !check_assumptions(model).positive_definite.passed)
        throw InvalidArgument("superdifferential mode needs H convex in p; use ae mode");
    SubsolutionReport rep;
    rep.mode = mode;
    rep.tolerance_used = tol ? *tol : default_subsolution_tolerance(model, phi);
    rep.worst_margin = -kInf;
    const int d = spec.dim();
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const OneSidedGradient g = difference_quotients(phi, i);
        for (int a = 0; a < d; ++a)
            rep.lipschitz_bound = std::max({rep.lipschitz_bound, std::abs(g.lower[a]), std::abs(g.upper[a])});
        const Vec x = spec.node_point(i);
        auto test = [&](const Vec& p) {
            const double h = model.value(x, p, phi[i]);
            if (h > rep.worst_margin) {
                rep.worst_margin = h;
                rep.witness_node = i;
                rep.witness_x = x;
                rep.witness_p = p;
            }
        };
        if (mode == SubsolutionMode::AlmostEverywhere) {
            test(g.central());
            ++rep.nodes_tested;
            continue;
        }
        bool empty = false;
        for (int a = 0; a < d; ++a) empty = empty || g.upper[a] > g.lower[a];
        if (empty) continue;
        ++rep.nodes_tested;
        // H is convex in p, so its maximum over the box sits at a corner.
        if (d == 1) {
            test(g.lower);
            test(g.upper);
        } else {
            for (int c = 0; c < 4; ++c) test({(c & 1) ? g.upper[0] : g.lower[0], (c & 2) ? g.upper[1] : g.lower[1]});
        }
    }
    rep.passed = rep.worst_margin <= rep.tolerance_used;
    return rep;
}

double battery_tolerance(const GridFunction& phi, const BatteryConfig& cfg) {
    if (cfg.tol) return *cfg.tol;
    return cfg.tol_constant * (phi.spec().max_spacing() + cfg.evolution.dt);
}

double VerificationReport::margin(const std::string& name) const {
    for (const auto& [k, v] : margins)
        if (k == name) return v;
    throw InvalidArgument("report has no margin named " + name);
}

const Verdict& VerificationReport::verdict(const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return v;
    throw InvalidArgument("report has no verdict named " + name);
}

std::vector<ContactState> epigraph_samples(const GridFunction& phi, const BatteryConfig& cfg,
                                           std::vector<bool>* boundary) {
    if (!(cfg.boundary_fraction >= 0.0 && cfg.boundary_fraction <= 1.0))
        throw InvalidArgument("boundary_fraction must lie in [0, 1]");
    const TorusSpec& spec = phi.spec();
    const std::size_t n_boundary =
        static_cast<std::size_t>(std::llround(cfg.boundary_fraction * static_cast<double>(cfg.samples)));
    const std::size_t n_interior = cfg.samples - n_boundary;
    std::mt19937_64 rng(cfg.seed);
    std::vector<ContactState> out(cfg.samples);
    if (boundary) boundary->assign(cfg.samples, false);
    for (std::size_t k = 0; k < cfg.samples; ++k) {
        const std::size_t node = static_cast<std::size_t>(rng() % spec.node_count());
        ContactState s;
        s.x = spec.node_point(node);
        for (int a = 0; a < spec.dim(); ++a) s.p[a] = cfg.p_cap * (2.0 * unit(rng) - 1.0);
        const double gap = cfg.u_cap * unit(rng);
        if (k < n_interior) {
            s.u = phi[node] + gap;
        } else {
            s.u = phi[node];
            if ((k - n_interior) % 2 == 0) s.p = difference_quotients(phi, node).central();
            if (boundary) (*boundary)[k] = true;
        }
        out[k] = s;
    }
    return out;
}

VerificationReport battery_subsolution(const HamiltonianModel& model, const GridFunction& phi,
                                       const BatteryConfig& cfg) {
    VerificationReport r;
    r.battery = "subsolution";
    const SubsolutionReport s = check_subsolution(model, phi, cfg.mode, cfg.tol);
    common_parameters(r, model, phi, cfg, s.tolerance_used);
    r.parameters.emplace_back("mode", to_string(cfg.mode));
    r.parameters.emplace_back("lipschitz_bound", format_double(s.lipschitz_bound));
    r.parameters.emplace_back("nodes_tested", std::to_string(s.nodes_tested));
    r.verdicts.push_back(subsolution_verdict(s, phi.spec().dim()));
    r.margins.emplace_back("subsolution", s.worst_margin);
    r.passed = s.passed;
    return r;
}

VerificationReport battery_theorem_A(const HamiltonianModel& model, const GridFunction& phi,
                                     const BatteryConfig& cfg) {
    VerificationReport r;
    r.battery = "theorem-a";
    const double tol = battery_tolerance(phi, cfg);
    const auto horizons = sorted_horizons(cfg.horizons);
    common_parameters(r, model, phi, cfg, tol);
    r.parameters.emplace_back("mode", to_string(cfg.mode));
    const int dim = phi.spec().dim();

    const SubsolutionReport sub = check_subsolution(model, phi, cfg.mode, tol);
    r.verdicts.push_back(subsolution_verdict(sub, dim));

    const auto back = evolve_through(model, phi, horizons, cfg.evolution, true);
    Verdict v2{"backward_semigroup", false, kInf, tol, {}};
    for (std::size_t j = 0; j < horizons.size(); ++j)
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (back[j][i] - phi[i] < v2.margin) {
                v2.margin = back[j][i] - phi[i];
                v2.witness = node_witness(phi, i, horizons[j]) + " T-phi - phi=" + format_double(v2.margin);
            }
    v2.passed = v2.margin >= -tol;
    r.verdicts.push_back(v2);

    const auto fwd = evolve_through(model, phi, horizons, cfg.evolution, false);
    Verdict v3{"forward_semigroup", false, -kInf, tol, {}};
    for (std::size_t j = 0; j < horizons.size(); ++j)
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (fwd[j][i] - phi[i] > v3.margin) {
                v3.margin = fwd[j][i] - phi[i];
                v3.witness = node_witness(phi, i, horizons[j]) + " T+phi - phi=" + format_double(v3.margin);
            }
    v3.passed = v3.margin <= tol;
    r.verdicts.push_back(v3);

    std::vector<bool> boundary;
    const auto base = epigraph_samples(phi, cfg, &boundary);
    r.samples = flow_samples(model, phi, base, boundary, horizons, cfg);
    Verdict v4{"epigraph_invariance", false, kInf, tol, {}};
    std::size_t incomplete = 0;
    for (auto& s : r.samples) {
        if (!s.complete) {
            ++incomplete;
            continue;
        }
        s.margin = s.final_gap;
        if (s.margin < v4.margin) {
            v4.margin = s.margin;
            v4.witness = sample_witness(s, dim);
        }
    }
    v4.passed = v4.margin >= -tol;
    r.verdicts.push_back(v4);
    r.parameters.emplace_back("incomplete_samples", std::to_string(incomplete));

    for (const auto& v : r.verdicts) r.margins.emplace_back(v.name, v.margin);
    r.passed = std::all_of(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.passed; });
    const bool none = std::none_of(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.passed; });
    r.unanimous = r.passed || none;
    return r;
}

VerificationReport battery_theorem_B(const HamiltonianModel& model, const GridFunction& phi,
                                     const BatteryConfig& cfg) {
    VerificationReport r;
    r.battery = "theorem-b";
    const double tol = battery_tolerance(phi, cfg);
    const auto horizons = sorted_horizons(cfg.horizons);
    common_parameters(r, model, phi, cfg, tol);
    const double lambda = model.lambda_bound();
    r.parameters.emplace_back("extrapolation", "two-point linear in t, order 1");
    r.parameters.emplace_back("quotient_times",
                              format_double(cfg.quotient_times.at(0)) + "," + format_double(cfg.quotient_times.at(1)));

    const RateEstimate c = small_time_rate(model, phi, cfg, true);
    const auto back = evolve_through(model, phi, horizons, cfg.evolution, true);
    double gain = kInf;
    std::size_t gain_node = 0;
    double gain_t = 0.0;
    for (std::size_t j = 0; j < horizons.size(); ++j)
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (back[j][i] - phi[i] < gain) {
                gain = back[j][i] - phi[i];
                gain_node = i;
                gain_t = horizons[j];
            }
    Verdict strict{"strictness", c.c > tol && gain > tol, c.c, tol, {}};
    strict.witness = "rate " + format_double(c.c) + " at " + node_witness(phi, c.node, 0.0) +
                     "; min T-phi - phi=" + format_double(gain) + " at " + node_witness(phi, gain_node, gain_t);
    r.verdicts.push_back(strict);

    Verdict rate{"rate_bound", false, kInf, tol, {}};
    for (std::size_t j = 0; j < horizons.size(); ++j)
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double m = back[j][i] - phi[i] - rate_floor(c.c, lambda, horizons[j]);
            if (m < rate.margin) {
                rate.margin = m;
                rate.witness = node_witness(phi, i, horizons[j]);
            }
        }
    rate.passed = rate.margin >= -tol;
    r.verdicts.push_back(rate);

    const RateEstimate cf = small_time_rate(model, phi, cfg, false);
    const auto fwd = evolve_through(model, phi, horizons, cfg.evolution, false);
    double drop = -kInf;
    std::size_t drop_node = 0;
    double drop_t = 0.0;
    for (std::size_t j = 0; j < horizons.size(); ++j)
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (fwd[j][i] - phi[i] > drop) {
                drop = fwd[j][i] - phi[i];
                drop_node = i;
                drop_t = horizons[j];
            }
    Verdict forward{"forward_strictness", cf.c > tol && drop < -tol, cf.c, tol, {}};
    forward.witness = "rate " + format_double(cf.c) + " at " + node_witness(phi, cf.node, 0.0) +
                      "; max T+phi - phi=" + format_double(drop) + " at " + node_witness(phi, drop_node, drop_t);
    r.verdicts.push_back(forward);

    r.margins = {{"c_hat", c.c},
                 {"min_backward_gain", gain},
                 {"rate_bound", rate.margin},
                 {"c_hat_forward", cf.c},
                 {"max_forward_change", drop}};
    r.passed = strict.passed && rate.passed && forward.passed;
    return r;
}

VerificationReport battery_corollary_C(const HamiltonianModel& model, const GridFunction& phi,
                                       const BatteryConfig& cfg) {
    VerificationReport r;
    r.battery = "corollary-c";
    const double tol = battery_tolerance(phi, cfg);
    const auto horizons = sorted_horizons(cfg.horizons);
    common_parameters(r, model, phi, cfg, tol);
    const double lambda = model.lambda_bound();
    const int dim = phi.spec().dim();

    const RateEstimate c = small_time_rate(model, phi, cfg, true);
    Verdict pre{"strictness_precondition", c.c > tol, c.c, tol, "rate at " + node_witness(phi, c.node, 0.0)};
    r.parameters.emplace_back("require_strictness", cfg.require_strictness ? "true" : "false");
    r.verdicts.push_back(pre);

    std::vector<bool> boundary;
    const auto base = epigraph_samples(phi, cfg, &boundary);
    r.samples = flow_samples(model, phi, base, boundary, horizons, cfg);
    Verdict floor{"gap_floor", false, kInf, tol, {}};
    Verdict interior{"interiority", false, kInf, tol, {}};
    std::size_t incomplete = 0;
    for (auto& s : r.samples) {
        if (!s.complete) {
            ++incomplete;
            continue;
        }
        s.margin = s.final_gap - rate_floor(std::max(c.c, 0.0), lambda, s.horizon);
        if (s.margin < floor.margin) {
            floor.margin = s.margin;
            floor.witness = sample_witness(s, dim);
        }
        if (s.final_gap < interior.margin) {
            interior.margin = s.final_gap;
            interior.witness = sample_witness(s, dim);
        }
    }
    floor.passed = floor.margin >= -tol;
    // Interior points are only resolved when the gap clears the tolerance.
    interior.passed = interior.margin > tol;
    r.verdicts.push_back(floor);
    r.verdicts.push_back(interior);
    r.parameters.emplace_back("incomplete_samples", std::to_string(incomplete));
    r.margins = {{"c_hat", c.c}, {"gap_floor", floor.margin}, {"min_final_gap", interior.margin}};
    r.passed = (pre.passed || !cfg.require_strictness) && floor.passed && interior.passed;
    return r;
}

VerificationReport check_lemma_flow_inclusion(const HamiltonianModel& model, const GridFunction& phi,
                                              const BatteryConfig& cfg) {
    VerificationReport r;
    r.battery = "lemma-inclusion";
    const double tol = battery_tolerance(phi, cfg);
    const auto horizons = sorted_horizons(cfg.horizons);
    common_parameters(r, model, phi, cfg, tol);
    const int dim = phi.spec().dim();

    const auto back = evolve_through(model, phi, horizons, cfg.evolution, true);
    std::vector<bool> boundary;
    const auto base = epigraph_samples(phi, cfg, &boundary);
    r.samples = flow_samples(model, phi, base, boundary, horizons, cfg);
    Verdict v{"inclusion", false, kInf, tol, {}};
    std::size_t incomplete = 0, violations = 0;
    for (auto& s : r.samples) {
        if (!s.complete) {
            ++incomplete;
            continue;
        }
        const std::size_t j =
            static_cast<std::size_t>(std::find(horizons.begin(), horizons.end(), s.horizon) - horizons.begin());
        s.margin = s.state.u - interpolate(back[j], s.state.x);
        if (s.margin < -tol) ++violations;
        if (s.margin < v.margin) {
            v.margin = s.margin;
            v.witness = sample_witness(s, dim) + " u-T_t phi=" + format_double(s.margin);
        }
    }
    v.passed = violations == 0;
    r.verdicts.push_back(v);
    r.parameters.emplace_back("incomplete_samples", std::to_string(incomplete));
    r.margins = {{"inclusion", v.margin}, {"violations", static_cast<double>(violations)}};
    r.passed = v.passed;
    return r;
}

void write_report(std::ostream& os, const VerificationReport& report) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "battery" << YAML::Value << report.battery;
    out << YAML::Key << "passed" << YAML::Value << report.passed;
    if (report.unanimous) out << YAML::Key << "unanimous" << YAML::Value << *report.unanimous;
    out << YAML::Key << "verdicts" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : report.verdicts) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << v.name;
        out << YAML::Key << "passed" << YAML::Value << v.passed;
        out << YAML::Key << "margin" << YAML::Value << v.margin;
        out << YAML::Key << "tolerance" << YAML::Value << v.tolerance;
        out << YAML::Key << "witness" << YAML::Value << v.witness;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "margins" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : report.margins) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
    out << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : report.parameters) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
    out << YAML::Key << "statement" << YAML::Value
        << (report.passed ? "no violation found at the stated resolution and tolerance"
                          : "violation found; see verdict witnesses");
    out << YAML::EndMap;
    os << out.c_str() << '\n';
}

void write_samples_csv(std::ostream& os, const VerificationReport& report, int dim) {
    auto axes = [&](const char* name) {
        std::string s;
        for (int a = 1; a <= dim; ++a) s += std::string(",") + name + std::to_string(a);
        return s;
    };
    os << "sample,boundary,horizon" << axes("x0_") << axes("p0_") << ",u0,base_gap" << axes("xt_") << axes("pt_")
       << ",ut,final_gap,margin,complete\n";
    for (const auto& r : report.samples) {
        os << r.sample << ',' << (r.boundary ? 1 : 0) << ',' << format_double(r.horizon);
        for (int a = 0; a < dim; ++a) os << ',' << format_double(r.base.x[a]);
        for (int a = 0; a < dim; ++a) os << ',' << format_double(r.base.p[a]);
        os << ',' << format_double(r.base.u) << ',' << format_double(r.base_gap);
        if (r.complete) {
            for (int a = 0; a < dim; ++a) os << ',' << format_double(r.state.x[a]);
            for (int a = 0; a < dim; ++a) os << ',' << format_double(r.state.p[a]);
            os << ',' << format_double(r.state.u) << ',' << format_double(r.final_gap) << ','
               << format_double(r.margin) << ",1\n";
        } else {
            for (int a = 0; a < 2 * dim + 3; ++a) os << ",nan";
            os << ",0\n";
        }
    }
}

}  // namespace chj
