#include "chj/cli.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <functional>
#include <sstream>

#include "chj/config.hpp"
#include "chj/text.hpp"

namespace fs = std::filesystem;

namespace chj::cli {

namespace {

/// Files written by one run plus the scalar results echoed into the manifest.
struct Bundle {
    fs::path dir;
    std::vector<std::pair<std::string, std::string>> files;  // name, content hash
    std::vector<std::pair<std::string, std::string>> summary;

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir / name;
        fs::create_directories(path.parent_path());
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ConfigError("cannot write '" + path.string() + "'");
        os << content;
        files.emplace_back(name, sha256_hex(content));
    }
    void note(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
    void note(const std::string& key, double value) { summary.emplace_back(key, format_double(value)); }
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

ContactState state_from(const std::vector<double>& v, int dim) {
    if (static_cast<int>(v.size()) != 2 * dim + 1)
        throw ConfigError("flow state has " + std::to_string(v.size()) + " entries, d=" + std::to_string(dim) +
                          " needs " + std::to_string(2 * dim + 1));
    ContactState s;
    for (int a = 0; a < dim; ++a) {
        s.x[a] = v[a];
        s.p[a] = v[dim + a];
    }
    s.u = v[2 * dim];
    return s;
}

int run_flow(const RunConfig& cfg, Bundle& b) {
    const auto model = build_model(cfg);
    const int d = model.dim();
    std::vector<ContactState> initial;
    for (const auto& v : cfg.flow.states) initial.push_back(state_from(v, d));
    StepControl step;
    step.h0 = cfg.flow.h;
    step.adaptive = cfg.flow.adaptive;
    step.energy_tol = cfg.flow.energy_tol;
    step.ceiling = cfg.flow.ceiling;
    const auto members = integrate_ensemble(model, initial, cfg.flow.T, step, cfg.evolution.config.workers);

    std::ostringstream summary;
    summary << "state,t_end,energy_residual,blowup_time\n";
    std::size_t blowups = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& m = members[k];
        std::ostringstream csv;
        write_trajectory_csv(csv, m.trajectory, d);
        b.write("trajectory_" + std::to_string(k) + ".csv", csv.str());
        summary << k << ',' << format_double(m.trajectory.times.back()) << ','
                << format_double(m.trajectory.size() >= 3 ? energy_residual(model, m.trajectory) : 0.0) << ','
                << (m.blowup_time ? format_double(*m.blowup_time) : "") << '\n';
        if (m.blowup_time) ++blowups;
    }
    b.write("flow_summary.csv", summary.str());
    b.note("trajectories", std::to_string(members.size()));
    b.note("blowups", std::to_string(blowups));
    return kExitOk;
}

int run_legendre(const RunConfig& cfg, Bundle& b) {
    const auto model = build_model(cfg);
    const int d = model.dim();
    const auto& l = cfg.legendre;
    Vec x{};
    for (std::size_t a = 0; a < l.x.size() && a < static_cast<std::size_t>(d); ++a) x[a] = l.x[a];
    LegendreOptions opts;
    opts.p_max = cfg.model.p_max;

    std::ostringstream csv;
    for (int a = 1; a <= d; ++a) csv << 'v' << a << ',';
    csv << 'L';
    for (int a = 1; a <= d; ++a) csv << ",p" << a;
    csv << ",residual,fenchel_young\n";

    const int n = l.count;
    const int rows = d == 1 ? n : n * n;
    double worst = 0.0;
    std::size_t failures = 0;
    for (int r = 0; r < rows; ++r) {
        Vec v{};
        v[0] = -l.v_max + 2.0 * l.v_max * (r % n) / (n - 1);
        if (d == 2) v[1] = -l.v_max + 2.0 * l.v_max * (r / n) / (n - 1);
        for (int a = 0; a < d; ++a) csv << format_double(v[a]) << ',';
        try {
            const auto lv = legendre(model, x, v, l.u, opts);
            const double fy = lv.value + model.value(x, lv.argmax_p, l.u) - dot(lv.argmax_p, v);
            csv << format_double(lv.value);
            for (int a = 0; a < d; ++a) csv << ',' << format_double(lv.argmax_p[a]);
            csv << ',' << format_double(lv.residual) << ',' << format_double(fy) << '\n';
            worst = std::max({worst, lv.residual, std::abs(fy)});
        } catch (const LegendreNonConvergence& e) {
            csv << "nan";
            for (int a = 0; a < d; ++a) csv << ',' << format_double(e.best_p()[a]);
            csv << ',' << format_double(e.residual()) << ",nan\n";
            ++failures;
        }
    }
    b.write("legendre.csv", csv.str());
    b.note("max_defect", worst);
    b.note("non_converged", std::to_string(failures));
    return failures == 0 ? kExitOk : kExitCheckFailed;
}

void write_sweep_only(std::ostream& os, const std::vector<SweepSample>& sweep) {
    os << "p0,x_t,u_t\n";
    for (const auto& s : sweep) {
        if (!s.finite) continue;
        os << format_double(s.p0) << ',' << format_double(s.x_end) << ',' << format_double(s.u_end) << '\n';
    }
}

int run_action(const RunConfig& cfg, Bundle& b) {
    const auto model = build_model(cfg);
    if (model.dim() != 1) throw ConfigError("the action subcommand needs a d=1 model");
    const auto& q = cfg.action.query;
    const auto& s = cfg.action.shooting;
    ActionResult best;
    try {
        if (q.t < s.t_min) {
            best = action(model, q, s);
        } else {
            const ShootingSweep sweep(model, q.x0, q.u0, q.t, q.direction, s);
            best = sweep.resolve(q.x);
            std::ostringstream csv;
            write_sweep_csv(csv, sweep, best);
            b.write("sweep.csv", csv.str());
        }
    } catch (const NoCharacteristicFound& e) {
        std::ostringstream csv;
        write_sweep_only(csv, e.sweep());
        b.write("sweep.csv", csv.str());
        b.note("error", e.what());
        return kExitCheckFailed;
    }
    b.note("value", best.value);
    b.note("attaining_p0", best.attaining_p0[0]);
    b.note("winding", std::to_string(best.winding[0]));
    b.note("hits", std::to_string(best.hits));
    b.note("small_time", best.small_time ? "true" : "false");
    return kExitOk;
}

int run_semigroup(const RunConfig& cfg, Bundle& b) {
    const auto model = build_model(cfg);
    const auto spec = build_grid(cfg, model.dim());
    const auto phi = build_initial(cfg, spec);
    const auto& e = cfg.evolution;
    validate_evolution(model, spec, e.config);
    EvolutionResult r;
    try {
        r = e.direction == "forward" ? evolve_forward(model, phi, e.t, e.config)
                                     : evolve_backward(model, phi, e.t, e.config);
    } catch (const PicardDivergence& ex) {
        b.note("error", ex.what());
        return kExitCheckFailed;
    }
    std::ostringstream fin;
    write_grid_function(fin, r.final);
    b.write("final.grid", fin.str());
    std::ostringstream index;
    index << "index,t,file,min,max\n";
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        const std::string name = "snapshots/snapshot_" + std::to_string(k) + ".grid";
        std::ostringstream g;
        write_grid_function(g, r.snapshots[k].second);
        b.write(name, g.str());
        index << k << ',' << format_double(r.snapshots[k].first) << ',' << name << ','
              << format_double(r.snapshots[k].second.min()) << ',' << format_double(r.snapshots[k].second.max())
              << '\n';
    }
    if (!r.snapshots.empty()) b.write("snapshots.csv", index.str());
    b.note("steps", std::to_string(r.steps));
    b.note("time", r.time);
    b.note("picard_iters", std::to_string(r.picard_iters));
    b.note("monotone_flag", r.monotone_flag ? "true" : "false");
    b.note("final_min", r.final.min());
    b.note("final_max", r.final.max());
    return kExitOk;
}

int run_verify(const RunConfig& cfg, Bundle& b) {
    using Battery = std::function<VerificationReport(const HamiltonianModel&, const GridFunction&,
                                                     const BatteryConfig&)>;
    static const std::vector<std::pair<std::string, Battery>> batteries{
        {"subsolution", battery_subsolution},
        {"theorem-a", battery_theorem_A},
        {"theorem-b", battery_theorem_B},
        {"corollary-c", battery_corollary_C},
        {"lemma-inclusion", check_lemma_flow_inclusion},
    };
    const auto it = std::find_if(batteries.begin(), batteries.end(),
                                 [&](const auto& e) { return e.first == cfg.battery; });
    if (it == batteries.end()) throw ConfigError("unknown battery '" + cfg.battery + "'");

    const auto model = build_model(cfg);
    const auto spec = build_grid(cfg, model.dim());
    const auto phi = build_initial(cfg, spec);
    BatteryConfig bc = cfg.battery_config;
    bc.evolution = cfg.evolution.config;
    const auto report = it->second(model, phi, bc);

    std::ostringstream rep;
    write_report(rep, report);
    b.write("report.yaml", rep.str());
    std::ostringstream csv;
    write_samples_csv(csv, report, model.dim());
    b.write("samples.csv", csv.str());
    b.note("battery", report.battery);
    b.note("passed", report.passed ? "true" : "false");
    for (const auto& v : report.verdicts) b.note("verdict." + v.name, v.passed ? "pass" : "fail");
    return report.passed ? kExitOk : kExitCheckFailed;
}

void emit_check(YAML::Emitter& out, const AssumptionCheck& c) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << c.name;
    out << YAML::Key << "passed" << YAML::Value << c.passed;
    out << YAML::Key << "measure" << YAML::Value << c.measure;
    out << YAML::Key << "threshold" << YAML::Value << c.threshold;
    out << YAML::Key << "samples" << YAML::Value << c.samples;
    out << YAML::Key << "statement" << YAML::Value << c.statement;
    out << YAML::Key << "witness" << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "x" << YAML::Value << YAML::Flow << std::vector<double>{c.witness.x[0], c.witness.x[1]};
    out << YAML::Key << "p" << YAML::Value << YAML::Flow << std::vector<double>{c.witness.p[0], c.witness.p[1]};
    out << YAML::Key << "u" << YAML::Value << c.witness.u;
    out << YAML::EndMap;
    out << YAML::EndMap;
}

int run_diagnose(const RunConfig& cfg, Bundle& b) {
    const auto model = build_model(cfg);
    const auto report = check_assumptions(model, build_sampling_plan(cfg));
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "model" << YAML::Value << model.describe();
    out << YAML::Key << "passed" << YAML::Value << report.all_passed();
    out << YAML::Key << "checks" << YAML::Value << YAML::BeginSeq;
    emit_check(out, report.positive_definite);
    emit_check(out, report.superlinear);
    emit_check(out, report.lipschitz_in_u);
    if (report.completeness) emit_check(out, *report.completeness);
    out << YAML::EndSeq;
    out << YAML::EndMap;
    b.write("diagnose.yaml", std::string(out.c_str()) + "\n");
    b.note("passed", report.all_passed() ? "true" : "false");
    return report.all_passed() ? kExitOk : kExitCheckFailed;
}

void write_manifest(Bundle& b, const std::string& subcommand, const std::vector<std::string>& args,
                    const RunConfig& cfg, const std::string& echo,
                    const std::vector<std::pair<std::string, std::string>>& inputs, const std::string& started,
                    double wall, int status, const std::string& error) {
    std::string hashed = echo;
    for (const auto& [name, digest] : inputs) hashed += name + "\n" + digest + "\n";

    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "tool" << YAML::Value << "chj";
    out << YAML::Key << "version" << YAML::Value << kVersion;
    out << YAML::Key << "subcommand" << YAML::Value << subcommand;
    out << YAML::Key << "arguments" << YAML::Value << YAML::Flow << args;
    out << YAML::Key << "seed" << YAML::Value << cfg.battery_config.seed;
    out << YAML::Key << "started_at" << YAML::Value << started;
    out << YAML::Key << "wall_time_seconds" << YAML::Value << wall;
    out << YAML::Key << "exit_status" << YAML::Value << status;
    if (!error.empty()) out << YAML::Key << "error" << YAML::Value << error;
    out << YAML::Key << "input_sha256" << YAML::Value << sha256_hex(hashed);
    out << YAML::Key << "inputs" << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, digest] : inputs)
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "file" << YAML::Value << name << YAML::Key << "sha256"
            << YAML::Value << digest << YAML::EndMap;
    out << YAML::EndSeq;
    out << YAML::Key << "outputs" << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, digest] : b.files)
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "file" << YAML::Value << name << YAML::Key << "sha256"
            << YAML::Value << digest << YAML::EndMap;
    out << YAML::EndSeq;
    out << YAML::Key << "summary" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : b.summary) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
    out << YAML::Key << "config" << YAML::Value << YAML::Load(echo);
    out << YAML::EndMap;

    fs::create_directories(b.dir);
    std::ofstream os(b.dir / "manifest.yaml", std::ios::binary);
    os << out.c_str() << '\n';
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::ostringstream ss;
    ss << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) ss << std::setw(2) << static_cast<int>(digest[i]);
    return ss.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contact Hamilton-Jacobi toolkit: characteristics, actions, semigroups and verification batteries",
                 "chj"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, model_text, phi, battery, out_dir;
    double t = 0.0, dt = 0.0;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    auto* o_config = app.add_option("--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);
    auto* o_model = app.add_option("--model", model_text, "Hamiltonian expression in x1, x2, p1, p2, u");
    auto* o_phi = app.add_option("--phi", phi, "initial data: expression in x1 (x2) or a grid file");
    auto* o_t = app.add_option("--t", t, "horizon (evolution t, flow T, action t)")->check(CLI::NonNegativeNumber);
    auto* o_dt = app.add_option("--dt", dt, "time step (evolution dt, flow h)")->check(CLI::PositiveNumber);
    auto* o_battery = app.add_option("--battery", battery, "verification battery")
                          ->check(CLI::IsMember({"subsolution", "theorem-a", "theorem-b", "corollary-c",
                                                 "lemma-inclusion"}));
    auto* o_seed = app.add_option("--seed", seed, "sampling seed");
    auto* o_out = app.add_option("--out", out_dir, "output directory");
    auto* o_workers = app.add_option("--workers", workers, "worker threads, 0 = available parallelism");

    app.add_subcommand("flow", "integrate characteristics from one or more initial states");
    app.add_subcommand("legendre", "tabulate the Lagrangian over a velocity grid");
    app.add_subcommand("action", "shooting sweep for an implicit action value");
    app.add_subcommand("semigroup", "evolve initial data with the backward or forward semigroup");
    app.add_subcommand("verify", "run a verification battery");
    app.add_subcommand("diagnose", "sampled report on the structural assumptions");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    const auto started = std::chrono::steady_clock::now();
    const std::string started_at = utc_now();
    RunConfig cfg;
    std::vector<std::pair<std::string, std::string>> inputs;
    try {
        if (o_config->count()) {
            cfg = load_config(config_path);
            inputs.emplace_back(config_path, sha256_hex(read_text(config_path)));
        }
    } catch (const ConfigError& e) {
        err << "error: " << config_path << ": " << e.what() << '\n';
        return kExitUsage;
    }
    if (o_model->count()) {
        cfg.has_model = true;
        cfg.model.kind = "expression";
        cfg.model.expression = model_text;
    }
    if (o_phi->count()) {
        cfg.initial = {};
        if (fs::exists(phi)) cfg.initial.file = phi;
        else cfg.initial.expression = phi;
    }
    if (o_t->count()) {
        cfg.evolution.t = t;
        cfg.flow.T = t;
        cfg.action.query.t = t;
    }
    if (o_dt->count()) {
        cfg.evolution.config.dt = dt;
        cfg.flow.h = dt;
    }
    if (o_battery->count()) cfg.battery = battery;
    if (o_seed->count()) cfg.battery_config.seed = seed;
    if (o_out->count()) cfg.out = out_dir;
    if (o_workers->count()) {
        cfg.evolution.config.workers = workers;
        cfg.battery_config.workers = workers;
        cfg.action.shooting.workers = workers;
    }
    for (const auto& f : cfg.model.inverse_mass_files)
        if (fs::exists(f)) inputs.emplace_back(f, sha256_hex(read_text(f)));
    if (!cfg.initial.file.empty() && fs::exists(cfg.initial.file))
        inputs.emplace_back(cfg.initial.file, sha256_hex(read_text(cfg.initial.file)));

    const std::string echo = echo_config(cfg);
    Bundle bundle{fs::path(cfg.out), {}, {}};
    int status = kExitOk;
    std::string error;
    try {
        if (sub == "flow") status = run_flow(cfg, bundle);
        else if (sub == "legendre") status = run_legendre(cfg, bundle);
        else if (sub == "action") status = run_action(cfg, bundle);
        else if (sub == "semigroup") status = run_semigroup(cfg, bundle);
        else if (sub == "verify") status = run_verify(cfg, bundle);
        else status = run_diagnose(cfg, bundle);
    } catch (const InvalidArgument& e) {
        status = kExitUsage;
        error = e.what();
    } catch (const ParseError& e) {
        status = kExitUsage;
        error = std::string(e.what()) + " (offset " + std::to_string(e.offset()) + ")";
    } catch (const Error& e) {
        status = kExitCheckFailed;
        error = e.what();
    } catch (const fs::filesystem_error& e) {
        status = kExitUsage;
        error = e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    try {
        write_manifest(bundle, sub, args, cfg, echo, inputs, started_at, wall, status, error);
    } catch (const std::exception& e) {
        err << "error: cannot write manifest: " << e.what() << '\n';
        return kExitUsage;
    }

    if (!error.empty()) err << "error: " << error << '\n';
    out << sub << ": " << (status == kExitOk ? "ok" : status == kExitCheckFailed ? "check failed" : "error");
    for (const auto& [k, v] : bundle.summary) out << ' ' << k << '=' << v;
    out << " (" << (bundle.dir / "manifest.yaml").string() << ")\n";
    return status;
}

}  // namespace chj::cli
