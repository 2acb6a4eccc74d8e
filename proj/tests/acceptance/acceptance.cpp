// Acceptance run: one PASS/FAIL line per criterion, runtime included.
// Exit status is 0 only when every line passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chj/action.hpp"
#include "chj/flow.hpp"
#include "chj/hamiltonian.hpp"
#include "chj/semigroup.hpp"
#include "chj/verify.hpp"

namespace {

using namespace chj;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// u + p^2/2
HamiltonianModel oracle_model() {
    QuadraticContact q;
    q.coupling = Coupling::linear(1.0);
    return HamiltonianModel::quadratic_contact(q);
}

// p^2/2 + 0.2 u + cos(2 pi x)
HamiltonianModel cosine_model() {
    QuadraticContact q;
    q.potential = Expression::parse("cos(2*pi*x1)", VariableSet::position_only(1));
    q.coupling = Coupling::linear(0.2);
    return HamiltonianModel::quadratic_contact(q);
}

GridFunction constant(double a, int n = 256) { return GridFunction(TorusSpec(1, n), a); }

GridFunction wavy(int n = 256) {
    return GridFunction::sample(TorusSpec(1, n), [](const Vec& x) { return -0.3 + 0.05 * std::sin(kTwoPi * x[0]); });
}

Outcome flow_oracle() {
    StepControl step;
    step.h0 = 1e-3;
    const auto traj = integrate(oracle_model(), ContactState{{0.0, 0.0}, {1.0, 0.0}, 0.0}, 1.0, step);
    const auto& s = traj.back();
    const double e1 = std::exp(-1.0);
    const double err = std::max({std::abs(s.x[0] - (1.0 - e1)), std::abs(s.p[0] - e1),
                                 std::abs(s.u - (0.5 * e1 - 0.5 * e1 * e1))});
    return {err <= 1e-6, "max |error| " + fmt("%.2e", err) + " (tol 1e-6)"};
}

Outcome energy_identity() {
    const auto m = oracle_model();
    const ContactState s0{{0.0, 0.0}, {1.0, 0.0}, 0.0};
    StepControl a, b;
    a.h0 = 1e-3;
    b.h0 = 5e-4;
    const double ra = energy_residual(m, integrate(m, s0, 2.0, a));
    const double rb = energy_residual(m, integrate(m, s0, 2.0, b));
    const double ratio = ra / rb;
    return {ra <= 1e-6 && ratio > 3.5 && ratio < 4.5,
            "residual " + fmt("%.2e", ra) + " at h=1e-3 (tol 1e-6), halving ratio " + fmt("%.2f", ratio) +
                " (expect ~4)"};
}

Outcome backward_semigroup() {
    const auto m = oracle_model();
    EvolutionConfig cfg;
    cfg.snapshot_every = 500;
    const auto r = evolve_backward(m, constant(-1.0), 2.0, cfg);
    double err = 0.0;
    for (const auto& [t, g] : r.snapshots) {
        if (std::abs(t - 0.5) > 1e-12 && std::abs(t - 1.0) > 1e-12 && std::abs(t - 2.0) > 1e-12) continue;
        for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(g[i] + std::exp(-t)));
    }
    std::vector<double> e;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        EvolutionConfig c;
        c.dt = dt;
        const auto g = evolve_backward(m, constant(-1.0), 1.0, c).final;
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(g[i] + std::exp(-1.0)));
        e.push_back(worst);
    }
    const double o1 = std::log2(e[0] / e[1]), o2 = std::log2(e[1] / e[2]);
    const bool first_order = std::abs(o1 - 1.0) < 0.1 && std::abs(o2 - 1.0) < 0.1;
    return {err <= 1e-3 && first_order, "max |T-(-1) + e^-t| over t in {0.5,1,2} " + fmt("%.2e", err) +
                                            " (tol 1e-3), observed orders " + fmt("%.3f", o1) + ", " +
                                            fmt("%.3f", o2)};
}

Outcome forward_semigroup() {
    const auto g = evolve_forward(oracle_model(), constant(-1.0), 1.0).final;
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(g[i] + std::exp(1.0)));
    return {err <= 3e-3, "max |T+(-1) + e| " + fmt("%.2e", err) + " (tol 3e-3)"};
}

Outcome action_oracle() {
    const auto m = oracle_model();
    const double v = h_backward(m, {0.0, 0.0, 0.5, 1.0}).value;
    std::mt19937_64 rng(50);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double x0 = U(rng), x = U(rng), t = 0.1 + 1.9 * U(rng), u0 = 2.0 * U(rng) - 1.0;
        worst = std::max(worst, check_equivalence(m, x0, u0, x, t));
    }
    return {std::abs(v - 0.0727471) <= 1e-5 && worst <= 1e-5,
            "h_{0,0}(0.5,1) = " + fmt("%.7f", v) + " (target 0.0727471 +- 1e-5), round-trip residual " +
                fmt("%.2e", worst) + " over 50 queries (tol 1e-5)"};
}

Outcome representation() {
    const auto f = GridFunction::sample(TorusSpec(1, 256), [](const Vec& x) { return 0.1 * std::sin(kTwoPi * x[0]); });
    const auto r = compare_representation(oracle_model(), f, 0.5, 64);
    return {r.max_residual <= 2e-3, "max residual " + fmt("%.2e", r.max_residual) + " over " +
                                        std::to_string(r.probes.size()) + " probes (tol 2e-3)"};
}

struct Cell {
    std::string model, data;
    VerificationReport report;
};

std::vector<Cell> unanimity_matrix() {
    const std::vector<std::pair<std::string, HamiltonianModel>> models{{"u+p^2/2", oracle_model()},
                                                                       {"p^2/2+0.2u+cos", cosine_model()}};
    const std::vector<std::pair<std::string, GridFunction>> data{
        {"-1", constant(-1.0)}, {"+0.5", constant(0.5)}, {"-0.3+0.05sin", wavy()}};
    std::vector<Cell> cells;
    for (const auto& [mn, m] : models)
        for (const auto& [dn, phi] : data) cells.push_back({mn, dn, battery_theorem_A(m, phi, BatteryConfig{})});
    return cells;
}

Outcome theorem_A(const std::vector<Cell>& cells) {
    bool ok = true;
    std::ostringstream detail;
    for (const auto& c : cells) {
        const bool unanimous = c.report.unanimous.value_or(false);
        ok = ok && unanimous;
        std::string verdicts;
        for (const auto& v : c.report.verdicts) verdicts += v.passed ? 'P' : 'F';
        detail << "[" << c.model << " | " << c.data << ": " << verdicts << "] ";
        if (c.data == "+0.5") {
            for (const auto& v : c.report.verdicts) ok = ok && !v.passed && !v.witness.empty();
        }
    }
    detail << "(P/F per subsolution, backward, forward, epigraph)";
    return {ok, detail.str()};
}

Outcome theorem_B() {
    const auto m = oracle_model();
    BatteryConfig cfg;
    cfg.horizons = {0.5, 1.0, 2.0};
    const auto r = battery_theorem_B(m, constant(-1.0, 64), cfg);
    const double c = r.margin("c_hat");
    const double lambda = m.lambda_bound();
    double lo = 1e300, hi = -1e300;
    for (double t : cfg.horizons) {
        const auto g = evolve_backward(m, constant(-1.0, 64), t, cfg.evolution).final;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double margin = g[i] + 1.0 - c * (1.0 - std::exp(-lambda * t)) / lambda;
            lo = std::min(lo, margin);
            hi = std::max(hi, margin);
        }
    }
    const auto z = battery_theorem_B(m, constant(0.0, 64), cfg);
    const double c0 = z.margin("c_hat");
    return {lo >= -1e-3 && hi <= 1e-2 && c0 <= 1e-3 && std::abs(r.margin("rate_bound") - lo) < 1e-12,
            "c_hat " + fmt("%.6f", c) + ", margin range [" + fmt("%.2e", lo) + ", " + fmt("%.2e", hi) +
                "] (need [-1e-3, 1e-2]), c_hat for phi=0 " + fmt("%.2e", c0) + " (need <= 1e-3)"};
}

Outcome lemma_inclusion() {
    const auto m = oracle_model();
    BatteryConfig cfg;
    cfg.samples = 200;
    cfg.tol = 5e-3;
    cfg.horizons = {0.25, 1.0};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<std::array<double, 3>> modes;  // k, a_k, b_k
    for (int j = 0; j < 3; ++j) modes.push_back({static_cast<double>(1 + rng() % 4), U(rng), U(rng)});
    const auto fourier = GridFunction::sample(TorusSpec(1, 256), [&](const Vec& x) {
        double s = 0.0;
        for (const auto& [k, a, b] : modes) s += a * std::cos(kTwoPi * k * x[0]) + b * std::sin(kTwoPi * k * x[0]);
        return 0.2 * s;
    });
    const auto a = check_lemma_flow_inclusion(m, constant(0.5), cfg);
    const auto b = check_lemma_flow_inclusion(m, fourier, cfg);
    const double va = a.margin("violations"), vb = b.margin("violations");
    return {va == 0.0 && vb == 0.0 && a.passed && b.passed,
            "violations " + fmt("%.0f", va) + " (phi=0.5, worst margin " + fmt("%.2e", a.margin("inclusion")) +
                "), " + fmt("%.0f", vb) + " (random Fourier, worst margin " +
                fmt("%.2e", b.margin("inclusion")) + "), tol 5e-3, 200 samples"};
}

Outcome legendre_duality() {
    QuadraticContact q2;
    q2.dim = 2;
    q2.inverse_mass = InverseMass::constant(2, {Vec{1.5, -0.4}, Vec{-0.4, 0.8}});
    q2.potential = Expression::parse("cos(2*pi*x1) + 0.5*sin(2*pi*x2)", VariableSet::position_only(2));
    q2.coupling = Coupling::sinusoidal(0.3);
    const std::vector<HamiltonianModel> models{oracle_model(), cosine_model(), HamiltonianModel::quadratic_contact(q2)};
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    LegendreOptions numeric;
    numeric.force_numeric = true;
    double fy = 0.0, agree = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto& m = models[i % models.size()];
        Vec x{U(rng), 0.0}, v{U(rng), 0.0};
        if (m.dim() == 2) {
            x[1] = U(rng);
            v[1] = U(rng);
        }
        const double u = U(rng);
        const auto a = legendre(m, x, v, u);
        const auto b = legendre(m, x, v, u, numeric);
        fy = std::max(fy, std::abs(a.value + m.value(x, a.argmax_p, u) - dot(a.argmax_p, v)));
        agree = std::max(agree, std::abs(a.value - b.value));
    }
    return {fy <= 1e-8 && agree <= 1e-8, "Fenchel-Young defect " + fmt("%.2e", fy) + ", numeric vs analytic " +
                                             fmt("%.2e", agree) + " over 1000 queries (tol 1e-8)"};
}

Outcome determinism(const std::vector<Cell>& first) {
    const auto second = unanimity_matrix();
    std::size_t same = 0;
    for (std::size_t k = 0; k < first.size(); ++k) {
        std::ostringstream a, b;
        write_samples_csv(a, first[k].report, 1);
        write_samples_csv(b, second[k].report, 1);
        if (a.str() == b.str() && !a.str().empty()) ++same;
    }
    return {same == first.size(),
            std::to_string(same) + "/" + std::to_string(first.size()) + " per-sample CSVs byte-identical"};
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    int failures = 0;
    auto report = [&](int id, const char* name, double budget, const std::function<Outcome()>& fn) {
        const auto t0 = clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        const bool in_time = budget <= 0.0 || secs < budget;
        const bool pass = o.passed && in_time;
        if (!pass) ++failures;
        std::printf("criterion %2d %s  %s: %s; %.3f s", id, pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        if (budget > 0.0) std::printf(" (budget %g s%s)", budget, in_time ? "" : ", exceeded");
        std::printf("\n");
        std::fflush(stdout);
    };

    report(1, "flow oracle", 0.1, flow_oracle);
    report(2, "energy identity", 1.0, energy_identity);
    report(3, "backward semigroup oracle", 10.0, backward_semigroup);
    report(4, "forward semigroup oracle", 10.0, forward_semigroup);
    report(5, "action oracle and equivalence", 30.0, action_oracle);
    report(6, "representation formula", 60.0, representation);
    std::vector<Cell> cells;
    report(7, "equivalence battery unanimity", 300.0, [&] {
        cells = unanimity_matrix();
        return theorem_A(cells);
    });
    report(8, "strict rate equality", 120.0, theorem_B);
    report(9, "flow inclusion", 120.0, lemma_inclusion);
    report(10, "Legendre duality", 5.0, legendre_duality);
    report(11, "determinism", 0.0, [&] { return determinism(cells); });
    std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
