#include "chj/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "chj/parallel.hpp"
#include "chj/text.hpp"

namespace chj {

namespace {

// L(x, v, w) at one fixed node. QuadraticContact models use the closed form
// 1/2 <A^{-1} v, v> - V0(x) - g(w); others warm-start the numeric transform
// from the previous maximizer.
class NodeLagrangian {
public:
    NodeLagrangian(const HamiltonianModel& model, const Vec& x, const LegendreOptions& opts)
        : model_(model), x_(x), opts_(opts) {
        if (const QuadraticContact* q = model.quadratic(); q && !opts.force_numeric) {
            quadratic_ = true;
            const Mat2 a = q->inverse_mass.at(x);
            if (model.dim() == 1) {
                inv_ = {Vec{1.0 / a[0][0], 0.0}, Vec{0.0, 0.0}};
            } else {
                const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                inv_ = {Vec{a[1][1] / det, -a[0][1] / det}, Vec{-a[1][0] / det, a[0][0] / det}};
            }
            v0_ = q->potential.empty() ? 0.0 : q->potential.value(x, {}, 0.0);
            coupling_ = q->coupling;
        }
    }

    /// True when L = Q(v) - c - g(w): the argmin over v does not move with w.
    bool separable() const { return quadratic_; }
    double coupling(double w) const { return coupling_.value(w); }

    double operator()(const Vec& v, double w) {
        if (quadratic_) {
            const Vec av{inv_[0][0] * v[0] + inv_[0][1] * v[1], inv_[1][0] * v[0] + inv_[1][1] * v[1]};
            return 0.5 * dot(av, v) - v0_ - coupling_.value(w);
        }
        const LagrangianValue r = legendre_from(model_, x_, v, w, guess_, opts_);
        guess_ = r.argmax_p;
        return r.value;
    }

private:
    const HamiltonianModel& model_;
    Vec x_;
    LegendreOptions opts_;
    bool quadratic_ = false;
    Mat2 inv_{};
    double v0_ = 0.0;
    Coupling coupling_;
    Vec guess_{};
};

constexpr double kGolden = 0.6180339887498949;

// Solves the per-node fixed point. sgn = +1 for the backward (inf) step and
// -1 for the forward (sup) step; both minimize
//   phi(v) = sgn * f(x - sgn v dt) + dt L(x, v, w)
// and set w = sgn * min phi.
class NodeSolver {
public:
    NodeSolver(const HamiltonianModel& model, const GridFunction& f, const EvolutionConfig& cfg, double sgn,
               std::size_t node)
        : f_(f), cfg_(cfg), sgn_(sgn), dim_(model.dim()), x_(f.spec().node_point(node)),
          lag_(model, x_, cfg.legendre) {
        const int n = cfg.v_res;
        dv_ = 2.0 * cfg.v_max / (n - 1);
        const std::size_t count = dim_ == 1 ? n : static_cast<std::size_t>(n) * n;
        shifted_.resize(count);
        for (std::size_t k = 0; k < count; ++k) shifted_[k] = sgn_ * interpolate(f_, departure(velocity(k)));
    }

    // Returns the converged value and adds the iteration count.
    double solve(double w, int& iterations, std::size_t node) {
        if (lag_.separable()) {
            // One scan; then phi(v*, w) = phi(v*, w0) - dt (g(w) - g(w0)).
            const double w0 = w;
            const double phi0 = argmin(w0).second;
            const double g0 = lag_.coupling(w0);
            ++iterations;
            for (;;) {
                const double next = sgn_ * (phi0 - cfg_.dt * (lag_.coupling(w) - g0));
                ++iterations;
                const bool done = converged(next, w);
                w = next;
                if (done) return w;
                if (iterations > cfg_.picard_max) throw PicardDivergence(0, node, iterations);
            }
        }
        for (;;) {
            const auto [v, phi] = argmin(w);
            ++iterations;
            double next = sgn_ * phi;
            if (converged(next, w)) return next;
            w = next;
            // Inner iteration with the argmin frozen, then rescan.
            const double s = sgn_ * interpolate(f_, departure(v));
            for (;;) {
                if (iterations > cfg_.picard_max) throw PicardDivergence(0, node, iterations);
                next = sgn_ * (s + cfg_.dt * lag_(v, w));
                ++iterations;
                const bool done = converged(next, w);
                w = next;
                if (done) break;
            }
            if (iterations > cfg_.picard_max) throw PicardDivergence(0, node, iterations);
        }
    }

private:
    bool converged(double next, double w) const {
        return std::abs(next - w) <= cfg_.picard_tol * std::max(1.0, std::abs(w));
    }

    Vec velocity(std::size_t k) const {
        if (dim_ == 1) return {-cfg_.v_max + dv_ * static_cast<double>(k), 0.0};
        const std::size_t n = static_cast<std::size_t>(cfg_.v_res);
        return {-cfg_.v_max + dv_ * static_cast<double>(k / n), -cfg_.v_max + dv_ * static_cast<double>(k % n)};
    }

    Vec departure(const Vec& v) const { return x_ - (sgn_ * cfg_.dt) * v; }

    double phi(const Vec& v, double w) { return sgn_ * interpolate(f_, departure(v)) + cfg_.dt * lag_(v, w); }

    std::pair<Vec, double> argmin(double w) {
        // The first strict improvement wins, so ties go to the smallest v in
        // lexicographic order.
        std::size_t best = 0;
        double best_val = shifted_[0] + cfg_.dt * lag_(velocity(0), w);
        for (std::size_t k = 1; k < shifted_.size(); ++k) {
            const double val = shifted_[k] + cfg_.dt * lag_(velocity(k), w);
            if (val < best_val) {
                best_val = val;
                best = k;
            }
        }
        Vec v = velocity(best);
        if (cfg_.refine) {
            for (int a = 0; a < dim_; ++a) {
                double lo = v[a] - dv_, hi = v[a] + dv_;
                auto along = [&](double s) {
                    Vec u = v;
                    u[a] = s;
                    return phi(u, w);
                };
                double c = hi - kGolden * (hi - lo), d = lo + kGolden * (hi - lo);
                double fc = along(c), fd = along(d);
                for (int it = 0; it < cfg_.golden_iterations; ++it) {
                    if (fc < fd) {
                        hi = d;
                        d = c;
                        fd = fc;
                        c = hi - kGolden * (hi - lo);
                        fc = along(c);
                    } else {
                        lo = c;
                        c = d;
                        fc = fd;
                        d = lo + kGolden * (hi - lo);
                        fd = along(d);
                    }
                }
                const double s = fc < fd ? c : d;
                const double fs = std::min(fc, fd);
                if (fs < best_val) {
                    best_val = fs;
                    v[a] = s;
                }
            }
        }
        return {v, best_val};
    }

    const GridFunction& f_;
    const EvolutionConfig& cfg_;
    double sgn_;
    int dim_;
    Vec x_;
    NodeLagrangian lag_;
    double dv_ = 0.0;
    std::vector<double> shifted_;
};

GridFunction step_impl(const HamiltonianModel& model, const GridFunction& f, const EvolutionConfig& cfg, double sgn,
                       int* iterations) {
    const std::size_t n = f.size();
    std::vector<double> out(n);
    std::vector<int> iters(n, 0);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
        NodeSolver solver(model, f, cfg, sgn, i);
        out[i] = solver.solve(f[i], iters[i], i);
    });
    if (iterations) *iterations = *std::max_element(iters.begin(), iters.end());
    return GridFunction(f.spec(), std::move(out));
}

EvolutionResult evolve_impl(const HamiltonianModel& model, const GridFunction& f, double t,
                            const EvolutionConfig& cfg, double sgn) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("evolution horizon must be finite and >= 0");
    validate_evolution(model, f.spec(), cfg);
    EvolutionResult r;
    r.final = f;
    r.time = t;
    if (cfg.snapshot_every > 0) r.snapshots.emplace_back(0.0, f);
    const std::size_t n = t == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t / cfg.dt - 1e-9));
    EvolutionConfig step_cfg = cfg;
    for (std::size_t k = 0; k < n; ++k) {
        step_cfg.dt = (k + 1 == n) ? t - cfg.dt * static_cast<double>(n - 1) : cfg.dt;
        int iters = 0;
        try {
            r.final = step_impl(model, r.final, step_cfg, sgn, &iters);
        } catch (const PicardDivergence& e) {
            throw PicardDivergence(k, e.node(), cfg.picard_max);
        }
        r.picard_iters = std::max(r.picard_iters, iters);
        const bool last = k + 1 == n;
        if (cfg.snapshot_every > 0 && ((k + 1) % static_cast<std::size_t>(cfg.snapshot_every) == 0 || last))
            r.snapshots.emplace_back(last ? t : cfg.dt * static_cast<double>(k + 1), r.final);
    }
    r.steps = n;
    double gap = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) gap = std::min(gap, r.final[i] - f[i]);
    r.monotone_flag = gap >= -cfg.monotone_tol;
    return r;
}

}  // namespace

PicardDivergence::PicardDivergence(std::size_t step, std::size_t node, int iterations)
    : Error("Picard iteration did not converge within " + std::to_string(iterations) + " iterations at step " +
            std::to_string(step) + ", node " + std::to_string(node)),
      step_(step), node_(node) {}

void validate_evolution(const HamiltonianModel& model, const TorusSpec& spec, const EvolutionConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (!(cfg.v_max > 0.0)) throw InvalidArgument("v_max must be positive");
    if (cfg.v_res < 3) throw InvalidArgument("v_res must be at least 3");
    if (cfg.picard_max < 1) throw InvalidArgument("picard_max must be at least 1");
    if (!(cfg.dt * model.lambda_bound() < 1.0))
        throw InvalidArgument("dt * lambda = " + format_double(cfg.dt * model.lambda_bound()) + " must be < 1");
    if (spec.dim() != model.dim()) throw InvalidArgument("grid and model dimensions differ");
    for (int a = 0; a < spec.dim(); ++a) {
        if (spec.period(a) != model.period()[a]) throw InvalidArgument("grid and model periods differ");
        if (!(cfg.v_max * cfg.dt < 0.5 * spec.period(a)))
            throw InvalidArgument("v_max * dt must be below half the period");
    }
}

GridFunction step_backward(const HamiltonianModel& model, const GridFunction& f, const EvolutionConfig& cfg,
                           int* iterations) {
    validate_evolution(model, f.spec(), cfg);
    return step_impl(model, f, cfg, 1.0, iterations);
}

GridFunction step_forward(const HamiltonianModel& model, const GridFunction& f, const EvolutionConfig& cfg,
                          int* iterations) {
    validate_evolution(model, f.spec(), cfg);
    return step_impl(model, f, cfg, -1.0, iterations);
}

EvolutionResult evolve_backward(const HamiltonianModel& model, const GridFunction& f, double t,
                                const EvolutionConfig& cfg) {
    return evolve_impl(model, f, t, cfg, 1.0);
}

EvolutionResult evolve_forward(const HamiltonianModel& model, const GridFunction& f, double t,
                               const EvolutionConfig& cfg) {
    return evolve_impl(model, f, t, cfg, -1.0);
}

RepresentationReport compare_representation(const HamiltonianModel& model, const GridFunction& f, double t,
                                            std::size_t probes, const EvolutionConfig& cfg,
                                            const ShootingConfig& shooting) {
    if (model.dim() != 1) throw InvalidArgument("representation check needs dimension 1");
    if (!(t >= shooting.t_min)) throw InvalidArgument("representation check needs t >= t_min");
    const std::size_t n = f.size();
    if (probes == 0 || probes > n) throw InvalidArgument("probe count must be in [1, node count]");

    const GridFunction evolved = evolve_backward(model, f, t, cfg).final;

    ShootingConfig inner = shooting;
    inner.workers = 1;
    std::vector<std::optional<ShootingSweep>> sweeps(n);
    parallel_for(n, shooting.workers, [&](std::size_t j) {
        sweeps[j].emplace(model, f.spec().node_point(j)[0], f[j], t, ActionDirection::Backward, inner);
    });

    RepresentationReport report;
    report.probes.resize(probes);
    const std::size_t stride = n / probes;
    parallel_for(probes, shooting.workers, [&](std::size_t k) {
        const std::size_t node = k * stride;
        const double x = f.spec().node_point(node)[0];
        // Screen every source with the interpolated sweep, then resolve the
        // few that are close to the best estimate.
        std::vector<std::pair<double, std::size_t>> est;
        for (std::size_t j = 0; j < n; ++j)
            if (auto e = sweeps[j]->estimate(x)) est.emplace_back(*e, j);
        if (est.empty()) {
            ActionQuery q{x, f[node], x, t};
            throw NoCharacteristicFound(q, {});
        }
        std::sort(est.begin(), est.end());
        RepresentationProbe p;
        p.x = x;
        p.semigroup = evolved[node];
        bool have = false;
        for (std::size_t c = 0; c < est.size() && c < 8; ++c) {
            if (c > 0 && est[c].first > est[0].first + 1e-3) break;
            const std::size_t j = est[c].second;
            try {
                const double v = sweeps[j]->resolve(x).value;
                if (!have || v < p.representation) {
                    have = true;
                    p.representation = v;
                    p.argmin_y = f.spec().node_point(j)[0];
                }
            } catch (const NoCharacteristicFound&) {
            }
        }
        if (!have) throw NoCharacteristicFound({x, f[node], x, t}, {});
        report.probes[k] = p;
    });
    for (const auto& p : report.probes)
        report.max_residual = std::max(report.max_residual, std::abs(p.semigroup - p.representation));
    return report;
}

}  // namespace chj
