#include "chj/action.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "chj/geometry.hpp"
#include "chj/parallel.hpp"
#include "chj/text.hpp"

namespace chj {

namespace {

void require_1d(const HamiltonianModel& model) {
    if (model.dim() != 1) throw InvalidArgument("action functions are computed by shooting in dimension 1 only");
}

void validate(const ActionQuery& q, const ShootingConfig& cfg) {
    if (!(q.t > 0.0) || !std::isfinite(q.t)) throw InvalidArgument("action functions need t > 0");
    if (!std::isfinite(q.x0) || !std::isfinite(q.u0) || !std::isfinite(q.x))
        throw InvalidArgument("action query has a non-finite coordinate");
    if (cfg.scan_points < 2) throw InvalidArgument("shooting needs at least 2 scan points");
    if (!(cfg.p_shoot > 0.0)) throw InvalidArgument("p_shoot must be positive");
    if (!(cfg.step > 0.0)) throw InvalidArgument("shooting step must be positive");
    if (cfg.k_max < 0) throw InvalidArgument("k_max must be >= 0");
}

// w = u0 + t L(x, v, w) (backward) or w = u0 - t L(x0, v, w) (forward),
// optimized over the admissible windings. Picard converges since t*lambda < 1.
ActionResult small_time_step(const HamiltonianModel& model, const ActionQuery& q, const ShootingConfig& cfg) {
    const double P = model.period()[0];
    const bool backward = q.direction == ActionDirection::Backward;
    const double sign = backward ? 1.0 : -1.0;
    // The curve always runs from its time-0 point to its time-t point.
    const double from = backward ? q.x0 : q.x;
    const double to = backward ? q.x : q.x0;
    const double d = wrap_displacement(from, to, P);
    ActionResult best;
    bool have = false;
    for (int k = -cfg.k_max; k <= cfg.k_max; ++k) {
        const Vec v{(d + k * P) / q.t, 0.0};
        const Vec at{to, 0.0};
        double w = q.u0;
        for (int it = 0; it < 200; ++it) {
            const double next = q.u0 + sign * q.t * legendre(model, at, v, w).value;
            const bool done = std::abs(next - w) <= 1e-14 * std::max(1.0, std::abs(next));
            w = next;
            if (done) break;
        }
        const bool improves = !have || (backward ? w < best.value : w > best.value);
        if (improves) {
            have = true;
            best.value = w;
            best.attaining_p0 = legendre(model, at, v, w).argmax_p;
            best.winding = {k, 0};
        }
    }
    best.candidates_scanned = static_cast<std::size_t>(2 * cfg.k_max + 1);
    best.hits = best.candidates_scanned;
    best.small_time = true;
    return best;
}

}  // namespace

NoCharacteristicFound::NoCharacteristicFound(const ActionQuery& q, std::vector<SweepSample> sweep)
    : Error("no characteristic connects x0=" + format_double(q.x0) + " to x=" + format_double(q.x) +
            " in time t=" + format_double(q.t) + " within the momentum scan box"),
      sweep_(std::move(sweep)) {}

ShootingSweep::ShootingSweep(const HamiltonianModel& model, double x0, double u0, double t, ActionDirection direction,
                             const ShootingConfig& cfg)
    : model_(&model), base_{x0, u0, x0, t, direction}, cfg_(cfg) {
    require_1d(model);
    validate(base_, cfg);
    steps_ = static_cast<std::size_t>(std::ceil(t / cfg.step - 1e-9));
    steps_ = std::max<std::size_t>(steps_, 1);
    samples_.resize(cfg.scan_points);
    const double dp = 2.0 * cfg.p_shoot / static_cast<double>(cfg.scan_points - 1);
    parallel_for(cfg.scan_points, cfg.workers,
                 [&](std::size_t i) { samples_[i] = shoot(-cfg.p_shoot + dp * static_cast<double>(i)); });
}

SweepSample ShootingSweep::shoot(double p0) const {
    const TimeDirection dir =
        base_.direction == ActionDirection::Backward ? TimeDirection::Forward : TimeDirection::Backward;
    try {
        const ContactState end =
            advance(*model_, {{base_.x0, 0.0}, {p0, 0.0}, base_.u0}, base_.t, steps_, dir, cfg_.ceiling);
        return {p0, end.x[0], end.u, true};
    } catch (const BlowUp&) {
        return {p0, 0.0, 0.0, false};
    } catch (const EvaluationOverflow&) {
        return {p0, 0.0, 0.0, false};
    }
}

double ShootingSweep::target(double x, int k) const {
    const double P = model_->period()[0];
    return base_.x0 + wrap_displacement(base_.x0, x, P) + k * P;
}

bool ShootingSweep::better(double a, double b) const {
    return base_.direction == ActionDirection::Backward ? a < b : a > b;
}

std::vector<ShootingSweep::Bracket> ShootingSweep::brackets(double x) const {
    std::vector<Bracket> out;
    const std::size_t n = samples_.size();
    for (int k = -cfg_.k_max; k <= cfg_.k_max; ++k) {
        const double tgt = target(x, k);
        for (std::size_t i = 0; i < n; ++i) {
            if (!samples_[i].finite) continue;
            const double g0 = samples_[i].x_end - tgt;
            if (g0 == 0.0) {
                out.push_back({i, k, true});
                continue;
            }
            if (i + 1 < n && samples_[i + 1].finite) {
                const double g1 = samples_[i + 1].x_end - tgt;
                if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0)) out.push_back({i, k, false});
            }
        }
    }
    return out;
}

std::optional<double> ShootingSweep::estimate(double x) const {
    std::optional<double> best;
    for (const Bracket& b : brackets(x)) {
        const SweepSample& a = samples_[b.lo];
        double u = a.u_end;
        if (!b.exact) {
            const SweepSample& c = samples_[b.lo + 1];
            const double tgt = target(x, b.k);
            const double frac = (tgt - a.x_end) / (c.x_end - a.x_end);
            u = a.u_end + frac * (c.u_end - a.u_end);
        }
        if (!best || better(u, *best)) best = u;
    }
    return best;
}

ActionResult ShootingSweep::resolve(double x) const {
    const auto brs = brackets(x);
    struct Hit {
        bool ok = false;
        double p0 = 0.0;
        double value = 0.0;
        int k = 0;
    };
    std::vector<Hit> hits(brs.size());
    parallel_for(brs.size(), cfg_.workers, [&](std::size_t j) {
        const Bracket& b = brs[j];
        const double tgt = target(x, b.k);
        if (b.exact) {
            hits[j] = {true, samples_[b.lo].p0, samples_[b.lo].u_end, b.k};
            return;
        }
        double lo = samples_[b.lo].p0, hi = samples_[b.lo + 1].p0;
        const double g_lo = samples_[b.lo].x_end - tgt;
        SweepSample s = samples_[b.lo];
        double g = g_lo;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            s = shoot(mid);
            if (!s.finite) return;
            g = s.x_end - tgt;
            if (std::abs(g) <= cfg_.hit_tol) break;
            if ((g < 0.0) == (g_lo < 0.0))
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 4e-16 * std::max(1.0, std::abs(mid))) break;
        }
        if (std::abs(g) <= 100.0 * cfg_.hit_tol) hits[j] = {true, s.p0, s.u_end, b.k};
    });

    const Hit* best = nullptr;
    std::size_t count = 0;
    for (const Hit& h : hits) {
        if (!h.ok) continue;
        ++count;
        if (!best || better(h.value, best->value)) best = &h;
    }
    if (!best) {
        ActionQuery q = base_;
        q.x = x;
        throw NoCharacteristicFound(q, samples_);
    }
    // Lowest p0 among hits tied with the optimum.
    const double tie = 1e-12 * std::max(1.0, std::abs(best->value));
    for (const Hit& h : hits)
        if (h.ok && std::abs(h.value - best->value) <= tie && h.p0 < best->p0) best = &h;

    ActionResult r;
    r.value = best->value;
    r.attaining_p0 = {best->p0, 0.0};
    r.winding = {best->k, 0};
    r.candidates_scanned = samples_.size();
    r.hits = count;
    return r;
}

ActionResult action(const HamiltonianModel& model, const ActionQuery& q, const ShootingConfig& cfg) {
    require_1d(model);
    validate(q, cfg);
    if (q.t < cfg.t_min) return small_time_step(model, q, cfg);
    return ShootingSweep(model, q.x0, q.u0, q.t, q.direction, cfg).resolve(q.x);
}

ActionResult h_backward(const HamiltonianModel& model, const ActionQuery& q, const ShootingConfig& cfg) {
    ActionQuery b = q;
    b.direction = ActionDirection::Backward;
    return action(model, b, cfg);
}

ActionResult h_forward(const HamiltonianModel& model, const ActionQuery& q, const ShootingConfig& cfg) {
    ActionQuery f = q;
    f.direction = ActionDirection::Forward;
    return action(model, f, cfg);
}

double check_equivalence(const HamiltonianModel& model, double x0, double u0, double x, double t,
                         const ShootingConfig& cfg) {
    const double u = h_backward(model, {x0, u0, x, t}, cfg).value;
    const double back = h_forward(model, {x, u, x0, t}, cfg).value;
    return std::abs(back - u0);
}

LipschitzEstimate lipschitz_probe(const HamiltonianModel& model, double x0, double u0, double x_lo, double x_hi,
                                  double t_lo, double t_hi, int n, const ShootingConfig& cfg) {
    if (n < 2) throw InvalidArgument("lipschitz probe needs n >= 2");
    if (!(x_hi > x_lo) || !(t_hi > t_lo) || !(t_lo > 0.0)) throw InvalidArgument("empty lipschitz probe box");
    const double dx = (x_hi - x_lo) / (n - 1), dt = (t_hi - t_lo) / (n - 1);
    std::vector<double> h(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j) {
        const double t = t_lo + j * dt;
        if (t < cfg.t_min) {
            for (int i = 0; i < n; ++i) h[j * n + i] = h_backward(model, {x0, u0, x_lo + i * dx, t}, cfg).value;
            continue;
        }
        ShootingSweep sweep(model, x0, u0, t, ActionDirection::Backward, cfg);
        for (int i = 0; i < n; ++i) h[j * n + i] = sweep.resolve(x_lo + i * dx).value;
    }
    LipschitzEstimate est;
    est.samples = h.size();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i + 1 < n) est.slope_x = std::max(est.slope_x, std::abs(h[j * n + i + 1] - h[j * n + i]) / dx);
            if (j + 1 < n) est.slope_t = std::max(est.slope_t, std::abs(h[(j + 1) * n + i] - h[j * n + i]) / dt);
        }
    return est;
}

void write_sweep_csv(std::ostream& os, const ShootingSweep& sweep, const ActionResult& best) {
    os << "p0,x_t,u_t\n";
    for (const auto& s : sweep.samples()) {
        if (!s.finite) {
            os << format_double(s.p0) << ",nan,nan\n";
            continue;
        }
        os << format_double(s.p0) << ',' << format_double(s.x_end) << ',' << format_double(s.u_end) << '\n';
    }
    os << "\nvalue,attaining_p0,winding,hits,candidates_scanned\n";
    os << format_double(best.value) << ',' << format_double(best.attaining_p0[0]) << ',' << best.winding[0] << ','
       << best.hits << ',' << best.candidates_scanned << '\n';
}

}  // namespace chj
