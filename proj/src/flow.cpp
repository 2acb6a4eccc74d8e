#include "chj/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "chj/parallel.hpp"
#include "chj/text.hpp"

namespace chj {

Vec Trajectory::unwrapped_x(std::size_t k, const Vec& period) const {
    const Vec& x = states[k].x;
    const Winding& w = windings[k];
    return {x[0] + period[0] * static_cast<double>(w[0]), x[1] + period[1] * static_cast<double>(w[1])};
}

FieldValue vector_field(const HamiltonianModel& model, const ContactState& s) {
    const JetValue j = model.eval(s.x, s.p, s.u);
    FieldValue f;
    f.dx = j.d_p;
    f.dp = {-j.d_x[0] - j.d_u * s.p[0], -j.d_x[1] - j.d_u * s.p[1]};
    f.du = dot(s.p, j.d_p) - j.value;
    if (model.dim() == 1) {
        f.dx[1] = 0.0;
        f.dp[1] = 0.0;
    }
    return f;
}

BlowUp::BlowUp(double t_detect, Trajectory partial)
    : Error("trajectory blew up at t=" + format_double(t_detect)), t_detect_(t_detect), partial_(std::move(partial)) {}

namespace {

ContactState axpy(const ContactState& s, double h, const FieldValue& f) {
    return {s.x + h * f.dx, s.p + h * f.dp, s.u + h * f.du};
}

ContactState rk4_step(const HamiltonianModel& model, const ContactState& s, double h, double sign) {
    auto field = [&](const ContactState& y) {
        FieldValue f = vector_field(model, y);
        if (sign < 0) f = {-1.0 * f.dx, -1.0 * f.dp, -f.du};
        return f;
    };
    const FieldValue k1 = field(s);
    const FieldValue k2 = field(axpy(s, 0.5 * h, k1));
    const FieldValue k3 = field(axpy(s, 0.5 * h, k2));
    const FieldValue k4 = field(axpy(s, h, k3));
    ContactState r;
    r.x = s.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    r.p = s.p + (h / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
    r.u = s.u + (h / 6.0) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    return r;
}

bool escaped(const ContactState& s, double ceiling) {
    if (!all_finite(s.p) || !std::isfinite(s.u) || !all_finite(s.x)) return true;
    return norm(s.p) > ceiling || std::abs(s.u) > ceiling;
}

// Wraps x into [0, period) and moves whole periods into the winding counter.
void rewrap(ContactState& s, Winding& w, const HamiltonianModel& model) {
    for (int a = 0; a < model.dim(); ++a) {
        const double P = model.period()[a];
        const double k = std::floor(s.x[a] / P);
        if (k != 0.0) {
            s.x[a] -= k * P;
            w[a] += static_cast<long>(k);
        }
        if (s.x[a] >= P) {
            s.x[a] -= P;
            w[a] += 1;
        }
        if (s.x[a] < 0.0) s.x[a] = 0.0;
    }
}

}  // namespace

Trajectory integrate(const HamiltonianModel& model, const ContactState& s0, double T, const StepControl& step) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("integration horizon must be finite and >= 0");
    if (!(step.h0 > 0.0)) throw InvalidArgument("step size must be positive");
    const double sign = step.direction == TimeDirection::Forward ? 1.0 : -1.0;

    Trajectory tr;
    ContactState s = s0;
    Winding w{};
    rewrap(s, w, model);
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.states.push_back(s);
        tr.windings.push_back(w);
        tr.energies.push_back(model.value(s.x, s.p, s.u));
    };
    record(0.0);

    double t = 0.0;
    double h = step.adaptive ? std::min(step.h0, step.h_max) : step.h0;
    double prev_err = step.energy_tol;
    std::size_t count = 0;
    while (t < T) {
        if (++count > step.max_steps) throw Error("step limit exceeded before reaching the horizon");
        double hs = std::min(h, T - t);
        // Avoid a sliver final step from accumulated rounding.
        if (T - t - hs < 1e-12 * std::max(1.0, T)) hs = T - t;
        ContactState next = rk4_step(model, s, hs, sign);
        if (escaped(next, step.ceiling)) throw BlowUp(t + hs, std::move(tr));

        if (step.adaptive) {
            const JetValue j0 = model.eval(s.x, s.p, s.u);
            const JetValue j1 = model.eval(next.x, next.p, next.u);
            // Trapezoid check of dH/dt = -H_u H in the direction of travel.
            const double defect =
                std::abs(j1.value - j0.value + sign * 0.5 * hs * (j0.d_u * j0.value + j1.d_u * j1.value)) / hs;
            if (defect > step.energy_tol && hs > step.h_min) {
                h = std::max(0.5 * hs, step.h_min);
                continue;
            }
            const double err = std::max(defect, 1e-300);
            const double fac = 0.9 * std::pow(step.energy_tol / err, 0.35) * std::pow(prev_err / err, 0.2);
            h = std::clamp(hs * std::clamp(fac, 0.2, 2.0), step.h_min, step.h_max);
            prev_err = std::max(err, 1e-4 * step.energy_tol);
        }
        s = next;
        rewrap(s, w, model);
        t = (hs == T - t) ? T : t + hs;
        record(t);
    }
    return tr;
}

ContactState advance(const HamiltonianModel& model, const ContactState& s0, double T, std::size_t steps,
                     TimeDirection direction, double ceiling) {
    if (steps == 0 || T == 0.0) return s0;
    const double sign = direction == TimeDirection::Forward ? 1.0 : -1.0;
    const double h = T / static_cast<double>(steps);
    ContactState s = s0;
    for (std::size_t k = 0; k < steps; ++k) {
        s = rk4_step(model, s, h, sign);
        if (escaped(s, ceiling)) {
            Trajectory partial;
            throw BlowUp(h * static_cast<double>(k + 1), std::move(partial));
        }
    }
    return s;
}

double energy_residual(const HamiltonianModel& model, const Trajectory& traj) {
    if (traj.size() < 3) throw InvalidArgument("energy residual needs at least 3 samples");
    const std::size_t n = traj.size();
    std::vector<JetValue> jets(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& s = traj.states[k];
        jets[k] = model.eval(s.x, s.p, s.u);
    }
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double h1 = traj.times[k] - traj.times[k - 1];
        const double h2 = traj.times[k + 1] - traj.times[k];
        const double dhdt = -h2 / (h1 * (h1 + h2)) * jets[k - 1].value + (h2 - h1) / (h1 * h2) * jets[k].value +
                            h1 / (h2 * (h1 + h2)) * jets[k + 1].value;
        worst = std::max(worst, std::abs(dhdt + jets[k].d_u * jets[k].value));
    }
    return worst;
}

std::vector<EnsembleMember> integrate_ensemble(const HamiltonianModel& model, std::span<const ContactState> initial,
                                               double T, const StepControl& step, unsigned workers) {
    std::vector<EnsembleMember> out(initial.size());
    parallel_for(initial.size(), workers, [&](std::size_t i) {
        try {
            out[i].trajectory = integrate(model, initial[i], T, step);
        } catch (const BlowUp& b) {
            out[i].trajectory = b.partial();
            out[i].blowup_time = b.t_detect();
        }
    });
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int dim) {
    os << 't';
    for (int a = 1; a <= dim; ++a) os << ",x" << a;
    for (int a = 1; a <= dim; ++a) os << ",p" << a;
    os << ",u,H";
    for (int a = 1; a <= dim; ++a) os << ",winding" << a;
    os << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& s = traj.states[k];
        os << format_double(traj.times[k]);
        for (int a = 0; a < dim; ++a) os << ',' << format_double(s.x[a]);
        for (int a = 0; a < dim; ++a) os << ',' << format_double(s.p[a]);
        os << ',' << format_double(s.u) << ',' << format_double(traj.energies[k]);
        for (int a = 0; a < dim; ++a) os << ',' << traj.windings[k][a];
        os << '\n';
    }
}

}  // namespace chj
