#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "chj/hamiltonian.hpp"
#include "chj/types.hpp"

namespace chj {

/// A point (x, p, u) of the contact phase space T*T^d x R.
struct ContactState {
    Vec x{};
    Vec p{};
    double u = 0.0;
};

/// Time-stamped samples of an integral curve. x is stored wrapped into
/// [0, period); windings[k] counts the periods crossed since the start, so
/// the unwrapped position is x + period * windings.
struct Trajectory {
    std::vector<double> times;
    std::vector<ContactState> states;
    std::vector<Winding> windings;
    std::vector<double> energies;

    std::size_t size() const { return times.size(); }
    const ContactState& back() const { return states.back(); }
    Vec unwrapped_x(std::size_t k, const Vec& period) const;
};

enum class TimeDirection { Forward, Backward };

struct StepControl {
    double h0 = 1e-3;
    bool adaptive = false;       // PI control on the local energy-identity defect
    double energy_tol = 1e-9;    // adaptive mode only
    double h_min = 1e-12;
    double h_max = 0.1;
    double ceiling = 1e8;        // |p| or |u| above this is reported as blow-up
    std::size_t max_steps = 50'000'000;
    TimeDirection direction = TimeDirection::Forward;
};

/// Right-hand side of the contact characteristic system.
struct FieldValue {
    Vec dx{};
    Vec dp{};
    double du = 0.0;
};

/// dx = H_p, dp = -H_x - H_u p, du = p.H_p - H.
FieldValue vector_field(const HamiltonianModel& model, const ContactState& s);

/// The trajectory left the region |p|, |u| <= ceiling before the horizon:
/// a numerical signal that the flow is not complete along this curve.
class BlowUp : public Error {
public:
    BlowUp(double t_detect, Trajectory partial);
    double t_detect() const { return t_detect_; }
    const Trajectory& partial() const { return partial_; }

private:
    double t_detect_;
    Trajectory partial_;
};

/// Classic RK4 from s0 over elapsed time T >= 0. Fixed step h0 by default
/// (the last step is shortened to land on T). With direction Backward the
/// field is negated, i.e. the curve is followed into the past.
Trajectory integrate(const HamiltonianModel& model, const ContactState& s0, double T, const StepControl& step = {});

/// Fixed-step RK4 without recording samples; x is not wrapped. Used by the
/// shooting sweeps. Throws BlowUp past the ceiling.
ContactState advance(const HamiltonianModel& model, const ContactState& s0, double T, std::size_t steps,
                     TimeDirection direction = TimeDirection::Forward, double ceiling = 1e8);

/// max over interior samples of |dH/dt + H_u H|, dH/dt from centered
/// (three-point, non-uniform aware) differences of recomputed energies.
double energy_residual(const HamiltonianModel& model, const Trajectory& traj);

struct EnsembleMember {
    Trajectory trajectory;
    std::optional<double> blowup_time;
};

/// Integrates every initial state; output order follows input order.
std::vector<EnsembleMember> integrate_ensemble(const HamiltonianModel& model, std::span<const ContactState> initial,
                                               double T, const StepControl& step, unsigned workers = 0);

/// Columns t, x1..xd, p1..pd, u, H, winding1..windingd with a header row.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int dim);

}  // namespace chj
