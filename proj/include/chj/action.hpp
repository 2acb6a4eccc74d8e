#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "chj/flow.hpp"
#include "chj/hamiltonian.hpp"

namespace chj {

/// Backward: h_{x0,u0}(x,t), the least u(t) over characteristics with
/// x(0)=x0, u(0)=u0, x(t)=x. Forward: h^{x0,u0}(x,t), the largest u(0) over
/// characteristics with x(0)=x, x(t)=x0, u(t)=u0.
enum class ActionDirection { Backward, Forward };

struct ActionQuery {
    double x0 = 0.0;
    double u0 = 0.0;
    double x = 0.0;
    double t = 1.0;
    ActionDirection direction = ActionDirection::Backward;
};

struct ShootingConfig {
    double p_shoot = 20.0;        // momenta scanned on [-p_shoot, p_shoot]
    std::size_t scan_points = 512;
    int k_max = 3;                // windings tried: |k| <= k_max
    double hit_tol = 1e-10;       // bisection target for |x(t) - x|
    double step = 5e-3;           // RK4 step of the sweep integrations
    double t_min = 1e-2;          // below this, one implicit Lax-Oleinik step
    double ceiling = 1e8;
    unsigned workers = 0;
};

struct ActionResult {
    double value = 0.0;
    Vec attaining_p0{};
    /// Whole periods on top of the minimal displacement from x0 to x.
    Winding winding{};
    std::size_t candidates_scanned = 0;
    std::size_t hits = 0;
    /// Set when t < t_min routed the query through the one-step formula.
    bool small_time = false;
};

/// One sampled endpoint of a sweep. For Backward sweeps this is
/// (x(t), u(t)) of the curve leaving (x0, p0, u0); for Forward sweeps it is
/// (x(0), u(0)) of the curve arriving at (x0, p0, u0). x is unwrapped.
struct SweepSample {
    double p0 = 0.0;
    double x_end = 0.0;
    double u_end = 0.0;
    bool finite = true;  // false when the curve blew up
};

class ShootingSweep;

class NoCharacteristicFound : public Error {
public:
    NoCharacteristicFound(const ActionQuery& q, std::vector<SweepSample> sweep);
    const std::vector<SweepSample>& sweep() const { return sweep_; }

private:
    std::vector<SweepSample> sweep_;
};

/// Endpoints of the characteristics from (x0, p0, u0) for a scan of p0.
/// Independent of the target x, so one sweep answers many targets.
class ShootingSweep {
public:
    ShootingSweep(const HamiltonianModel& model, double x0, double u0, double t, ActionDirection direction,
                  const ShootingConfig& cfg = {});

    const std::vector<SweepSample>& samples() const { return samples_; }

    /// Brackets every crossing of x (all admissible windings), bisects each
    /// to the hit tolerance, returns the optimal hit.
    ActionResult resolve(double x) const;

    /// Optimum over brackets with the endpoint value linearly interpolated
    /// inside each bracket. No bisection; used for screening.
    std::optional<double> estimate(double x) const;

private:
    struct Bracket {
        std::size_t lo;  // sample index; the crossing lies in [lo, lo + 1]
        int k;
        bool exact;      // samples_[lo] itself hits the target
    };
    std::vector<Bracket> brackets(double x) const;
    double target(double x, int k) const;
    bool better(double a, double b) const;
    SweepSample shoot(double p0) const;

    const HamiltonianModel* model_;
    ActionQuery base_;
    ShootingConfig cfg_;
    std::size_t steps_;
    std::vector<SweepSample> samples_;
};

ActionResult h_backward(const HamiltonianModel& model, const ActionQuery& q, const ShootingConfig& cfg = {});
ActionResult h_forward(const HamiltonianModel& model, const ActionQuery& q, const ShootingConfig& cfg = {});
ActionResult action(const HamiltonianModel& model, const ActionQuery& q, const ShootingConfig& cfg = {});

/// u = h_{x0,u0}(x,t), then |h^{x,u}(x0,t) - u0|.
double check_equivalence(const HamiltonianModel& model, double x0, double u0, double x, double t,
                         const ShootingConfig& cfg = {});

/// Largest finite-difference slopes of h_{x0,u0} in x and in t over the box
/// [x_lo, x_hi] x [t_lo, t_hi] sampled n x n.
struct LipschitzEstimate {
    double slope_x = 0.0;
    double slope_t = 0.0;
    std::size_t samples = 0;
};
LipschitzEstimate lipschitz_probe(const HamiltonianModel& model, double x0, double u0, double x_lo, double x_hi,
                                  double t_lo, double t_hi, int n, const ShootingConfig& cfg = {});

/// Sweep rows `p0,x_t,u_t`, a blank line, then the optimum block.
void write_sweep_csv(std::ostream& os, const ShootingSweep& sweep, const ActionResult& best);

}  // namespace chj
