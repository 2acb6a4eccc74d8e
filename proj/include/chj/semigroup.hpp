#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "chj/action.hpp"
#include "chj/geometry.hpp"
#include "chj/hamiltonian.hpp"

namespace chj {

struct EvolutionConfig {
    double dt = 1e-3;
    double v_max = 8.0;            // velocities searched on [-v_max, v_max]^d
    int v_res = 129;               // velocities per axis
    double picard_tol = 1e-12;     // relative, |w_new - w| <= tol * max(1, |w|)
    int picard_max = 50;
    int snapshot_every = 0;        // steps between snapshots; 0 disables
    bool refine = true;            // golden-section polish of the discrete argmin
    int golden_iterations = 25;
    double monotone_tol = 1e-9;
    unsigned workers = 0;
    LegendreOptions legendre;      // used for Expression models only
};

/// Checks dt*lambda < 1 and v_max*dt < period/2; throws InvalidArgument.
void validate_evolution(const HamiltonianModel& model, const TorusSpec& spec, const EvolutionConfig& cfg);

struct EvolutionResult {
    GridFunction final;
    std::vector<std::pair<double, GridFunction>> snapshots;
    int picard_iters = 0;   // largest per-node iteration count over all steps
    bool monotone_flag = false;  // min(final - initial) >= -monotone_tol
    double time = 0.0;
    std::size_t steps = 0;
};

class PicardDivergence : public Error {
public:
    PicardDivergence(std::size_t step, std::size_t node, int iterations);
    std::size_t step() const { return step_; }
    std::size_t node() const { return node_; }

private:
    std::size_t step_;
    std::size_t node_;
};

/// One implicit step of length dt. At every node w solves
/// w = min_v { f(x - v dt) + dt L(x, v, w) } (Backward) or
/// w = max_v { f(x + v dt) - dt L(x, v, w) } (Forward),
/// with f interpolated multilinearly and L taken at the arrival node.
/// iterations, when given, receives the largest per-node Picard count.
GridFunction step_backward(const HamiltonianModel& model, const GridFunction& f, const EvolutionConfig& cfg,
                           int* iterations = nullptr);
GridFunction step_forward(const HamiltonianModel& model, const GridFunction& f, const EvolutionConfig& cfg,
                          int* iterations = nullptr);

/// ceil(t/dt) steps, the last one shortened so the result lands on t.
EvolutionResult evolve_backward(const HamiltonianModel& model, const GridFunction& f, double t,
                                const EvolutionConfig& cfg = {});
EvolutionResult evolve_forward(const HamiltonianModel& model, const GridFunction& f, double t,
                               const EvolutionConfig& cfg = {});

struct RepresentationProbe {
    double x = 0.0;
    double semigroup = 0.0;       // evolve_backward at x
    double representation = 0.0;  // min over grid y of h_{y, f(y)}(x, t)
    double argmin_y = 0.0;
};

struct RepresentationReport {
    double max_residual = 0.0;
    std::vector<RepresentationProbe> probes;
};

/// Compares evolve_backward against min over grid nodes y of h_{y,f(y)}(x,t)
/// at `probes` evenly spaced nodes. d = 1 only.
RepresentationReport compare_representation(const HamiltonianModel& model, const GridFunction& f, double t,
                                            std::size_t probes, const EvolutionConfig& cfg = {},
                                            const ShootingConfig& shooting = {});

}  // namespace chj
