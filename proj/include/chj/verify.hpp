#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chj/flow.hpp"
#include "chj/geometry.hpp"
#include "chj/hamiltonian.hpp"
#include "chj/semigroup.hpp"

namespace chj {

enum class SubsolutionMode { AlmostEverywhere, Superdifferential };

const char* to_string(SubsolutionMode mode);

struct SubsolutionReport {
    SubsolutionMode mode = SubsolutionMode::AlmostEverywhere;
    /// max over tested nodes of H(x, p, phi(x)); negative is comfortably a pass.
    double worst_margin = 0.0;
    std::size_t witness_node = 0;
    Vec witness_x{};
    Vec witness_p{};
    double tolerance_used = 0.0;
    /// Largest one-sided difference quotient, a discrete Lipschitz constant.
    double lipschitz_bound = 0.0;
    std::size_t nodes_tested = 0;  // nodes that imposed a constraint
    bool passed = false;
};

/// C_H * h with C_H = 1 + max |H_p| over the central-gradient momenta.
double default_subsolution_tolerance(const HamiltonianModel& model, const GridFunction& phi);

/// AlmostEverywhere tests H at the central gradient of every node.
/// Superdifferential uses the one-sided quotient box [upper, lower] per
/// axis; when it is empty on some axis (upper > lower) the node is skipped,
/// otherwise H is tested at its corners. Superdifferential mode refuses
/// (InvalidArgument) models whose sampled momentum Hessian is not positive.
SubsolutionReport check_subsolution(const HamiltonianModel& model, const GridFunction& phi,
                                    SubsolutionMode mode = SubsolutionMode::AlmostEverywhere,
                                    std::optional<double> tol = {});

struct BatteryConfig {
    std::vector<double> horizons{0.1, 0.5, 1.0};
    std::size_t samples = 500;          // epigraph samples, boundary ones included
    double boundary_fraction = 0.2;     // share of samples started on u = phi(x)
    double p_cap = 3.0;
    double u_cap = 2.0;
    std::uint64_t seed = 1;
    double tol_constant = 1.0;          // tol = C (h + dt)
    std::optional<double> tol;          // replaces the mesh-scaled tolerance
    std::vector<double> quotient_times{1e-2, 5e-3};
    bool require_strictness = true;     // precondition of the gap-floor battery
    SubsolutionMode mode = SubsolutionMode::AlmostEverywhere;
    EvolutionConfig evolution;
    double flow_step = 1e-3;
    double ceiling = 1e8;
    unsigned workers = 0;
};

double battery_tolerance(const GridFunction& phi, const BatteryConfig& cfg);

/// One epigraph sample at one horizon.
struct SampleRecord {
    std::size_t sample = 0;
    bool boundary = false;
    ContactState base;
    double base_gap = 0.0;
    double horizon = 0.0;
    ContactState state;      // x unwrapped
    double final_gap = 0.0;  // u(t) - phi(x(t))
    /// Battery-specific slack: final_gap for the equivalence battery,
    /// final_gap - floor for the gap-floor battery, u(t) - T_t phi(x(t)) for
    /// the inclusion check.
    double margin = 0.0;
    bool complete = true;    // false when the curve blew up before the horizon
};

struct Verdict {
    std::string name;
    bool passed = false;
    double margin = 0.0;
    double tolerance = 0.0;
    std::string witness;
};

struct VerificationReport {
    std::string battery;
    bool passed = false;
    std::optional<bool> unanimous;
    std::vector<Verdict> verdicts;
    std::vector<std::pair<std::string, double>> margins;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<SampleRecord> samples;

    double margin(const std::string& name) const;
    const Verdict& verdict(const std::string& name) const;
};

/// Seeded epigraph samples: x a uniform node, p uniform in [-p_cap, p_cap]^d,
/// u = phi(x) + gap with gap uniform in [0, u_cap]. The boundary share has
/// gap = 0, half of them with p the central gradient of phi.
std::vector<ContactState> epigraph_samples(const GridFunction& phi, const BatteryConfig& cfg,
                                           std::vector<bool>* boundary = nullptr);

VerificationReport battery_subsolution(const HamiltonianModel& model, const GridFunction& phi,
                                       const BatteryConfig& cfg = {});
VerificationReport battery_theorem_A(const HamiltonianModel& model, const GridFunction& phi,
                                     const BatteryConfig& cfg = {});
VerificationReport battery_theorem_B(const HamiltonianModel& model, const GridFunction& phi,
                                     const BatteryConfig& cfg = {});
VerificationReport battery_corollary_C(const HamiltonianModel& model, const GridFunction& phi,
                                       const BatteryConfig& cfg = {});
VerificationReport check_lemma_flow_inclusion(const HamiltonianModel& model, const GridFunction& phi,
                                              const BatteryConfig& cfg = {});

/// Structured text (YAML).
void write_report(std::ostream& os, const VerificationReport& report);
/// One row per sample and horizon.
void write_samples_csv(std::ostream& os, const VerificationReport& report, int dim);

}  // namespace chj
