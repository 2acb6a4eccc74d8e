#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "chj/action.hpp"
#include "chj/flow.hpp"
#include "chj/hamiltonian.hpp"
#include "chj/semigroup.hpp"
#include "chj/verify.hpp"

namespace chj {

/// Configuration problem; line and column are 1-based, 0 when unknown.
class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& message, int line = 0, int column = 0);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

struct ModelBlock {
    std::string kind = "quadratic";  // quadratic | expression
    std::string expression;
    int dim = 0;                     // 0: inferred
    std::vector<double> inverse_mass{1.0};     // scalar or a11, a12, a22
    std::vector<std::string> inverse_mass_files;
    std::string potential;
    std::string coupling = "linear"; // linear | sin
    double coupling_coef = 0.0;
    std::optional<double> lambda;
    double p_max = 10.0;
    double u_max = 10.0;
    int x_nodes = 8;
    std::optional<double> alpha;
    std::optional<double> beta;
};

struct GridBlock {
    int dim = 0;  // 0: the model's dimension
    double period = 1.0;
    std::array<int, 2> resolution{256, 256};
};

struct EvolutionBlock {
    EvolutionConfig config;
    double t = 1.0;
    std::string direction = "backward";
};

struct FlowBlock {
    std::vector<std::vector<double>> states{{0.0, 1.0, 0.0}};
    double T = 1.0;
    double h = 1e-3;
    bool adaptive = false;
    double energy_tol = 1e-9;
    double ceiling = 1e8;
};

struct ActionBlock {
    ActionQuery query{0.0, 0.0, 0.5, 1.0, ActionDirection::Backward};
    ShootingConfig shooting;
};

struct LegendreBlock {
    std::vector<double> x{0.0};
    double u = 0.0;
    double v_max = 3.0;
    int count = 61;
};

struct InitialBlock {
    std::string expression;
    std::string file;
};

struct RunConfig {
    bool has_model = false;
    ModelBlock model;
    GridBlock grid;
    EvolutionBlock evolution;
    std::string battery = "theorem-a";
    BatteryConfig battery_config;
    std::string out = "chj_out";
    FlowBlock flow;
    ActionBlock action;
    LegendreBlock legendre;
    InitialBlock initial;
};

/// Parses the YAML text; unknown keys and type mismatches are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// The effective configuration as YAML, every field present.
std::string echo_config(const RunConfig& cfg);

HamiltonianModel build_model(const RunConfig& cfg);
TorusSpec build_grid(const RunConfig& cfg, int model_dim);
/// Initial data from an expression in x1 (x2) sampled on the grid, or a grid file.
GridFunction build_initial(const RunConfig& cfg, const TorusSpec& spec);
SamplingPlan build_sampling_plan(const RunConfig& cfg);

SubsolutionMode parse_mode(const std::string& s);

}  // namespace chj
