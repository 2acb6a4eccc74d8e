#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chj/expression.hpp"
#include "chj/geometry.hpp"
#include "chj/types.hpp"

namespace chj {

using Mat2 = std::array<Vec, kMaxDim>;

/// H and its exact first derivatives at one point (x, p, u).
struct JetValue {
    double value = 0.0;
    Vec d_x{};
    Vec d_p{};
    double d_u = 0.0;
};

/// Value dependence g(u) of the potential V(x, u) = V0(x) + g(u).
struct Coupling {
    enum class Kind { Linear, Sinusoidal };
    Kind kind = Kind::Linear;
    double coef = 0.0;  // lambda0 for Linear, epsilon for Sinusoidal

    static Coupling linear(double lambda0) { return {Kind::Linear, lambda0}; }
    static Coupling sinusoidal(double eps) { return {Kind::Sinusoidal, eps}; }

    double value(double u) const;
    double slope(double u) const;
    /// sup over u of |g'(u)|.
    double lipschitz() const { return std::abs(coef); }
};

/// Symmetric positive-definite inverse-mass field A(x): either a constant
/// matrix or per-entry grid functions (a11 for d=1; a11, a12, a22 for d=2).
class InverseMass {
public:
    InverseMass() = default;
    static InverseMass constant(int dim, const Mat2& a);
    static InverseMass scalar(double a) { return constant(1, {Vec{a, 0.0}, Vec{0.0, 0.0}}); }
    static InverseMass sampled(int dim, std::vector<GridFunction> entries);

    int dim() const { return dim_; }
    bool is_constant() const { return entries_.empty(); }
    Mat2 at(const Vec& x) const;
    /// Partial derivatives dA/dx_k for k < dim.
    std::array<Mat2, kMaxDim> gradient(const Vec& x) const;

    /// Smallest eigenvalue over the constant matrix or every grid node.
    double min_eigenvalue() const;

private:
    int dim_ = 1;
    Mat2 constant_{Vec{1.0, 0.0}, Vec{0.0, 1.0}};
    std::vector<GridFunction> entries_;
};

/// H(x, p, u) = 1/2 <A(x) p, p> + V0(x) + g(u).
struct QuadraticContact {
    int dim = 1;
    InverseMass inverse_mass = InverseMass::scalar(1.0);
    Expression potential;  // V0, position variables only; empty means zero
    Coupling coupling;
};

/// An evaluatable contact Hamiltonian with exact first derivatives.
class HamiltonianModel {
public:
    enum class Kind { QuadraticContact, Expression };

    /// lambda defaults to the coupling's Lipschitz constant (1.0 when that is zero).
    static HamiltonianModel quadratic_contact(QuadraticContact q, std::optional<double> lambda = {},
                                              Vec period = {1.0, 1.0});
    static HamiltonianModel from_expression(Expression e, int dim, double lambda, Vec period = {1.0, 1.0});

    Kind kind() const { return std::holds_alternative<QuadraticContact>(body_) ? Kind::QuadraticContact : Kind::Expression; }
    int dim() const { return dim_; }
    double lambda_bound() const { return lambda_; }
    const Vec& period() const { return period_; }

    const QuadraticContact* quadratic() const { return std::get_if<QuadraticContact>(&body_); }
    const Expression* expression() const { return std::get_if<Expression>(&body_); }

    JetValue eval(const Vec& x, const Vec& p, double u) const;
    double value(const Vec& x, const Vec& p, double u) const;

    /// Short human-readable description for reports.
    std::string describe() const;

private:
    HamiltonianModel(int dim, double lambda, Vec period, std::variant<QuadraticContact, Expression> body);

    int dim_;
    double lambda_;
    Vec period_;
    std::variant<QuadraticContact, Expression> body_;
};

/// Parses an Expression model. The dimension is inferred from the highest
/// index referenced (x2/p2 give d=2); lambda is the declared |dH/du| bound.
HamiltonianModel parse_hamiltonian(std::string_view text, double lambda = 1.0, Vec period = {1.0, 1.0});

/// sup_p (p.v - H(x,p,u)) and the maximizing momentum.
struct LagrangianValue {
    double value = 0.0;
    Vec argmax_p{};
    double residual = 0.0;  // |v - dH/dp(argmax_p)|
};

struct LegendreOptions {
    double p_max = 10.0;         // half-width of the multi-start box
    bool force_numeric = false;  // ignore the closed form of QuadraticContact
    int max_iterations = 100;
    double gradient_tol = 1e-11;
};

class LegendreNonConvergence : public Error {
public:
    LegendreNonConvergence(Vec best_p, double residual);
    const Vec& best_p() const { return best_p_; }
    double residual() const { return residual_; }

private:
    Vec best_p_;
    double residual_;
};

LagrangianValue legendre(const HamiltonianModel& model, const Vec& x, const Vec& v, double u,
                         const LegendreOptions& opts = {});

/// Newton ascent started at p_guess; falls back to the multi-start search
/// when the warm start does not converge. Used by the semigroup sweeps.
LagrangianValue legendre_from(const HamiltonianModel& model, const Vec& x, const Vec& v, double u,
                              const Vec& p_guess, const LegendreOptions& opts = {});

/// Hessian d2H/dp2 by central differences of the exact jets.
Mat2 momentum_hessian(const HamiltonianModel& model, const Vec& x, const Vec& p, double u);

/// Smallest eigenvalue of a symmetric matrix restricted to the leading dim block.
double min_symmetric_eigenvalue(const Mat2& m, int dim);

struct ContactPoint {
    Vec x{};
    Vec p{};
    double u = 0.0;
};

struct SamplingPlan {
    double p_max = 10.0;
    double u_max = 10.0;
    int x_nodes = 8;    // per axis
    int p_points = 9;   // per axis, endpoints included
    int u_points = 9;   // endpoints included
    /// Completeness envelope A(h) = alpha*|h| + beta; skipped when unset.
    std::optional<std::array<double, 2>> envelope;
};

/// Sampled verdict on one assumption. Never a proof: the statement says
/// "no violation found on N samples" when nothing was found.
struct AssumptionCheck {
    std::string name;
    bool passed = true;
    double measure = 0.0;    // min eigenvalue, min growth step, max |dH/du|, max violation
    double threshold = 0.0;  // the bound measure was compared against
    ContactPoint witness;
    std::size_t samples = 0;
    std::string statement;
};

struct AssumptionReport {
    AssumptionCheck positive_definite;  // d2H/dp2 > 0
    AssumptionCheck superlinear;        // growth of H/|p| along rays
    AssumptionCheck lipschitz_in_u;     // |dH/du| <= lambda
    std::optional<AssumptionCheck> completeness;  // envelope condition of the flow
    SamplingPlan plan;

    bool all_passed() const;
};

AssumptionReport check_assumptions(const HamiltonianModel& model, const SamplingPlan& plan = {});

}  // namespace chj
