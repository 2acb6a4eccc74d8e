#include "chj/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "chj/text.hpp"

namespace chj {

double Coupling::value(double u) const { return kind == Kind::Linear ? coef * u : coef * std::sin(u); }
double Coupling::slope(double u) const { return kind == Kind::Linear ? coef : coef * std::cos(u); }

double min_symmetric_eigenvalue(const Mat2& m, int dim) {
    if (dim == 1) return m[0][0];
    const double mean = 0.5 * (m[0][0] + m[1][1]);
    const double half = 0.5 * (m[0][0] - m[1][1]);
    const double off = 0.5 * (m[0][1] + m[1][0]);
    return mean - std::hypot(half, off);
}

InverseMass InverseMass::constant(int dim, const Mat2& a) {
    if (dim != 1 && dim != 2) throw InvalidArgument("inverse mass dimension must be 1 or 2");
    InverseMass m;
    m.dim_ = dim;
    m.constant_ = a;
    if (dim == 1) m.constant_ = {Vec{a[0][0], 0.0}, Vec{0.0, 0.0}};
    if (dim == 2 && a[0][1] != a[1][0]) throw InvalidArgument("inverse mass matrix must be symmetric");
    if (!(m.min_eigenvalue() >= 1e-10)) throw InvalidArgument("inverse mass matrix must be positive definite");
    return m;
}

InverseMass InverseMass::sampled(int dim, std::vector<GridFunction> entries) {
    const std::size_t want = dim == 1 ? 1 : 3;
    if (entries.size() != want)
        throw InvalidArgument("sampled inverse mass needs " + std::to_string(want) + " grid functions");
    for (const auto& e : entries)
        if (e.spec().dim() != dim) throw InvalidArgument("inverse mass grid has the wrong dimension");
    InverseMass m;
    m.dim_ = dim;
    m.entries_ = std::move(entries);
    if (!(m.min_eigenvalue() >= 1e-10))
        throw InvalidArgument("sampled inverse mass is not positive definite at some node");
    return m;
}

Mat2 InverseMass::at(const Vec& x) const {
    if (is_constant()) return constant_;
    if (dim_ == 1) return {Vec{interpolate(entries_[0], x), 0.0}, Vec{0.0, 0.0}};
    const double a11 = interpolate(entries_[0], x);
    const double a12 = interpolate(entries_[1], x);
    const double a22 = interpolate(entries_[2], x);
    return {Vec{a11, a12}, Vec{a12, a22}};
}

std::array<Mat2, kMaxDim> InverseMass::gradient(const Vec& x) const {
    std::array<Mat2, kMaxDim> g{};
    if (is_constant()) return g;
    if (dim_ == 1) {
        g[0][0][0] = interpolate_with_gradient(entries_[0], x).gradient[0];
        return g;
    }
    const auto a11 = interpolate_with_gradient(entries_[0], x).gradient;
    const auto a12 = interpolate_with_gradient(entries_[1], x).gradient;
    const auto a22 = interpolate_with_gradient(entries_[2], x).gradient;
    for (int k = 0; k < 2; ++k) g[k] = {Vec{a11[k], a12[k]}, Vec{a12[k], a22[k]}};
    return g;
}

double InverseMass::min_eigenvalue() const {
    if (is_constant()) return min_symmetric_eigenvalue(constant_, dim_);
    double lo = std::numeric_limits<double>::infinity();
    const auto n = entries_[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        Mat2 m{};
        if (dim_ == 1) {
            m[0][0] = entries_[0][i];
        } else {
            m = {Vec{entries_[0][i], entries_[1][i]}, Vec{entries_[1][i], entries_[2][i]}};
        }
        lo = std::min(lo, min_symmetric_eigenvalue(m, dim_));
    }
    return lo;
}

HamiltonianModel::HamiltonianModel(int dim, double lambda, Vec period,
                                   std::variant<QuadraticContact, Expression> body)
    : dim_(dim), lambda_(lambda), period_(period), body_(std::move(body)) {
    if (dim != 1 && dim != 2) throw InvalidArgument("Hamiltonian dimension must be 1 or 2");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda bound must be positive");
    for (int a = 0; a < dim; ++a)
        if (!(period[a] > 0.0)) throw InvalidArgument("period must be positive");
    if (dim == 1) period_[1] = 1.0;
}

HamiltonianModel HamiltonianModel::quadratic_contact(QuadraticContact q, std::optional<double> lambda, Vec period) {
    if (q.inverse_mass.dim() != q.dim) throw InvalidArgument("inverse mass dimension does not match model");
    if (!q.potential.empty() && (q.potential.references(Slot::P1) || q.potential.references(Slot::P2) ||
                                 q.potential.references(Slot::U)))
        throw InvalidArgument("V0 may depend on position only");
    double lam = lambda.value_or(q.coupling.lipschitz());
    if (!lambda && lam == 0.0) lam = 1.0;
    const int dim = q.dim;
    return HamiltonianModel(dim, lam, period, std::move(q));
}

HamiltonianModel HamiltonianModel::from_expression(Expression e, int dim, double lambda, Vec period) {
    if (dim == 1 && (e.references(Slot::X2) || e.references(Slot::P2)))
        throw InvalidArgument("expression references a second axis but the model is one-dimensional");
    return HamiltonianModel(dim, lambda, period, std::move(e));
}

HamiltonianModel parse_hamiltonian(std::string_view text, double lambda, Vec period) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw SyntaxError(0, {"number", "identifier", "'('", "'-'", "'+'"}, "end of input");
    Expression e = Expression::parse(text, VariableSet::hamiltonian(2));
    const int dim = (e.references(Slot::X2) || e.references(Slot::P2)) ? 2 : 1;
    return HamiltonianModel::from_expression(std::move(e), dim, lambda, period);
}

namespace {

JetValue eval_quadratic(const QuadraticContact& q, const Vec& x, const Vec& p, double u) {
    const Mat2 a = q.inverse_mass.at(x);
    JetValue j;
    Vec ap{};
    for (int i = 0; i < q.dim; ++i)
        for (int k = 0; k < q.dim; ++k) ap[i] += a[i][k] * p[k];
    j.value = 0.5 * dot(ap, p) + q.coupling.value(u);
    j.d_p = ap;
    j.d_u = q.coupling.slope(u);
    if (!q.inverse_mass.is_constant()) {
        const auto ga = q.inverse_mass.gradient(x);
        for (int k = 0; k < q.dim; ++k) {
            double s = 0.0;
            for (int i = 0; i < q.dim; ++i)
                for (int l = 0; l < q.dim; ++l) s += ga[k][i][l] * p[i] * p[l];
            j.d_x[k] += 0.5 * s;
        }
    }
    if (!q.potential.empty()) {
        const Jet v = q.potential.eval(x, Vec{}, 0.0);
        j.value += v.value;
        j.d_x[0] += v.d(Slot::X1);
        if (q.dim == 2) j.d_x[1] += v.d(Slot::X2);
    }
    if (!std::isfinite(j.value) || !all_finite(j.d_p) || !all_finite(j.d_x) || !std::isfinite(j.d_u))
        throw EvaluationOverflow("1/2<A(x)p,p> + V0(x) + g(u)");
    return j;
}

}  // namespace

JetValue HamiltonianModel::eval(const Vec& x, const Vec& p, double u) const {
    if (const auto* q = quadratic()) return eval_quadratic(*q, x, p, u);
    const Jet j = expression()->eval(x, p, u);
    JetValue r;
    r.value = j.value;
    r.d_x = {j.d(Slot::X1), dim_ == 2 ? j.d(Slot::X2) : 0.0};
    r.d_p = {j.d(Slot::P1), dim_ == 2 ? j.d(Slot::P2) : 0.0};
    r.d_u = j.d(Slot::U);
    return r;
}

double HamiltonianModel::value(const Vec& x, const Vec& p, double u) const { return eval(x, p, u).value; }

std::string HamiltonianModel::describe() const {
    std::ostringstream os;
    if (const auto* q = quadratic()) {
        os << "quadratic-contact d=" << dim_ << " A=";
        if (q->inverse_mass.is_constant()) {
            const Mat2 a = q->inverse_mass.at(Vec{});
            if (dim_ == 1)
                os << format_double(a[0][0]);
            else
                os << "[[" << format_double(a[0][0]) << "," << format_double(a[0][1]) << "],["
                   << format_double(a[1][0]) << "," << format_double(a[1][1]) << "]]";
        } else {
            os << "sampled";
        }
        os << " V0=" << (q->potential.empty() ? std::string("0") : q->potential.text());
        os << " g=" << (q->coupling.kind == Coupling::Kind::Linear ? "linear" : "sin") << "("
           << format_double(q->coupling.coef) << ")";
    } else {
        os << "expression d=" << dim_ << " H=" << expression()->text();
    }
    os << " lambda=" << format_double(lambda_);
    return os.str();
}

LegendreNonConvergence::LegendreNonConvergence(Vec best_p, double residual)
    : Error("Legendre transform did not converge (residual " + format_double(residual) + ")"),
      best_p_(best_p),
      residual_(residual) {}

Mat2 momentum_hessian(const HamiltonianModel& model, const Vec& x, const Vec& p, double u) {
    const int d = model.dim();
    Mat2 h{};
    for (int k = 0; k < d; ++k) {
        const double delta = 1e-5 * std::max(1.0, std::abs(p[k]));
        Vec plus = p, minus = p;
        plus[k] += delta;
        minus[k] -= delta;
        const Vec gp = model.eval(x, plus, u).d_p;
        const Vec gm = model.eval(x, minus, u).d_p;
        for (int i = 0; i < d; ++i) h[i][k] = (gp[i] - gm[i]) / (2.0 * delta);
    }
    if (d == 2) {
        const double off = 0.5 * (h[0][1] + h[1][0]);
        h[0][1] = h[1][0] = off;
    }
    return h;
}

namespace {

struct AscentOutcome {
    Vec p{};
    double objective = -std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

// Damped Newton ascent on J(p) = p.v - H(x,p,u).
AscentOutcome newton_ascent(const HamiltonianModel& model, const Vec& x, const Vec& v, double u, Vec p,
                            const LegendreOptions& opts) {
    const int d = model.dim();
    auto objective = [&](const Vec& q, JetValue& jet) {
        jet = model.eval(x, q, u);
        return dot(q, v) - jet.value;
    };
    JetValue jet;
    AscentOutcome out;
    double j = objective(p, jet);
    for (int it = 0; it < opts.max_iterations; ++it) {
        Vec g = v - jet.d_p;
        if (d == 1) g[1] = 0.0;
        const double res = norm(g);
        out = {p, j, res, false};
        if (res <= opts.gradient_tol * (1.0 + norm(v))) {
            out.converged = true;
            return out;
        }
        const Mat2 h = momentum_hessian(model, x, p, u);
        Vec step{};
        bool newton = false;
        if (min_symmetric_eigenvalue(h, d) > 1e-12) {
            if (d == 1) {
                step[0] = g[0] / h[0][0];
            } else {
                const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                step[0] = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
                step[1] = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
            }
            newton = true;
        } else {
            step = g;
        }
        double alpha = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 60; ++ls) {
            const Vec trial = p + alpha * step;
            JetValue tj;
            double jt;
            try {
                jt = objective(trial, tj);
            } catch (const EvaluationOverflow&) {
                alpha *= 0.5;
                continue;
            }
            if (jt >= j) {
                p = trial;
                j = jt;
                jet = tj;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) {
            // Objective stalled at rounding level; accept when the gradient is already tiny.
            out.converged = newton && res <= 1e-8 * (1.0 + norm(v));
            return out;
        }
    }
    Vec g = v - jet.d_p;
    if (d == 1) g[1] = 0.0;
    out = {p, j, norm(g), norm(g) <= opts.gradient_tol * (1.0 + norm(v))};
    return out;
}

LagrangianValue multistart(const HamiltonianModel& model, const Vec& x, const Vec& v, double u,
                           const LegendreOptions& opts) {
    const int d = model.dim();
    constexpr int kPerAxis = 9;
    std::vector<std::pair<double, Vec>> starts;
    for (int i = 0; i < kPerAxis; ++i) {
        for (int k = 0; k < (d == 2 ? kPerAxis : 1); ++k) {
            Vec p{-opts.p_max + 2.0 * opts.p_max * i / (kPerAxis - 1), 0.0};
            if (d == 2) p[1] = -opts.p_max + 2.0 * opts.p_max * k / (kPerAxis - 1);
            double j = -std::numeric_limits<double>::infinity();
            try {
                j = dot(p, v) - model.value(x, p, u);
            } catch (const EvaluationOverflow&) {
            }
            starts.emplace_back(j, p);
        }
    }
    std::stable_sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    AscentOutcome best;
    for (const auto& [j0, p0] : starts) {
        if (!std::isfinite(j0)) continue;
        const AscentOutcome o = newton_ascent(model, x, v, u, p0, opts);
        if (o.converged) return {o.objective, o.p, o.residual};
        if (o.objective > best.objective) best = o;
    }
    throw LegendreNonConvergence(best.p, best.residual);
}

}  // namespace

LagrangianValue legendre(const HamiltonianModel& model, const Vec& x, const Vec& v, double u,
                         const LegendreOptions& opts) {
    const auto* q = model.quadratic();
    if (q && !opts.force_numeric) {
        const Mat2 a = q->inverse_mass.at(x);
        Vec p{};
        if (q->dim == 1) {
            p[0] = v[0] / a[0][0];
        } else {
            const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            p[0] = (a[1][1] * v[0] - a[0][1] * v[1]) / det;
            p[1] = (a[0][0] * v[1] - a[1][0] * v[0]) / det;
        }
        double v0 = 0.0;
        if (!q->potential.empty()) v0 = q->potential.value(x, Vec{}, 0.0);
        return {0.5 * dot(p, v) - v0 - q->coupling.value(u), p, 0.0};
    }
    return multistart(model, x, v, u, opts);
}

LagrangianValue legendre_from(const HamiltonianModel& model, const Vec& x, const Vec& v, double u,
                              const Vec& p_guess, const LegendreOptions& opts) {
    if (model.quadratic() && !opts.force_numeric) return legendre(model, x, v, u, opts);
    const AscentOutcome o = newton_ascent(model, x, v, u, p_guess, opts);
    if (o.converged) return {o.objective, o.p, o.residual};
    return multistart(model, x, v, u, opts);
}

bool AssumptionReport::all_passed() const {
    return positive_definite.passed && superlinear.passed && lipschitz_in_u.passed &&
           (!completeness || completeness->passed);
}

namespace {

std::string no_violation(std::size_t n) { return "no violation found on " + std::to_string(n) + " samples"; }

std::string violated_at(const ContactPoint& w) {
    std::ostringstream os;
    os << "violated at x=(" << format_double(w.x[0]) << "," << format_double(w.x[1]) << ") p=("
       << format_double(w.p[0]) << "," << format_double(w.p[1]) << ") u=" << format_double(w.u);
    return os.str();
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(std::max(n, 1));
    if (n <= 1) {
        out[0] = 0.5 * (lo + hi);
        return out;
    }
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace

AssumptionReport check_assumptions(const HamiltonianModel& model, const SamplingPlan& plan) {
    const int d = model.dim();
    AssumptionReport rep;
    rep.plan = plan;

    std::vector<Vec> xs;
    for (int i = 0; i < plan.x_nodes; ++i)
        for (int k = 0; k < (d == 2 ? plan.x_nodes : 1); ++k)
            xs.push_back({model.period()[0] * i / plan.x_nodes, d == 2 ? model.period()[1] * k / plan.x_nodes : 0.0});
    const auto ps1 = linspace(-plan.p_max, plan.p_max, plan.p_points);
    std::vector<Vec> ps;
    for (double a : ps1)
        for (std::size_t k = 0; k < (d == 2 ? ps1.size() : 1); ++k) ps.push_back({a, d == 2 ? ps1[k] : 0.0});
    const auto us = linspace(-plan.u_max, plan.u_max, plan.u_points);

    auto& h1 = rep.positive_definite;
    h1.name = "positive definiteness";
    h1.measure = std::numeric_limits<double>::infinity();
    auto& h3 = rep.lipschitz_in_u;
    h3.name = "Lipschitz in u";
    h3.threshold = model.lambda_bound();
    h3.measure = 0.0;
    std::optional<AssumptionCheck> a1;
    if (plan.envelope) {
        a1.emplace();
        a1->name = "completeness envelope |p.dH/dp| <= (alpha|H|+beta)(1+|u|)";
        a1->measure = -std::numeric_limits<double>::infinity();
    }

    std::size_t n = 0;
    for (const Vec& x : xs) {
        for (const Vec& p : ps) {
            for (double u : us) {
                ++n;
                const JetValue j = model.eval(x, p, u);
                const ContactPoint here{x, p, u};
                const Mat2 hess = momentum_hessian(model, x, p, u);
                const double eig = min_symmetric_eigenvalue(hess, d);
                if (eig < h1.measure) {
                    h1.measure = eig;
                    h1.witness = here;
                }
                const double tol_pd = 1e-8 * (1.0 + std::abs(j.value));
                if (!(eig > tol_pd) && h1.passed) {
                    h1.passed = false;
                    h1.threshold = tol_pd;
                    h1.witness = here;
                }
                if (std::abs(j.d_u) > h3.measure) {
                    h3.measure = std::abs(j.d_u);
                    h3.witness = here;
                }
                if (a1) {
                    const double lhs = std::abs(dot(p, j.d_p));
                    const double rhs = ((*plan.envelope)[0] * std::abs(j.value) + (*plan.envelope)[1]) * (1.0 + std::abs(u));
                    if (lhs - rhs > a1->measure) {
                        a1->measure = lhs - rhs;
                        a1->witness = here;
                    }
                }
            }
        }
    }
    h1.samples = n;
    if (h1.passed) h1.threshold = 1e-8;
    h1.statement = h1.passed ? no_violation(n) : violated_at(h1.witness);

    h3.samples = n;
    h3.passed = h3.measure <= h3.threshold * (1.0 + 1e-12) + 1e-15;
    h3.statement = h3.passed ? no_violation(n) : violated_at(h3.witness);

    if (a1) {
        a1->samples = n;
        a1->threshold = 0.0;
        a1->passed = a1->measure <= 1e-12;
        a1->statement = a1->passed ? no_violation(n) : violated_at(a1->witness);
        rep.completeness = a1;
    }

    // H(x, r e, u)/r must keep growing for r in [p_max/2, p_max].
    auto& h2 = rep.superlinear;
    h2.name = "superlinear growth along rays";
    h2.measure = std::numeric_limits<double>::infinity();
    std::vector<Vec> dirs{{1.0, 0.0}, {-1.0, 0.0}};
    if (d == 2) {
        for (int k = 0; k < 8; ++k) {
            const double ang = 2.0 * 3.14159265358979323846 * k / 8;
            dirs.push_back({std::cos(ang), std::sin(ang)});
        }
        dirs.erase(dirs.begin(), dirs.begin() + 2);
    }
    const auto radii = linspace(0.5 * plan.p_max, plan.p_max, std::max(plan.p_points, 2));
    std::size_t m = 0;
    for (const Vec& x : xs) {
        for (double u : us) {
            for (const Vec& e : dirs) {
                double prev = model.value(x, radii[0] * e, u) / radii[0];
                for (std::size_t k = 1; k < radii.size(); ++k) {
                    ++m;
                    const double cur = model.value(x, radii[k] * e, u) / radii[k];
                    const double step = cur - prev;
                    if (step < h2.measure) {
                        h2.measure = step;
                        h2.witness = {x, radii[k] * e, u};
                    }
                    prev = cur;
                }
            }
        }
    }
    h2.samples = m;
    h2.threshold = 0.0;
    h2.passed = h2.measure > 0.0;
    h2.statement = h2.passed ? no_violation(m) : violated_at(h2.witness);
    return rep;
}

}  // namespace chj
