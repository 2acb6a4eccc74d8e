#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chj/types.hpp"

namespace chj {

/// Derivative slots carried by a Jet: x1, x2, p1, p2, u.
enum class Slot : int { X1 = 0, X2 = 1, P1 = 2, P2 = 3, U = 4 };
inline constexpr int kSlots = 5;

/// First-order forward-mode jet: a value and its gradient with respect to
/// every slot. Arithmetic on jets applies the chain rule exactly.
struct Jet {
    double value = 0.0;
    std::array<double, kSlots> grad{};

    static Jet constant(double v) { return {v, {}}; }
    static Jet variable(double v, Slot s) {
        Jet j{v, {}};
        j.grad[static_cast<int>(s)] = 1.0;
        return j;
    }
    double d(Slot s) const { return grad[static_cast<int>(s)]; }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet pow(const Jet& a, int n);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);

/// Base of expression parse failures. offset() is a byte offset into the source text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset) : Error(what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class SyntaxError : public ParseError {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::vector<std::string> expected_;
};

class UnknownIdentifier : public ParseError {
public:
    UnknownIdentifier(std::size_t offset, const std::string& name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// Raised when an intermediate value becomes non-finite during evaluation.
class EvaluationOverflow : public Error {
public:
    explicit EvaluationOverflow(const std::string& subexpression);
    const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

/// Which identifiers an expression may reference.
struct VariableSet {
    int dim = 1;
    bool allow_p = true;
    bool allow_u = true;

    static VariableSet hamiltonian(int dim) { return {dim, true, true}; }
    static VariableSet position_only(int dim) { return {dim, false, false}; }
};

/// Arithmetic expression over x1..xd, p1..pd, u with + - * / ^(integer),
/// unary minus, parentheses, sin, cos, exp and the constant pi.
/// Compiled to a postfix tape; evaluation yields a Jet.
class Expression {
public:
    Expression() = default;

    static Expression parse(std::string_view text, VariableSet vars);

    Jet eval(const Vec& x, const Vec& p, double u) const;
    double value(const Vec& x, const Vec& p, double u) const { return eval(x, p, u).value; }

    const std::string& text() const { return text_; }
    const VariableSet& variables() const { return vars_; }
    bool empty() const { return tape_.empty(); }

    /// True when some instruction reads the given slot.
    bool references(Slot s) const;

    enum class Op : unsigned char { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };
    struct Instr {
        Op op;
        int arg = 0;        // slot for Var, exponent for Pow
        double constant = 0.0;
        std::size_t begin = 0;  // source span of the subexpression this instruction produces
        std::size_t end = 0;
    };

private:
    friend class ExpressionParser;
    std::string text_;
    VariableSet vars_;
    std::vector<Instr> tape_;
    std::size_t max_depth_ = 0;
};

}  // namespace chj
