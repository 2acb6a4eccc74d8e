#include "chj/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace chj {

Jet operator+(const Jet& a, const Jet& b) {
    Jet r{a.value + b.value, {}};
    for (int k = 0; k < kSlots; ++k) r.grad[k] = a.grad[k] + b.grad[k];
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    Jet r{a.value - b.value, {}};
    for (int k = 0; k < kSlots; ++k) r.grad[k] = a.grad[k] - b.grad[k];
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    Jet r{a.value * b.value, {}};
    for (int k = 0; k < kSlots; ++k) r.grad[k] = a.grad[k] * b.value + b.grad[k] * a.value;
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    Jet r{a.value / b.value, {}};
    for (int k = 0; k < kSlots; ++k) r.grad[k] = (a.grad[k] - r.value * b.grad[k]) / b.value;
    return r;
}

Jet operator-(const Jet& a) {
    Jet r{-a.value, {}};
    for (int k = 0; k < kSlots; ++k) r.grad[k] = -a.grad[k];
    return r;
}

Jet pow(const Jet& a, int n) {
    if (n == 0) return Jet::constant(1.0);
    double lower = 1.0;  // a^(n-1)
    const int m = n - 1;
    if (m > 0) {
        for (int i = 0; i < m; ++i) lower *= a.value;
    } else if (m < 0) {
        for (int i = 0; i < -m; ++i) lower /= a.value;
    }
    Jet r{lower * a.value, {}};
    const double slope = n * lower;
    for (int k = 0; k < kSlots; ++k) r.grad[k] = slope * a.grad[k];
    return r;
}

Jet sin(const Jet& a) {
    Jet r{std::sin(a.value), {}};
    const double c = std::cos(a.value);
    for (int k = 0; k < kSlots; ++k) r.grad[k] = c * a.grad[k];
    return r;
}

Jet cos(const Jet& a) {
    Jet r{std::cos(a.value), {}};
    const double s = -std::sin(a.value);
    for (int k = 0; k < kSlots; ++k) r.grad[k] = s * a.grad[k];
    return r;
}

Jet exp(const Jet& a) {
    Jet r{std::exp(a.value), {}};
    for (int k = 0; k < kSlots; ++k) r.grad[k] = r.value * a.grad[k];
    return r;
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += ", ";
        s += items[i];
    }
    return s;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : ParseError("syntax error at offset " + std::to_string(offset) + ": expected one of {" + join(expected) +
                     "}, found " + found,
                 offset),
      expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(std::size_t offset, const std::string& name)
    : ParseError("unknown identifier '" + name + "' at offset " + std::to_string(offset), offset), name_(name) {}

EvaluationOverflow::EvaluationOverflow(const std::string& subexpression)
    : Error("non-finite value while evaluating '" + subexpression + "'"), subexpression_(subexpression) {}

class ExpressionParser {
public:
    ExpressionParser(std::string_view text, VariableSet vars) : text_(text), vars_(vars) {}

    Expression run() {
        Expression e;
        e.text_ = std::string(text_);
        e.vars_ = vars_;
        skip_space();
        if (pos_ >= text_.size()) throw SyntaxError(pos_, primary_expected(), "end of input");
        parse_expr();
        skip_space();
        if (pos_ < text_.size()) throw SyntaxError(pos_, {"operator", "end of input"}, describe_here());
        e.tape_ = std::move(tape_);
        e.max_depth_ = max_depth_;
        return e;
    }

private:
    std::string_view text_;
    VariableSet vars_;
    std::size_t pos_ = 0;
    std::vector<Expression::Instr> tape_;
    std::size_t depth_ = 0;
    std::size_t max_depth_ = 0;

    static std::vector<std::string> primary_expected() { return {"number", "identifier", "'('", "'-'", "'+'"}; }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    std::string describe_here() const {
        if (pos_ >= text_.size()) return "end of input";
        return "'" + std::string(1, text_[pos_]) + "'";
    }

    void emit(Expression::Op op, std::size_t begin, int arg = 0, double constant = 0.0) {
        using Op = Expression::Op;
        tape_.push_back({op, arg, constant, begin, pos_});
        switch (op) {
            case Op::Const:
            case Op::Var:
                ++depth_;
                break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div:
                --depth_;
                break;
            default:
                break;
        }
        max_depth_ = std::max(max_depth_, depth_);
    }

    void parse_expr() {
        skip_space();
        const std::size_t begin = pos_;
        parse_term();
        for (char c = peek(); c == '+' || c == '-'; c = peek()) {
            ++pos_;
            parse_term();
            emit(c == '+' ? Expression::Op::Add : Expression::Op::Sub, begin);
        }
    }

    void parse_term() {
        skip_space();
        const std::size_t begin = pos_;
        parse_unary();
        for (char c = peek(); c == '*' || c == '/'; c = peek()) {
            ++pos_;
            parse_unary();
            emit(c == '*' ? Expression::Op::Mul : Expression::Op::Div, begin);
        }
    }

    void parse_unary() {
        const char c = peek();
        const std::size_t begin = pos_;
        if (c == '-') {
            ++pos_;
            parse_unary();
            emit(Expression::Op::Neg, begin);
            return;
        }
        if (c == '+') {
            ++pos_;
            parse_unary();
            return;
        }
        parse_power();
    }

    void parse_power() {
        skip_space();
        const std::size_t begin = pos_;
        parse_primary();
        if (peek() != '^') return;
        ++pos_;
        bool paren = false;
        if (peek() == '(') {
            paren = true;
            ++pos_;
        }
        int sign = 1;
        if (peek() == '-' || peek() == '+') {
            sign = text_[pos_] == '-' ? -1 : 1;
            ++pos_;
        }
        skip_space();
        const std::size_t digits = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == digits) throw SyntaxError(pos_, {"integer exponent"}, describe_here());
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
            throw SyntaxError(pos_, {"integer exponent"}, describe_here());
        const int n = sign * std::atoi(std::string(text_.substr(digits, pos_ - digits)).c_str());
        if (paren) {
            if (peek() != ')') throw SyntaxError(pos_, {"')'"}, describe_here());
            ++pos_;
        }
        emit(Expression::Op::Pow, begin, n);
    }

    void parse_primary() {
        const char c = peek();
        const std::size_t begin = pos_;
        if (c == '(') {
            ++pos_;
            parse_expr();
            if (peek() != ')') throw SyntaxError(pos_, {"')'", "operator"}, describe_here());
            ++pos_;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(begin, pos_ - begin));
            if (peek() == '(') {
                Expression::Op op;
                if (name == "sin")
                    op = Expression::Op::Sin;
                else if (name == "cos")
                    op = Expression::Op::Cos;
                else if (name == "exp")
                    op = Expression::Op::Exp;
                else
                    throw UnknownIdentifier(begin, name);
                ++pos_;
                parse_expr();
                if (peek() != ')') throw SyntaxError(pos_, {"')'", "operator"}, describe_here());
                ++pos_;
                emit(op, begin);
                return;
            }
            if (name == "pi") {
                emit(Expression::Op::Const, begin, 0, std::numbers::pi);
                return;
            }
            emit(Expression::Op::Var, begin, static_cast<int>(resolve(name, begin)));
            return;
        }
        throw SyntaxError(pos_, primary_expected(), describe_here());
    }

    Slot resolve(const std::string& name, std::size_t at) const {
        const int d = vars_.dim;
        if (name == "u" && vars_.allow_u) return Slot::U;
        if ((name == "x" || name == "x1")) return Slot::X1;
        if (name == "x2" && d == 2) return Slot::X2;
        if (vars_.allow_p) {
            if (name == "p" || name == "p1") return Slot::P1;
            if (name == "p2" && d == 2) return Slot::P2;
        }
        throw UnknownIdentifier(at, name);
    }

    void parse_number() {
        const std::size_t begin = pos_;
        const std::string rest(text_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        const std::size_t used = static_cast<std::size_t>(end - rest.c_str());
        if (used == 0) throw SyntaxError(pos_, {"number"}, describe_here());
        pos_ += used;
        emit(Expression::Op::Const, begin, 0, v);
    }
};

Expression Expression::parse(std::string_view text, VariableSet vars) {
    if (vars.dim != 1 && vars.dim != 2) throw InvalidArgument("expression dimension must be 1 or 2");
    return ExpressionParser(text, vars).run();
}

bool Expression::references(Slot s) const {
    return std::any_of(tape_.begin(), tape_.end(),
                       [&](const Instr& i) { return i.op == Op::Var && i.arg == static_cast<int>(s); });
}

namespace {

bool jet_finite(const Jet& j) {
    if (!std::isfinite(j.value)) return false;
    for (double g : j.grad)
        if (!std::isfinite(g)) return false;
    return true;
}

}  // namespace

Jet Expression::eval(const Vec& x, const Vec& p, double u) const {
    if (tape_.empty()) return Jet::constant(0.0);
    constexpr std::size_t kInline = 32;
    std::array<Jet, kInline> inline_stack;
    std::vector<Jet> heap_stack;
    Jet* stack = inline_stack.data();
    if (max_depth_ > kInline) {
        heap_stack.resize(max_depth_);
        stack = heap_stack.data();
    }
    std::size_t top = 0;
    for (const Instr& in : tape_) {
        Jet r;
        switch (in.op) {
            case Op::Const:
                r = Jet::constant(in.constant);
                break;
            case Op::Var: {
                const Slot s = static_cast<Slot>(in.arg);
                double v = 0.0;
                switch (s) {
                    case Slot::X1: v = x[0]; break;
                    case Slot::X2: v = x[1]; break;
                    case Slot::P1: v = p[0]; break;
                    case Slot::P2: v = p[1]; break;
                    case Slot::U: v = u; break;
                }
                r = Jet::variable(v, s);
                break;
            }
            case Op::Neg: r = -stack[--top]; break;
            case Op::Add: top -= 2; r = stack[top] + stack[top + 1]; break;
            case Op::Sub: top -= 2; r = stack[top] - stack[top + 1]; break;
            case Op::Mul: top -= 2; r = stack[top] * stack[top + 1]; break;
            case Op::Div: top -= 2; r = stack[top] / stack[top + 1]; break;
            case Op::Pow: r = pow(stack[--top], in.arg); break;
            case Op::Sin: r = sin(stack[--top]); break;
            case Op::Cos: r = cos(stack[--top]); break;
            case Op::Exp: r = exp(stack[--top]); break;
        }
        if (!jet_finite(r)) throw EvaluationOverflow(text_.substr(in.begin, in.end - in.begin));
        stack[top++] = r;
    }
    return stack[0];
}

}  // namespace chj
