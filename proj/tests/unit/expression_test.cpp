#include "chj/expression.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace chj {
namespace {

Expression parse1(const std::string& s) { return Expression::parse(s, VariableSet::hamiltonian(1)); }

TEST(ExpressionParse, DirectArithmetic) {
    const auto e = parse1("u + 0.5*p1^2");
    EXPECT_DOUBLE_EQ(e.value({0.0, 0.0}, {1.0, 0.0}, 0.0), 0.5);
}

TEST(ExpressionParse, CosineTerm) {
    const auto e = parse1("0.5*p1^2 + 0.2*u + cos(2*3.141592653589793*x1)");
    EXPECT_DOUBLE_EQ(e.value({0.0, 0.0}, {0.0, 0.0}, 0.0), 1.0);
}

TEST(ExpressionParse, PrecedenceAndUnaryMinus) {
    const auto e = parse1("-p1^2 + 2*3 - 8/4/2 + (1+2)*3");
    EXPECT_DOUBLE_EQ(e.value({}, {3.0, 0.0}, 0.0), -9.0 + 6.0 - 1.0 + 9.0);
    EXPECT_DOUBLE_EQ(parse1("2^-2").value({}, {}, 0.0), 0.25);
    EXPECT_DOUBLE_EQ(parse1("u^(-1)").value({}, {}, 4.0), 0.25);
    EXPECT_DOUBLE_EQ(parse1("--u").value({}, {}, 4.0), 4.0);
    EXPECT_DOUBLE_EQ(parse1("1e-3*1e3").value({}, {}, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(parse1("pi").value({}, {}, 0.0), std::numbers::pi);
}

TEST(ExpressionParse, SyntaxErrorCarriesOffset) {
    try {
        parse1("u + * p1");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 4u);
        EXPECT_FALSE(e.expected().empty());
    }
}

TEST(ExpressionParse, OtherSyntaxErrors) {
    EXPECT_THROW(parse1(""), SyntaxError);
    EXPECT_THROW(parse1("(u + 1"), SyntaxError);
    EXPECT_THROW(parse1("u 1"), SyntaxError);
    EXPECT_THROW(parse1("u^1.5"), SyntaxError);
    EXPECT_THROW(parse1("sin(u"), SyntaxError);
    try {
        parse1("u + )");
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 4u);
    }
}

TEST(ExpressionParse, UnknownIdentifiers) {
    try {
        parse1("u + q");
        FAIL();
    } catch (const UnknownIdentifier& e) {
        EXPECT_EQ(e.name(), "q");
        EXPECT_EQ(e.offset(), 4u);
    }
    EXPECT_THROW(parse1("tan(u)"), UnknownIdentifier);
    EXPECT_THROW(parse1("x2"), UnknownIdentifier);
    EXPECT_THROW(Expression::parse("p1", VariableSet::position_only(1)), UnknownIdentifier);
    EXPECT_NO_THROW(Expression::parse("x1*x2", VariableSet::position_only(2)));
}

TEST(ExpressionEval, JetOfSimpleHamiltonian) {
    const auto j = parse1("u+0.5*p1^2").eval({0.0, 0.0}, {1.0, 0.0}, 0.0);
    EXPECT_DOUBLE_EQ(j.value, 0.5);
    EXPECT_DOUBLE_EQ(j.d(Slot::P1), 1.0);
    EXPECT_DOUBLE_EQ(j.d(Slot::U), 1.0);
    EXPECT_DOUBLE_EQ(j.d(Slot::X1), 0.0);
}

TEST(ExpressionEval, OverflowNamesTheSubexpression) {
    const auto e = parse1("1 + exp(u*1000)");
    try {
        e.eval({}, {}, 1.0);
        FAIL();
    } catch (const EvaluationOverflow& err) {
        EXPECT_EQ(err.subexpression(), "exp(u*1000)");
    }
}

TEST(ExpressionEval, DivisionByZeroIsReported) { EXPECT_THROW(parse1("1/u").eval({}, {}, 0.0), EvaluationOverflow); }

// Random smooth expression generator; the argument of exp and the
// denominators are kept bounded so values stay moderate.
class RandomExpression {
public:
    explicit RandomExpression(unsigned seed, int dim) : rng_(seed), dim_(dim) {}

    std::string make(int depth) {
        std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
        switch (pick(rng_)) {
            case 0: return leaf();
            case 1: return number();
            case 2: return "(" + make(depth - 1) + " + " + make(depth - 1) + ")";
            case 3: return "(" + make(depth - 1) + " - " + make(depth - 1) + ")";
            case 4: return "(" + make(depth - 1) + " * " + make(depth - 1) + ")";
            case 5: return "(" + make(depth - 1) + " / (2 + sin(" + make(depth - 1) + ")))";
            case 6: return "sin(" + make(depth - 1) + ")";
            case 7: return "cos(" + make(depth - 1) + ")";
            default: return "exp(0.3*sin(" + make(depth - 1) + "))";
        }
    }

private:
    std::string leaf() {
        std::vector<std::string> names{"x1", "p1", "u"};
        if (dim_ == 2) {
            names.push_back("x2");
            names.push_back("p2");
        }
        std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
        std::uniform_int_distribution<int> power(1, 3);
        return "(" + names[pick(rng_)] + ")^" + std::to_string(power(rng_));
    }
    std::string number() {
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        return "(" + std::to_string(U(rng_)) + ")";
    }
    std::mt19937 rng_;
    int dim_;
};

TEST(ExpressionEval, JetsMatchCentralDifferences) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int dim : {1, 2}) {
        RandomExpression gen(static_cast<unsigned>(17 + dim), dim);
        for (int trial = 0; trial < 40; ++trial) {
            const std::string text = gen.make(4);
            const auto e = Expression::parse(text, VariableSet::hamiltonian(dim));
            for (int s = 0; s < 100; ++s) {
                const Vec x{U(rng), dim == 2 ? U(rng) : 0.0};
                const Vec p{U(rng), dim == 2 ? U(rng) : 0.0};
                const double u = U(rng);
                const Jet j = e.eval(x, p, u);
                const double h = 1e-5;
                auto fd = [&](Slot slot) {
                    Vec xp = x, xm = x, pp = p, pm = p;
                    double up = u, um = u;
                    switch (slot) {
                        case Slot::X1: xp[0] += h; xm[0] -= h; break;
                        case Slot::X2: xp[1] += h; xm[1] -= h; break;
                        case Slot::P1: pp[0] += h; pm[0] -= h; break;
                        case Slot::P2: pp[1] += h; pm[1] -= h; break;
                        case Slot::U: up += h; um -= h; break;
                    }
                    return (e.value(xp, pp, up) - e.value(xm, pm, um)) / (2 * h);
                };
                for (Slot slot : {Slot::X1, Slot::X2, Slot::P1, Slot::P2, Slot::U}) {
                    if (dim == 1 && (slot == Slot::X2 || slot == Slot::P2)) continue;
                    const double ref = fd(slot);
                    ASSERT_NEAR(j.d(slot), ref, 1e-7 * (1.0 + std::abs(ref))) << text;
                }
            }
        }
    }
}

}  // namespace
}  // namespace chj
