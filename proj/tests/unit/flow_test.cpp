#include "chj/flow.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

namespace chj {
namespace {

// Closed-form characteristics of H = u + p^2/2: p = p0 e^{-t}, H = H0 e^{-t},
// u = H - p^2/2, x = x0 + p0 (1 - e^{-t}).
ContactState exact_simple(const ContactState& s0, double t) {
    const double H0 = s0.u + 0.5 * s0.p[0] * s0.p[0];
    const double e = std::exp(-t);
    const double p = s0.p[0] * e;
    return {{s0.x[0] + s0.p[0] * (1.0 - e), 0.0}, {p, 0.0}, H0 * e - 0.5 * p * p};
}

TEST(VectorField, SimpleModel) {
    const auto m = parse_hamiltonian("u+0.5*p1^2");
    const FieldValue f = vector_field(m, {{0.0, 0.0}, {1.0, 0.0}, 0.0});
    EXPECT_DOUBLE_EQ(f.dx[0], 1.0);
    EXPECT_DOUBLE_EQ(f.dp[0], -1.0);
    EXPECT_DOUBLE_EQ(f.du, 0.5);
}

TEST(VectorField, PotentialGradientEntersMomentum) {
    const auto m = parse_hamiltonian("0.5*p1^2 + 0.2*u + cos(2*pi*x1)", 0.2);
    const FieldValue f = vector_field(m, {{0.25, 0.0}, {0.0, 0.0}, 0.0});
    EXPECT_NEAR(f.dp[0], 2.0 * std::numbers::pi, 1e-12);
    EXPECT_DOUBLE_EQ(f.dx[0], 0.0);
    EXPECT_NEAR(f.du, -std::cos(std::numbers::pi / 2), 1e-15);
}

TEST(Integrate, MatchesClosedFormOnSimpleModel) {
    const auto m = parse_hamiltonian("u+0.5*p1^2");
    const ContactState s0{{0.0, 0.0}, {1.0, 0.0}, 0.0};
    const auto tr = integrate(m, s0, 1.0);
    ASSERT_EQ(tr.size(), 1001u);
    EXPECT_DOUBLE_EQ(tr.times.back(), 1.0);
    const auto ex = exact_simple(s0, 1.0);
    EXPECT_NEAR(tr.back().x[0], ex.x[0], 1e-9);
    EXPECT_NEAR(tr.back().p[0], ex.p[0], 1e-9);
    EXPECT_NEAR(tr.back().u, ex.u, 1e-9);
    EXPECT_NEAR(tr.back().x[0], 0.6321205588285577, 1e-9);
    EXPECT_NEAR(tr.back().p[0], 0.36787944117144233, 1e-9);
    EXPECT_NEAR(tr.back().u, 0.11627207896741482, 1e-9);
    for (std::size_t k = 0; k < tr.size(); k += 97) {
        const auto e = exact_simple(s0, tr.times[k]);
        EXPECT_NEAR(tr.unwrapped_x(k, m.period())[0], e.x[0], 1e-9);
        EXPECT_NEAR(tr.states[k].u, e.u, 1e-9);
    }
}

TEST(Integrate, ZeroHorizonReturnsInitialState) {
    const auto m = parse_hamiltonian("u+0.5*p1^2");
    const auto tr = integrate(m, {{0.3, 0.0}, {2.0, 0.0}, -1.0}, 0.0);
    ASSERT_EQ(tr.size(), 1u);
    EXPECT_EQ(tr.back().x[0], 0.3);
    EXPECT_EQ(tr.back().p[0], 2.0);
    EXPECT_EQ(tr.back().u, -1.0);
}

TEST(Integrate, RejectsBadHorizon) {
    const auto m = parse_hamiltonian("u+0.5*p1^2");
    EXPECT_THROW(integrate(m, {}, -1.0), InvalidArgument);
    EXPECT_THROW(integrate(m, {}, std::nan("")), InvalidArgument);
}

TEST(Integrate, ClassicalHamiltonianIsStraightLine) {
    // No u-dependence: p constant, u grows by H t = p^2 t / 2.
    const auto m = parse_hamiltonian("0.5*p1^2");
    const auto tr = integrate(m, {{0.0, 0.0}, {0.7, 0.0}, 0.0}, 2.0);
    EXPECT_NEAR(tr.back().p[0], 0.7, 1e-14);
    EXPECT_NEAR(tr.unwrapped_x(tr.size() - 1, m.period())[0], 1.4, 1e-12);
    EXPECT_NEAR(tr.back().u, 0.49, 1e-12);
    EXPECT_EQ(tr.windings.back()[0], 1);
    EXPECT_NEAR(tr.back().x[0], 0.4, 1e-12);
}

TEST(Integrate, WindingsCountSeamCrossingsBothWays) {
    const auto m = parse_hamiltonian("0.5*(p1^2 + p2^2)");
    const auto tr = integrate(m, {{0.5, 0.5}, {2.3, -1.6}, 0.0}, 1.0);
    EXPECT_EQ(tr.windings.back()[0], 2);
    EXPECT_EQ(tr.windings.back()[1], -2);
    const Vec X = tr.unwrapped_x(tr.size() - 1, m.period());
    EXPECT_NEAR(X[0], 2.8, 1e-12);
    EXPECT_NEAR(X[1], -1.1, 1e-12);
    for (const auto& s : tr.states) {
        EXPECT_GE(s.x[0], 0.0);
        EXPECT_LT(s.x[0], 1.0);
        EXPECT_GE(s.x[1], 0.0);
        EXPECT_LT(s.x[1], 1.0);
    }
}

TEST(EnergyResidual, SmallAndSecondOrder) {
    const auto m = parse_hamiltonian("u+0.5*p1^2");
    const ContactState s0{{0.0, 0.0}, {1.0, 0.0}, 0.0};
    StepControl a, b;
    b.h0 = 5e-4;
    const double ra = energy_residual(m, integrate(m, s0, 2.0, a));
    const double rb = energy_residual(m, integrate(m, s0, 2.0, b));
    EXPECT_LE(ra, 1e-6);
    EXPECT_NEAR(ra / rb, 4.0, 0.4);
}

TEST(EnergyResidual, ConservativeLimit) {
    const auto m = parse_hamiltonian("0.5*p1^2 + cos(2*pi*x1)");
    const auto tr = integrate(m, {{0.1, 0.0}, {0.8, 0.0}, 0.3}, 2.0);
    EXPECT_LE(energy_residual(m, tr), 1e-6);
}

TEST(EnergyResidual, NeedsThreeSamples) {
    const auto m = parse_hamiltonian("u+0.5*p1^2");
    EXPECT_THROW(energy_residual(m, integrate(m, {}, 0.0)), InvalidArgument);
}

TEST(Integrate, EnergyStaysInsideExponentialEnvelope) {
    const auto m = parse_hamiltonian("0.5*p1^2 + 0.5*sin(u) + 0.3*cos(2*pi*x1)", 0.5);
    const ContactState s0{{0.2, 0.0}, {1.1, 0.0}, -0.4};
    const auto tr = integrate(m, s0, 3.0);
    const double H0 = std::abs(tr.energies.front());
    for (std::size_t k = 0; k < tr.size(); ++k)
        EXPECT_LE(std::abs(tr.energies[k]), std::exp(0.5 * tr.times[k]) * H0 + 1e-9);
}

TEST(Integrate, ForwardThenBackwardReturnsToStart) {
    const auto m = parse_hamiltonian("0.5*p1^2 + 0.2*u + cos(2*pi*x1)", 0.2);
    const ContactState s0{{0.1, 0.0}, {0.8, 0.0}, 0.3};
    const auto fwd = integrate(m, s0, 1.5);
    StepControl back;
    back.direction = TimeDirection::Backward;
    ContactState mid = fwd.back();
    mid.x = fwd.unwrapped_x(fwd.size() - 1, m.period());
    const auto bwd = integrate(m, mid, 1.5, back);
    const Vec X = bwd.unwrapped_x(bwd.size() - 1, m.period());
    EXPECT_NEAR(X[0], 0.1, 1e-6);
    EXPECT_NEAR(bwd.back().p[0], 0.8, 1e-6);
    EXPECT_NEAR(bwd.back().u, 0.3, 1e-6);
}

TEST(Integrate, BlowUpIsDetected) {
    // du = -H = u^2 with p = 0: u = 1/(1 - t).
    const auto m = parse_hamiltonian("0.5*p1^2 - u^2", 1.0);
    try {
        integrate(m, {{0.0, 0.0}, {0.0, 0.0}, 1.0}, 2.0);
        FAIL() << "expected BlowUp";
    } catch (const BlowUp& b) {
        EXPECT_NEAR(b.t_detect(), 1.0, 2e-3);
        EXPECT_GT(b.partial().size(), 100u);
        EXPECT_LT(b.partial().times.back(), b.t_detect());
    }
}

TEST(Integrate, AdaptiveStepMeetsToleranceAndLandsOnHorizon) {
    const auto m = parse_hamiltonian("0.5*p1^2 + 0.2*u + cos(2*pi*x1)", 0.2);
    StepControl s;
    s.adaptive = true;
    s.h0 = 0.05;
    s.energy_tol = 1e-8;
    const auto tr = integrate(m, {{0.1, 0.0}, {0.8, 0.0}, 0.3}, 2.0, s);
    EXPECT_DOUBLE_EQ(tr.times.back(), 2.0);
    const auto ref = integrate(m, {{0.1, 0.0}, {0.8, 0.0}, 0.3}, 2.0);
    EXPECT_NEAR(tr.back().u, ref.back().u, 1e-5);
    EXPECT_NEAR(tr.back().p[0], ref.back().p[0], 1e-5);
    EXPECT_LT(tr.size(), ref.size());
}

TEST(Ensemble, PreservesOrderAndReportsBlowUps) {
    const auto m = parse_hamiltonian("0.5*p1^2 - u^2", 1.0);
    std::vector<ContactState> init;
    for (int i = 0; i < 12; ++i) init.push_back({{0.0, 0.0}, {0.0, 0.0}, 0.1 * i});
    StepControl s;
    const auto out = integrate_ensemble(m, init, 5.0, s, 4);
    ASSERT_EQ(out.size(), init.size());
    for (int i = 0; i < 12; ++i) {
        EXPECT_EQ(out[i].trajectory.states.front().u, 0.1 * i);
        if (i >= 3) {
            ASSERT_TRUE(out[i].blowup_time.has_value()) << i;
            EXPECT_NEAR(*out[i].blowup_time, 1.0 / (0.1 * i), 2e-3);
        } else {
            EXPECT_FALSE(out[i].blowup_time.has_value()) << i;
        }
    }
}

TEST(TrajectoryCsv, HeaderAndRows) {
    const auto m = parse_hamiltonian("u+0.5*p1^2");
    StepControl s;
    s.h0 = 0.5;
    const auto tr = integrate(m, {{0.0, 0.0}, {1.0, 0.0}, 0.0}, 1.0, s);
    std::stringstream ss;
    write_trajectory_csv(ss, tr, 1);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "t,x1,p1,u,H,winding1");
    std::getline(ss, line);
    EXPECT_EQ(line, "0,0,1,0,0.5,0");
    int rows = 1;
    while (std::getline(ss, line)) ++rows;
    EXPECT_EQ(rows, 3);
}

}  // namespace
}  // namespace chj
