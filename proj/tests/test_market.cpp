#include "crashrobust/backward_solvers.hpp"
#include "crashrobust/market.hpp"
#include "crashrobust/presets.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace crashrobust;

TEST(Phi, ZeroAllocationGivesRate) {
    for (auto name : presets::names) {
        auto m = preset(name);
        m.r = 0.03;
        EXPECT_DOUBLE_EQ(phi(m, 0.02, 0.0), 0.03) << name;
    }
}

TEST(Phi, PresetValues) {
    EXPECT_NEAR(phi(preset("c"), 0.014, 2.5), 0.04375, 1e-15);
    // 0.435 * 2.5 - 0.04375 + log(0.5)
    EXPECT_NEAR(phi(preset("b"), 0.014, 2.5), 0.3506028, 1e-7);
    EXPECT_NEAR(preset("b").lambda(0.014), 0.435, 1e-15);
    EXPECT_THROW(phi(preset("b"), 0.014, 5.1), std::domain_error);
}

TEST(Phi, StrictlyConcave) {
    for (auto name : presets::names) {
        const auto m = preset(name);
        for (double x : {0.005, 0.014, 0.05}) {
            const double h = 0.01;
            for (double y = h; y < 4.9 - h; y += 0.05) {
                const double d2 = phi(m, x, y + h) - 2.0 * phi(m, x, y) + phi(m, x, y - h);
                EXPECT_LE(d2, 1e-9) << name << " x=" << x << " y=" << y;
            }
        }
    }
}

TEST(Generator, Examples) {
    EXPECT_NEAR(generator(preset("c"), 0.014, 0.0), 0.04375, 1e-15);
    EXPECT_NEAR(generator(preset("b"), 0.014, 0.0), 0.3506028, 1e-7);
    // ko at x = theta: pi^M = lambda / sigma^2 = 1 < 1/l_woc
    const auto ko = preset("ko");
    EXPECT_NEAR(merton_strategy(ko, 0.014), 1.0, 1e-14);
    EXPECT_NEAR(generator(ko, 0.014, strategy_to_exposure(1.0, 0.5)), 0.0, 1e-15);
}

TEST(Generator, NonnegativeOnSolverGrid) {
    for (auto name : presets::names) {
        const auto m = preset(name);
        const auto g = SolverConfig{}.grid_for(m.factor);
        for (std::size_t j = 1; j < g.size(); ++j) {
            const GeneratorAtPoint f(m, g.node(j));
            for (double y = 0.0; y <= 8.0; y += 0.02) EXPECT_GE(f(y), -1e-12) << name << " " << g.node(j) << " " << y;
        }
    }
}

TEST(Generator, GrowthDecomposition) {
    const auto m = preset("a");
    const GeneratorAtPoint g(m, 0.02);
    for (double y : {0.0, 0.3, 1.0, 2.0}) {
        const double p = exposure_to_strategy(y, 0.5);
        EXPECT_NEAR(g(y), g.optimal_growth() - g.growth(p), 1e-15);
        EXPECT_NEAR(g.growth(p), phi(m, 0.02, p) - m.r, 1e-15);
    }
    EXPECT_NEAR(g.merton(), 2.5, 1e-8);
}

TEST(ExposureTransform, Examples) {
    EXPECT_EQ(exposure_to_strategy(0.0, 0.5), 0.0);
    EXPECT_EQ(exposure_to_strategy(-1.0, 0.5), 0.0);
    EXPECT_NEAR(exposure_to_strategy(std::log(2.0), 0.5), 1.0, 1e-15);
    EXPECT_LT(exposure_to_strategy(700.0, 0.5), 2.0 + 1e-15);
    EXPECT_NEAR(exposure_to_strategy(40.0, 0.5), 2.0, 1e-15);
    EXPECT_EQ(strategy_to_exposure(0.0, 0.5), 0.0);
    EXPECT_NEAR(strategy_to_exposure(1.0, 0.5), std::log(2.0), 1e-15);
    EXPECT_THROW(strategy_to_exposure(2.0, 0.5), std::domain_error);
    EXPECT_THROW(strategy_to_exposure(-0.1, 0.5), std::domain_error);
}

TEST(ExposureTransform, RoundTripAndMonotone) {
    double prev = -1.0;
    for (int i = 0; i < 100; ++i) {
        const double pi = oracle::uniform(0.0, 1.999);
        EXPECT_NEAR(exposure_to_strategy(strategy_to_exposure(pi, 0.5), 0.5), pi, 1e-12);
    }
    for (double y = -1.0; y < 20.0; y += 0.01) {
        const double p = exposure_to_strategy(y, 0.5);
        EXPECT_GE(p, prev);
        EXPECT_LT(p, 2.0);
        prev = p;
    }
}

TEST(Conditions, ModelA) {
    const auto rep = check_conditions(preset("a"));
    EXPECT_NEAR(rep.feller_index, 1.5325, 1e-4);
    EXPECT_TRUE(rep.feller_satisfied);
    EXPECT_NEAR(rep.exp_moment_threshold, 2.0 * 3.99 / 0.0729, 1e-12);
    EXPECT_NEAR(rep.exp_moment_threshold, 109.465, 1e-3);
    EXPECT_DOUBLE_EQ(rep.admissible_cap, 2.0);
    EXPECT_TRUE(rep.alpha_exceeds_cap);
    EXPECT_TRUE(rep.crash_ordering_ok);
    EXPECT_NE(rep.to_text().find("feller_index = 1.5325"), std::string::npos);
}

TEST(Conditions, KimOmbergHasNoFellerIndex) {
    const auto rep = check_conditions(preset("ko"));
    EXPECT_TRUE(std::isnan(rep.feller_index));
    EXPECT_TRUE(std::isinf(rep.exp_moment_threshold));
    EXPECT_NEAR(rep.stationary_sd, 0.3 / std::sqrt(7.0), 1e-15);
}

TEST(ModelSpec, ValidationMessages) {
    auto m = preset("a");
    m.factor.kappa = -1.0;
    try {
        m.validate();
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "kappa must be > 0");
    }
    m = preset("a");
    m.crash.l_levy_max = 0.6;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = preset("a");
    m.measure = JumpMeasure::reciprocal(0.3);
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = preset("a");
    m.rho = 1.5;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = preset("ko");
    m.coeffs.sigma_sq_kind = SigmaSqKind::sqrt_vol;
    EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(Presets, RegistryValues) {
    const auto a = preset("a");
    EXPECT_EQ(a.factor.kind, FactorKind::cir);
    EXPECT_EQ(a.factor.kappa, 3.99);
    EXPECT_EQ(a.factor.theta, 0.014);
    EXPECT_EQ(a.factor.varsigma, 0.27);
    EXPECT_EQ(a.factor.z0, 0.014);
    EXPECT_EQ(a.horizon, 5.0);
    EXPECT_EQ(a.crash.l_woc, 0.5);
    EXPECT_EQ(a.crash.l_levy_max, 0.2);
    EXPECT_EQ(a.measure, JumpMeasure::reciprocal(0.2));
    EXPECT_NEAR(a.lambda(0.014), 0.014 * 2.5 - std::log(1.0 - 2.5 * 0.2) / 2.5, 1e-15);
    EXPECT_EQ(preset("b").measure, JumpMeasure::atom(0.2));
    EXPECT_NEAR(preset("b").lambda(0.03), 0.03 * 2.5 + 0.2 / (1.0 - 2.5 * 0.2), 1e-15);
    EXPECT_NEAR(preset("c").lambda(0.03), 0.075, 1e-15);
    EXPECT_NEAR(preset("d").lambda(0.03), 0.035, 1e-15);
    EXPECT_NEAR(merton_strategy(preset("d"), 0.014 / 2.0), 5.0, 1e-12);
    const auto ko = preset("ko");
    EXPECT_EQ(ko.factor.kind, FactorKind::ou);
    EXPECT_EQ(ko.factor.kappa, 3.5);
    EXPECT_EQ(ko.factor.varsigma, 0.3);
    EXPECT_EQ(ko.sigma_sq(0.5), 0.014);
    EXPECT_EQ(ko.lambda(-0.02), -0.02);
    EXPECT_THROW(preset("e"), std::invalid_argument);
    for (auto n : {"a", "b", "c"}) EXPECT_NEAR(merton_strategy(preset(n), 0.031), 2.5, 1e-8) << n;
}

TEST(FrozenAt, ConstantCoefficients) {
    const auto f = frozen_at(preset("a"), 0.014);
    EXPECT_EQ(f.sigma_sq(0.5), 0.014);
    EXPECT_NEAR(f.lambda(0.5), preset("a").lambda(0.014), 1e-16);
    EXPECT_EQ(f.factor, preset("a").factor);
    EXPECT_NO_THROW(f.validate());
}
