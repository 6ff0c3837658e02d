#include "crashrobust/backward_solvers.hpp"
#include "crashrobust/presets.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace crashrobust;

namespace {

const ValueSurface& surface_a() {
    static const ValueSurface vs = solve_pde(preset("a"), SolverConfig{});
    return vs;
}

} // namespace

TEST(SolveOde, TerminalAndFirstStep) {
    const auto c = frozen_at(preset("c"), 0.014);
    const auto v = solve_ode_constant(c, 0.014, 1000);
    ASSERT_EQ(v.size(), 1001u);
    EXPECT_EQ(v.back(), 0.0);
    const double h = 0.005;
    // v(T - h) = f(0) h + f'(0) f(0) h^2 / 2 + O(h^3), f'(0) = -lambda / l_woc = -0.07
    EXPECT_NEAR(v[999], 0.04375 * h, 2e-3 * h);
    EXPECT_NEAR(v[999], 0.04375 * h - 0.07 * 0.04375 * h * h / 2.0, 1e-10);
}

TEST(SolveOde, RefinementChangeBelowTolerance) {
    const auto c = frozen_at(preset("c"), 0.014);
    const auto coarse = solve_ode_constant(c, 0.014, 1000);
    const auto fine = solve_ode_constant(c, 0.014, 2000);
    EXPECT_LT(std::abs(coarse[0] - fine[0]), 1e-8);
}

TEST(SolveOde, RejectsHugeGenerator) {
    EXPECT_THROW(solve_ode([](double) { return 2e6; }, 1.0, 10), std::runtime_error);
}

TEST(SolvePde, TerminalRowIsZero) {
    const auto& vs = surface_a();
    for (std::size_t j = 0; j < vs.v.cols(); ++j) EXPECT_EQ(vs.v(vs.v.rows() - 1, j), 0.0);
}

TEST(SolvePde, FrozenPresetMatchesOde) {
    const auto c = frozen_at(preset("c"), 0.014);
    const auto vs = solve_pde(c, SolverConfig{});
    const auto ode = solve_ode_constant(c, 0.014, 1000);
    double err = 0.0;
    for (std::size_t i = 0; i < vs.v.rows(); ++i)
        for (std::size_t j = 0; j < vs.v.cols(); ++j) err = std::max(err, std::abs(vs.v(i, j) - ode[i]));
    EXPECT_LT(err, 1e-4);
}

TEST(SolvePde, StructuralInvariantsModelA) {
    const auto& vs = surface_a();
    const auto ps = policy_surface(vs, 0.5);
    for (std::size_t i = 0; i < vs.v.rows(); ++i)
        for (std::size_t j = 0; j < vs.v.cols(); ++j) {
            ASSERT_GE(vs.v(i, j), -1e-12);
            ASSERT_TRUE(std::isfinite(vs.v(i, j)));
            if (i + 1 < vs.v.rows()) {
                ASSERT_GE(vs.v(i, j), vs.v(i + 1, j) - 1e-9);
            }
            ASSERT_GE(ps.pi(i, j), 0.0);
            ASSERT_LT(ps.pi(i, j), 2.0);
        }
    EXPECT_LT(vs.max_picard_residual, 1e-5);
}

TEST(SolvePde, KimOmbergUsesOuGrid) {
    const auto ko = preset("ko");
    const auto g = SolverConfig{}.grid_for(ko.factor);
    const double sd = 0.3 / std::sqrt(7.0);
    EXPECT_NEAR(g.x_min, 0.014 - 6.0 * sd, 1e-15);
    EXPECT_NEAR(g.x_max, 0.014 + 6.0 * sd, 1e-15);
    SolverConfig cfg;
    cfg.n_t = 200;
    cfg.n_x = 100;
    const auto vs = solve_pde(ko, cfg);
    EXPECT_GT(eval_value(vs, 0.0, 0.014).value, 0.0);
}

TEST(SpaceGrid, DefaultCirDomain) {
    const auto g = default_space_grid(preset("a").factor, 200);
    EXPECT_EQ(g.x_min, 0.0);
    EXPECT_NEAR(g.x_max, 0.12, 1e-15);
    EXPECT_EQ(g.size(), 201u);
    EXPECT_THROW((SpaceGrid{0.1, 0.1, 10}.validate()), std::invalid_argument);
}

TEST(SolverConfig, Validation) {
    SolverConfig cfg;
    cfg.n_t = 1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.theta_weight = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.picard_iters = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(PolicySurface, TransformProperties) {
    ValueSurface vs{uniform_grid(1.0, 4), {0.0, 1.0, 4}, Matrix(5, 5, 0.0)};
    auto ps = policy_surface(vs, 0.5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(ps.pi(i, j), 0.0);
    const auto& a = surface_a();
    const auto pa = policy_surface(a, 0.5);
    for (std::size_t j = 0; j < a.v.cols(); ++j) EXPECT_EQ(pa.pi(a.v.rows() - 1, j), 0.0);
    for (std::size_t j = 1; j < a.v.cols(); ++j)
        if (a.v(0, j) > a.v(0, j - 1)) {
            EXPECT_GT(pa.pi(0, j), pa.pi(0, j - 1));
        }
}

TEST(EvalPolicy, InterpolationContract) {
    PolicySurface ps{uniform_grid(1.0, 2), {0.0, 1.0, 2}, Matrix(3, 3)};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) ps.pi(i, j) = static_cast<double>(3 * i + j) + 0.1 * (i * j);
    EXPECT_EQ(eval_policy(ps, 0.5, 0.5).value, ps.pi(1, 1));
    EXPECT_FALSE(eval_policy(ps, 0.5, 0.5).clamped);
    const double mid = 0.25 * (ps.pi(0, 0) + ps.pi(0, 1) + ps.pi(1, 0) + ps.pi(1, 1));
    EXPECT_NEAR(eval_policy(ps, 0.25, 0.25).value, mid, 1e-15);
    const auto out = eval_policy(ps, 1.0, 2.0);
    EXPECT_TRUE(out.clamped);
    EXPECT_EQ(out.value, ps.pi(2, 2));
}

TEST(DxSurface, ExactCases) {
    const SpaceGrid g{0.0, 1.0, 10};
    ValueSurface c{uniform_grid(1.0, 2), g, Matrix(3, 11, 0.7)};
    const auto dc = dx_surface(c);
    for (std::size_t j = 0; j < 11; ++j) EXPECT_EQ(dc(1, j), 0.0);
    ValueSurface ramp{uniform_grid(1.0, 2), g, Matrix(3, 11)};
    ValueSurface quad = ramp;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 11; ++j) {
            ramp.v(i, j) = g.node(j);
            quad.v(i, j) = g.node(j) * g.node(j);
        }
    const auto dr = dx_surface(ramp), dq = dx_surface(quad);
    for (std::size_t j = 0; j < 11; ++j) EXPECT_NEAR(dr(0, j), 1.0, 1e-12);
    for (std::size_t j = 1; j < 10; ++j) EXPECT_NEAR(dq(0, j), 2.0 * g.node(j), 1e-12);
}

TEST(SurfaceCsv, LongFormat) {
    ValueSurface vs{uniform_grid(1.0, 2), {0.0, 1.0, 2}, Matrix(3, 3, 0.0)};
    std::ostringstream os;
    write_csv(os, vs);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,x,v");
    std::getline(in, line);
    EXPECT_EQ(line, "0,0,0");
    std::size_t rows = 1;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 9u);
}
