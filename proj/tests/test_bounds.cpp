#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spwell/bounds.hpp"
#include "spwell/constants.hpp"
#include "spwell/solver.hpp"

using namespace spwell;

TEST_CASE("constants: spot values reproduce exactly") {
    CHECK(pointwise_cp(1.5) == 0.25);
    CHECK(nonexistence_threshold(1.5) == 0.015625);
    CHECK(sup_constant_statement(1.5, 0.01) == 421875.0 / 256.0);
    CHECK(sup_constant_barrier(1.5, 0.01) == 421875.0 / 256.0);
    CHECK(mu1_threshold(1.5, 0.01) ==
          Catch::Approx(std::sqrt(421875.0 / 256.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("constants: the two sup-constant forms agree on a 50x50 grid") {
    // p sampled on (1, 1.9]: toward p = 2 the constant exceeds the double
    // range (it blows up like [p(p-1)/lambda]^{p/(2-p)})
    for (int i = 0; i < 50; ++i) {
        const double p = 1.0 + 0.9 * (i + 1) / 50.0;
        const double cp = nonexistence_threshold(p);
        for (int j = 0; j < 50; ++j) {
            const double lambda = cp * (j + 1) / 50.0; // (0, c(p)]
            const double a = sup_constant_statement(p, lambda);
            const double b = sup_constant_barrier(p, lambda);
            REQUIRE(std::isfinite(a));
            REQUIRE(std::abs(a - b) <= 1e-12 * a);
        }
    }
}

TEST_CASE("constants: C_{p,lambda} > 1 below the nonexistence threshold") {
    for (int i = 0; i < 20; ++i) {
        const double p = 1.0 + (i + 0.5) / 20.0;
        const double cp = nonexistence_threshold(p);
        for (double frac : {0.1, 0.5, 0.99})
            CHECK(sup_constant_statement(p, frac * cp) > 1.0);
    }
}

TEST_CASE("barrier inequality: t + c_p t^2 - t^p >= 0 on [0,100]") {
    for (double p : {1.1, 1.3, 1.5, 1.7, 1.9}) {
        const double cp = pointwise_cp(p);
        for (int i = 0; i <= 10000; ++i) {
            const double t = 100.0 * i / 10000.0;
            REQUIRE(t + cp * t * t - std::pow(t, p) >= -1e-12 * (1.0 + t * t));
        }
    }
}

TEST_CASE("max identity: max(t^p - (lambda/c_p)t^2) equals C_{p,lambda}") {
    // golden-section oracle
    for (double p : {1.3, 1.5, 1.8}) {
        for (double lambda : {0.001, 0.005, 0.012}) {
            const double cp = pointwise_cp(p);
            auto f = [&](double t) { return std::pow(t, p) - lambda / cp * t * t; };
            double a = 0.0, b = 1.0;
            while (f(b * 2.0) > f(b)) b *= 2.0; // bracket the max
            b *= 2.0;
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
            for (int it = 0; it < 300; ++it) {
                if (f(c1) < f(c2)) {
                    a = c1;
                    c1 = c2;
                    c2 = a + gr * (b - a);
                } else {
                    b = c2;
                    c2 = c1;
                    c1 = b - gr * (b - a);
                }
            }
            const double oracle = f(0.5 * (a + b));
            const double closed = sup_constant_barrier(p, lambda);
            CHECK(std::abs(oracle - closed) <= 1e-10 * closed);
        }
    }
}

TEST_CASE("moser constants: spot values and ladder convergence") {
    MoserConstants m = moser_constants(3.0);
    CHECK(m.beta0 == 3.0);
    CHECK(m.delta == Catch::Approx(0.375).epsilon(1e-15));
    CHECK(m.gamma == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m.f_inf == Catch::Approx(0.585).epsilon(1e-12));
    CHECK(m.g_inf == Catch::Approx(0.225).epsilon(1e-12));

    for (double p : {1.5, 3.0, 4.0}) {
        MoserConstants mc = moser_constants(p);
        CHECK(mc.delta > 0.0);
        CHECK(mc.delta < 1.0);
        CHECK(std::abs(mc.f_of(40) - mc.f_inf) < 1e-10);
        CHECK(std::abs(mc.g_of(40) - mc.g_inf) < 1e-10);
        // radii decrease to r1/2
        const double r1 = mc.r1_of(1.0);
        double prev = MoserConstants::radius_of(2, r1);
        CHECK(prev < r1);
        for (int i = 3; i <= 40; ++i) {
            const double ri = MoserConstants::radius_of(i, r1);
            CHECK(ri < prev);
            prev = ri;
        }
        CHECK(prev == Catch::Approx(r1 / 2.0).epsilon(1e-10));
    }
}

TEST_CASE("moser: delta stays in (0,1) across the p range") {
    for (int i = 1; i < 40; ++i) {
        const double p = 1.0 + 4.0 * i / 40.0;
        MoserConstants m = moser_constants(p);
        CHECK(m.delta > 0.0);
        CHECK(m.delta < 1.0);
    }
}

TEST_CASE("moser: C1/C2 majorize the tight bound") {
    const double s0 = 5.5;
    for (double p : {1.5, 3.0, 4.5}) {
        MoserConstants m = moser_constants(p, s0);
        REQUIRE(m.c1.has_value());
        for (double a : {0.01, 0.1, 1.0, 3.0, 10.0, 100.0})
            CHECK(m.bound_tight(a) <= m.bound_c1c2(a) * (1.0 + 1e-12));
    }
}

TEST_CASE("moser_bound: scaling sanity and solver-output check") {
    auto grid = Grid::radial(6.0, 768);
    Well well = Well::ball({0, 0, 0}, 1.0);
    Params prm{3.0, 1.0, 50.0};
    EnergyModel model(grid, well, prm);
    Solution s = mountain_pass(model);
    REQUIRE(s.status == SolveStatus::converged);
    const double s0 = estimate_s0(Grid::radial(160.0, 8192));

    BoundCheck check = moser_bound(s.u, prm, s0);
    CHECK(check.pass);

    Field doubled = s.u;
    doubled *= 2.0;
    BoundCheck check2 = moser_bound(doubled, prm, s0);
    CHECK(check2.pass);
    CHECK(check2.lhs == Catch::Approx(2.0 * check.lhs));

    Field zero(grid);
    CHECK_THROWS_AS(moser_bound(zero, prm, s0), std::invalid_argument);
}

TEST_CASE("check_pointwise: zero field, corrupted spike fails") {
    auto grid = Grid::radial(5.0, 640);
    Well well = Well::ball({0, 0, 0}, 4.0);
    Params prm{1.5, 0.01, 100.0};
    EnergyModel model(grid, well, prm);

    Field zero(grid);
    Field phi0(grid);
    for (const auto& c : check_pointwise(zero, phi0, prm)) {
        CHECK(c.pass);
        CHECK(c.margin >= 0.0);
    }

    Solution s = mountain_pass(model);
    REQUIRE(s.status == SolveStatus::converged);
    auto good = check_pointwise(s.u, s.phi, prm);
    CHECK(good[0].pass);
    CHECK(good[1].pass);

    Field bad = s.u;
    std::size_t spike = 0;
    for (std::size_t i = 0; i < bad.size(); ++i)
        if (std::abs(bad[i]) > std::abs(bad[spike])) spike = i;
    bad[spike] *= 10.0;
    auto checks = check_pointwise(bad, s.phi, prm);
    CHECK_FALSE(checks[0].pass); // |u| <= c_p phi violated at the spike

    Params wrong{3.0, 1.0, 50.0};
    CHECK_THROWS_AS(check_pointwise(s.u, s.phi, wrong), std::invalid_argument);
}

TEST_CASE("decay_fit: synthetic exact profile is recovered") {
    auto grid = Grid::radial(10.0, 2048);
    Params prm{3.0, 1.0, 100.0};
    const double r0 = 1.2;
    const double rate = 0.5 * std::sqrt(prm.mu);
    Field u = Field::sample(grid, [&](const Point& x) {
        const double r = x[0];
        return r > 0.5 ? std::pow(r, -0.5) * std::exp(-rate * (r - r0)) : 1.0;
    });
    DecayFit fit = decay_fit(u, prm, r0);
    CHECK(fit.amplitude == Catch::Approx(1.0).epsilon(1e-6));
    CHECK(fit.slope == Catch::Approx(-rate).epsilon(1e-6));
    CHECK(fit.check.pass);

    // window too small
    auto tiny = Grid::radial(3.0, 128);
    Field ut = Field::sample(tiny, [&](const Point& x) { return std::exp(-x[0]); });
    CHECK_THROWS_AS(decay_fit(ut, prm, 1.2), std::invalid_argument);

    // nonpositive inside the window
    Field neg = u;
    for (std::size_t i = 0; i < neg.size(); ++i)
        if (grid->radius(i) > 2.0 && grid->radius(i) < 2.5) neg[i] = -neg[i];
    CHECK_THROWS_AS(decay_fit(neg, prm, r0), std::invalid_argument);
}

TEST_CASE("tail_mass: compact support, monotone in R, R guard") {
    auto grid = Grid::radial(8.0, 1024);
    Field u = Field::sample(grid, [](const Point& x) {
        const double r = x[0];
        return r < 2.0 ? std::pow(1.0 - r * r / 4.0, 2) : 0.0;
    });
    CHECK(tail_mass(u, 3.0) == 0.0);
    double prev = tail_mass(u, 0.5);
    for (double R : {1.0, 1.5, 1.9}) {
        const double t = tail_mass(u, R);
        CHECK(t <= prev);
        prev = t;
    }
    CHECK(tail_mass(u, 1.0) > 0.0);
    CHECK_THROWS_AS(tail_mass(u, 9.0), std::invalid_argument);
}

TEST_CASE("limit_problem_residual: zero field and masking guard") {
    auto grid = Grid::radial(6.0, 768);
    Well well = Well::ball({0, 0, 0}, 1.0);
    Params prm{3.0, 1.0, 0.0};
    Field zero(grid);
    CHECK(limit_problem_residual(zero, well, prm) == 0.0);
}

TEST_CASE("constant set assembles regime-appropriate entries") {
    Params sub{1.5, 0.01, 100.0};
    ConstantInputs in;
    in.s0 = 5.5;
    in.s_q125 = estimate_sobolev_h1(12.0 / 5.0);
    in.well_r1 = 4.25;
    ConstantSet cs = constants(sub, in);
    REQUIRE(cs.c_p.has_value());
    CHECK(*cs.c_p == 0.25);
    REQUIRE(cs.mu1.has_value());
    CHECK(*cs.mu1 == Catch::Approx(39.5948).epsilon(1e-4));
    REQUIRE(cs.m_mu.has_value());
    CHECK(*cs.m_mu > 0.0);
    REQUIRE(cs.mu0.has_value());

    Params sup{3.0, 1.0, 50.0};
    ConstantInputs in2;
    in2.s0 = 5.5;
    in2.s_q125 = in.s_q125;
    in2.c_lambda_upper = 260.0;
    ConstantSet cs2 = constants(sup, in2);
    CHECK_FALSE(cs2.c_p.has_value());
    REQUIRE(cs2.m0.has_value());
    REQUIRE(cs2.mu2.has_value());
    CHECK(*cs2.mu2 == Catch::Approx(*cs2.m0 * *cs2.m0 - 1.0).epsilon(1e-12));
    REQUIRE(cs2.m_lambda.has_value());
}

TEST_CASE("subquadratic M_mu bound dominates the measured norms") {
    auto grid = Grid::radial(5.0, 640);
    Well well = Well::ball({0, 0, 0}, 4.0);
    Params prm{1.5, 0.01, 100.0};
    EnergyModel model(grid, well, prm);
    Solution s = mountain_pass(model);
    REQUIRE(s.status == SolveStatus::converged);

    ConstantInputs in;
    in.well_r1 = well.radius_where_g_exceeds(1.0);
    ConstantSet cs = constants(prm, in);
    REQUIRE(cs.mu1.has_value());
    REQUIRE(prm.mu > *cs.mu1);
    REQUIRE(cs.m_mu.has_value());
    PoissonSolution phi = model.hartree(s.u);
    CHECK(s.dv_norm + std::sqrt(phi.coupling) <= *cs.m_mu);
}

TEST_CASE("measured norms sit below the reported M bounds") {
    auto grid = Grid::radial(6.0, 768);
    Well well = Well::ball({0, 0, 0}, 1.0);
    Params prm{3.0, 1.0, 50.0};
    EnergyModel model(grid, well, prm);
    Solution s = mountain_pass(model);
    REQUIRE(s.status == SolveStatus::converged);

    ConstantInputs in;
    in.s0 = estimate_s0(Grid::radial(160.0, 8192));
    in.s_q125 = estimate_sobolev_h1(12.0 / 5.0);
    in.c_lambda_upper = s.level_upper;
    ConstantSet cs = constants(prm, in);
    REQUIRE(cs.m0.has_value());
    REQUIRE(cs.m_lambda.has_value());
    CHECK(s.u.max_abs() <= *cs.m0);
    const double grad_phi = std::sqrt(grid->dirichlet_form(s.phi.values(), s.phi.values()));
    CHECK(s.dv_norm + grad_phi <= *cs.m_lambda);
}
