#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "spwell/discretization.hpp"
#include "spwell/poisson.hpp"
#include "spwell/sobolev.hpp"

using namespace spwell;

namespace {
constexpr double kPi = std::numbers::pi;

Field unit_ball_charge(GridPtr g) {
    // u with u² = 1 on r <= 1
    return Field::sample(g, [](const Point& x) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return r <= 1.0 ? 1.0 : 0.0;
    });
}

double interp_radial(const Field& f, double r) {
    const Grid& g = f.grid();
    const double t = r / g.h();
    const int j = std::min(static_cast<int>(t), g.n() - 2);
    const double frac = t - j;
    return (1.0 - frac) * f[j] + frac * f[j + 1];
}
} // namespace

TEST_CASE("solve_ball: zero charge, closed-form radial oracle, identity") {
    auto g = Grid::radial(4.0, 2049);
    Field zero(g, 0.0);
    auto s0 = solve_ball(zero);
    CHECK(s0.phi.max_abs() == 0.0);

    Field u = unit_ball_charge(g);
    auto s = solve_ball(u);
    CHECK(s.residual <= 1e-10);
    // free-space profile 1/2 - r²/6 inside, 1/(3r) outside, shifted by -1/(3k)
    const double shift = 1.0 / (3.0 * 4.0);
    CHECK(interp_radial(s.phi, 0.0) == Catch::Approx(0.5 - shift).epsilon(1e-2));
    CHECK(interp_radial(s.phi, 1.0) == Catch::Approx(1.0 / 3.0 - shift).epsilon(1e-2));
    CHECK(interp_radial(s.phi, 2.0) == Catch::Approx(1.0 / 6.0 - shift).epsilon(1e-2));
    CHECK(s.identity_gap() <= 1e-8 * s.grad_energy);
    CHECK(s.phi.min_value() >= 0.0);
}

TEST_CASE("solve_ball on box3d: identity and positivity") {
    auto g = Grid::box3d(4.0, 33);
    Field u = unit_ball_charge(g);
    auto s = solve_ball(u);
    CHECK(s.residual <= 1e-10);
    CHECK(s.identity_gap() <= 1e-8 * s.grad_energy);
    CHECK(s.phi.min_value() >= 0.0);
    // center value vs the shifted closed form, coarse grid tolerance
    const std::size_t c = g->index((g->n() - 1) / 2, (g->n() - 1) / 2, (g->n() - 1) / 2);
    CHECK(s.phi[c] == Catch::Approx(0.5 - 1.0 / 12.0).epsilon(5e-2));
}

TEST_CASE("solve_free: uniform ball charge and Gaussian far field") {
    auto g = Grid::radial(4.0, 1024);
    Field u = unit_ball_charge(g);
    auto s = solve_free(u);
    CHECK(interp_radial(s.phi, 0.0) == Catch::Approx(0.5).epsilon(5e-3));
    CHECK(interp_radial(s.phi, 1.0) == Catch::Approx(1.0 / 3.0).epsilon(5e-3));
    CHECK(interp_radial(s.phi, 3.0) == Catch::Approx(1.0 / 9.0).epsilon(5e-3));

    Field zero(g, 0.0);
    CHECK(solve_free(zero).phi.max_abs() == 0.0);

    auto g8 = Grid::radial(8.0, 2048);
    Field gauss = Field::sample(g8, [](const Point& x) { return std::exp(-x[0] * x[0] / 2.0); });
    auto sf = solve_free(gauss);
    const double q = std::pow(kPi, 1.5); // ∫ e^{-r²}
    const double r_far = 7.0;
    CHECK(4.0 * kPi * r_far * interp_radial(sf.phi, r_far) == Catch::Approx(q).epsilon(1e-3));
    CHECK_THROWS_AS(solve_free(Field(Grid::box3d(2.0, 16), 0.0)), std::invalid_argument);
}

TEST_CASE("phi is nonnegative and monotone in the charge") {
    auto g = Grid::radial(4.0, 513);
    std::mt19937_64 rng(17);
    for (int it = 0; it < 10; ++it) {
        Field u = random_bump_field(g, rng);
        auto s = solve_ball(u);
        CHECK(s.phi.min_value() >= 0.0);
    }
    // nested bumps: u1² <= u2² pointwise implies phi1 <= phi2 pointwise
    Field u1 = Field::sample(g, [](const Point& x) {
        const double r = x[0];
        return r < 1.0 ? 1.0 - r * r : 0.0;
    });
    Field u2 = Field::sample(g, [](const Point& x) {
        const double r = x[0];
        return r < 2.0 ? 2.0 - r * r / 2.0 : 0.0;
    });
    auto s1 = solve_ball(u1), s2 = solve_ball(u2);
    for (int i = 0; i < g->n(); ++i) CHECK(s1.phi[i] <= s2.phi[i] + 1e-12);
}

TEST_CASE("ball-to-free convergence is O(1/k) and decreasing") {
    double prev = std::numeric_limits<double>::infinity();
    Field base; // u supported in B_2
    for (double k : {4.0, 8.0, 16.0}) {
        const int n = static_cast<int>(k * 256) + 1;
        auto g = Grid::radial(k, n);
        Field u = Field::sample(g, [](const Point& x) {
            const double r = x[0];
            return r < 2.0 ? std::pow(1.0 - r * r / 4.0, 2) : 0.0;
        });
        auto sb = solve_ball(u);
        auto sf = solve_free(u);
        double gap = 0.0;
        for (int i = 0; i < g->n(); ++i) gap = std::max(gap, std::abs(sb.phi[i] - sf.phi[i]));
        const double q = total_charge(u);
        CHECK(gap <= 1.05 * q / (4.0 * kPi * k)); // the monopole shift, with slack
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("CG non-convergence raises a diagnostic error") {
    auto g = Grid::box3d(2.0, 24);
    Field u = unit_ball_charge(g);
    BallPoisson op(g, {}, 1e-10, /*max_iter_factor=*/0);
    bool threw = false;
    try {
        op.solve(u);
    } catch (const PoissonError& e) {
        threw = true;
        CHECK(e.residual > 0.0);
    }
    CHECK(threw);
}

TEST_CASE("estimate_s0: grid stability, scale invariance, classical value") {
    auto g1 = Grid::radial(320.0, 8192);
    auto g2 = Grid::radial(320.0, 16384);
    const double s1 = estimate_s0(g1);
    const double s2 = estimate_s0(g2);
    CHECK(std::abs(s1 - s2) / s2 < 5e-3);
    for (double sigma : {0.5, 2.0})
        CHECK(std::abs(estimate_s0(g2, sigma) - s2) / s2 < 1e-2);
    const double classical = 3.0 * std::pow(kPi / 2.0, 4.0 / 3.0);
    CHECK(s2 >= classical * (1.0 - 1e-9)); // from above
    CHECK(std::abs(s2 - classical) / classical < 1e-2);
    // convergence from above in k
    CHECK(estimate_s0(Grid::radial(160.0, 8192)) >= s2 * (1.0 - 1e-9));
}

TEST_CASE("verify_poisson_bounds: trivial, strict, and random-bump pass rate") {
    auto g = Grid::radial(6.0, 1024);
    const double s0 = estimate_s0(Grid::radial(160.0, 8192));

    Field zero(g, 0.0);
    auto sz = solve_ball(zero);
    for (const auto& c : verify_poisson_bounds(zero, sz, s0)) CHECK(c.pass);

    Field u = unit_ball_charge(g);
    auto s = solve_ball(u);
    for (const auto& c : verify_poisson_bounds(u, s, s0)) {
        CHECK(c.pass);
        CHECK(c.margin > 0.0);
    }

    std::mt19937_64 rng(23);
    int passes = 0;
    for (int it = 0; it < 20; ++it) {
        Field b = random_bump_field(g, rng);
        auto sb = solve_ball(b);
        auto checks = verify_poisson_bounds(b, sb, s0);
        if (checks[0].pass && checks[1].pass) ++passes;
    }
    CHECK(passes == 20);
}

TEST_CASE("estimate_sobolev_h1 is sane across q") {
    // quotient is positive and grows with q on (2,6) reference states
    const double s24 = estimate_sobolev_h1(2.4);
    const double s4 = estimate_sobolev_h1(4.0);
    CHECK(s24 > 0.0);
    CHECK(s4 > 0.0);
    // reproducibility
    CHECK(estimate_sobolev_h1(4.0) == s4);
}
