// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code 0 iff all criteria pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "spwell/bounds.hpp"
#include "spwell/config.hpp"
#include "spwell/report.hpp"
#include "spwell/run.hpp"
#include "spwell/solver.hpp"
#include "spwell/sweeps.hpp"

using namespace spwell;

namespace {

int g_failures = 0;

void criterion(int n, const std::string& name, bool pass, const std::string& detail,
               double seconds) {
    std::printf("[%s] criterion %2d: %-34s %s  (%.1fs)\n", pass ? "PASS" : "FAIL", n,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// ---------------------------------------------------------------- 1
void c1_constants() {
    Timer t;
    bool ok = pointwise_cp(1.5) == 0.25 && nonexistence_threshold(1.5) == 0.015625 &&
              sup_constant_statement(1.5, 0.01) == 421875.0 / 256.0 &&
              sup_constant_barrier(1.5, 0.01) == 421875.0 / 256.0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double p = 1.0 + 0.9 * (i + 1) / 50.0; // away from the p->2 overflow corner
        const double cp = nonexistence_threshold(p);
        for (int j = 0; j < 50; ++j) {
            const double lambda = cp * (j + 1) / 50.0;
            const double a = sup_constant_statement(p, lambda);
            const double b = sup_constant_barrier(p, lambda);
            worst = std::max(worst, std::abs(a - b) / a);
        }
    }
    ok = ok && worst <= 1e-12;
    criterion(1, "constants suite",
              ok, "forms gap " + fmt(worst) + " <= 1e-12; spot values exact", t.seconds());
}

// ---------------------------------------------------------------- 2
void c2_poisson_oracle(double s0) {
    Timer t;
    auto g = Grid::radial(4.0, 1024);
    Field u = Field::sample(g, [](const Point& x) { return x[0] <= 1.0 ? 1.0 : 0.0; });
    auto sf = solve_free(u);
    auto at = [&](double r) {
        const double s = r / g->h();
        const int j = std::min(static_cast<int>(s), g->n() - 2);
        return (1.0 - (s - j)) * sf.phi[j] + (s - j) * sf.phi[j + 1];
    };
    const double e0 = std::abs(at(0.0) - 0.5) / 0.5;
    const double e1 = std::abs(at(1.0) - 1.0 / 3.0) * 3.0;
    auto sb = solve_ball(u);
    const bool identity = sb.identity_gap() <= 1e-8 * sb.grad_energy;

    std::mt19937_64 rng(20260810);
    int passes = 0;
    for (int i = 0; i < 20; ++i) {
        Field b = random_bump_field(g, rng);
        auto s = solve_ball(b);
        auto cs = verify_poisson_bounds(b, s, s0);
        if (cs[0].pass && cs[1].pass) ++passes;
    }
    const bool ok = e0 < 5e-3 && e1 < 5e-3 && identity && passes == 20;
    criterion(2, "poisson oracle", ok,
              "phi(0) err " + fmt(e0) + ", phi(1) err " + fmt(e1) + ", identity " +
                  (identity ? "ok" : "BAD") + ", L^{12/5} bounds " + std::to_string(passes) + "/20",
              t.seconds());
}

// ---------------------------------------------------------------- 3
void c3_gradient_consistency() {
    Timer t;
    auto g = Grid::radial(5.0, 512);
    Well well = Well::ball({0, 0, 0}, 1.0);
    bool ok = true;
    double worst_ratio = 1e9;
    int second_order_seen = 0;
    for (double p : {1.5, 3.0}) {
        Params prm{p, 0.7, 20.0};
        EnergyModel model(g, well, prm);
        std::mt19937_64 rng(31 + static_cast<int>(10 * p));
        for (int trial = 0; trial < 10; ++trial) {
            Field u = random_bump_field(g, rng);
            Field v = random_bump_field(g, rng);
            const double pairing = model.l2w(model.residual(u).r, v);
            double e_coarse = 0.0;
            for (double eps : {1e-3, 1e-4}) {
                Field up = u, um = u;
                Field step = v;
                step *= eps;
                up += step;
                um -= step;
                const double fd =
                    (model.energy(up).total - model.energy(um).total) / (2.0 * eps);
                const double err = std::abs(fd - pairing);
                ok = ok && err <= 5e-4 * (1.0 + std::abs(pairing));
                if (eps == 1e-3) {
                    e_coarse = err;
                } else if (err < e_coarse / 20.0 + 3e-7) {
                    ++second_order_seen;
                    if (err > 0.0) worst_ratio = std::min(worst_ratio, e_coarse / err);
                }
            }
        }
    }
    ok = ok && second_order_seen == 20;
    criterion(3, "gradient consistency", ok,
              "20/20 pairs second-order (" + std::to_string(second_order_seen) + " observed)",
              t.seconds());
}

// ---------------------------------------------------------------- 4
void c4_supercubic_run(double s0) {
    Timer t;
    auto g = Grid::radial(8.0, 2048);
    Well well = Well::ball({0, 0, 0}, 1.0);
    Params prm{3.0, 1.0, 50.0};
    EnergyModel model(g, well, prm);
    Solution s = mountain_pass(model);
    bool ok = s.status == SolveStatus::converged && s.residual_norm <= 1e-10 &&
              std::abs(s.nehari_gap) <= 1e-6 * s.dv_norm * s.dv_norm && s.energy.total > 0.0 &&
              s.energy.total <= s.level_upper + 1e-8;
    bool moser_ok = false, flow_ok = false;
    double flow_gap = -1.0;
    if (ok) {
        moser_ok = moser_bound(s.u, prm, s0).pass;
        std::mt19937_64 rng(9);
        Field start = s.u;
        Field noise = random_bump_field(g, rng);
        noise *= 0.01 * s.dv_norm / std::sqrt(model.dv(noise, noise));
        start += noise;
        Solution back = gradient_flow(model, start);
        flow_gap = std::abs(back.energy.total - s.energy.total);
        flow_ok = back.status == SolveStatus::converged && flow_gap <= 1e-4;
    }
    ok = ok && moser_ok && flow_ok;
    criterion(4, "supercubic existence run", ok,
              "I=" + fmt(s.energy.total) + " residual=" + fmt(s.residual_norm) + " flow gap=" +
                  fmt(flow_gap),
              t.seconds());
}

// ---------------------------------------------------------------- 5
void c5_subquadratic_run() {
    Timer t;
    auto g = Grid::radial(5.0, 640);
    Well well = Well::ball({0, 0, 0}, 4.0);
    Params prm{1.5, 0.01, 100.0};
    EnergyModel model(g, well, prm);
    Solution s = mountain_pass(model);
    bool ok = s.status == SolveStatus::converged && s.residual_norm <= 1e-10 &&
              std::abs(s.nehari_gap) <= 1e-6 * s.dv_norm * s.dv_norm;
    std::string detail = "status=" + std::string(to_string(s.status));
    if (ok) {
        auto pw = check_pointwise(s.u, s.phi, prm);
        PoissonSolution phi = model.hartree(s.u);
        BoundCheck ps = ps_device_check(s.u, phi, prm);
        ok = pw[0].pass && pw[1].pass && ps.pass;
        detail = "I=" + fmt(s.energy.total) + " |u|_inf=" + fmt(s.u.max_abs()) +
                 " margins: cp_phi=" + fmt(-pw[0].lhs) + " C=" + fmt(-pw[1].lhs) +
                 " ps=" + fmt(ps.margin);
    }
    criterion(5, "subquadratic existence run", ok, detail, t.seconds());
}

// ---------------------------------------------------------------- 6
void c6_nonexistence_probe() {
    Timer t;
    auto g = Grid::radial(5.0, 640);
    Well well = Well::ball({0, 0, 0}, 4.0);
    Params prm{1.5, 0.05, 100.0}; // above c(1.5) = 0.015625
    EnergyModel model(g, well, prm);
    int decayed = 0;
    std::vector<int> results(20, 0);
    parallel_for(20, [&](std::size_t i) {
        auto rng = std::mt19937_64(0x9e3779b97f4a7c15ULL * (i + 1));
        Field u0 = random_bump_field(g, rng);
        u0 *= 3.0;
        Solution s = gradient_flow(model, u0);
        results[i] = s.status == SolveStatus::zero ? 1 : 0;
    });
    for (int r : results) decayed += r;
    criterion(6, "nonexistence probe (soft)", decayed == 20,
              std::to_string(decayed) + "/20 initializations decayed to ||u|| <= 1e-6 "
              "(consistent with the threshold, not a proof)",
              t.seconds());
}

// ---------------------------------------------------------------- 7
void c7_decay() {
    Timer t;
    Well well = Well::ball({0, 0, 0}, 1.0);
    Params prm{3.0, 1.0, 100.0};
    const double r0 = well.radius_where_g_exceeds(5.0 / 6.0);

    // synthetic exact profile
    auto gs = Grid::radial(10.0, 2048);
    const double rate = 0.5 * std::sqrt(prm.mu);
    Field synth = Field::sample(gs, [&](const Point& x) {
        const double r = x[0];
        return r > 0.5 ? std::pow(r, -0.5) * std::exp(-rate * (r - r0)) : 1.0;
    });
    DecayFit sfit = decay_fit(synth, prm, r0);
    const bool synth_ok = std::abs(sfit.slope + rate) <= 1e-6 * rate &&
                          std::abs(sfit.amplitude - 1.0) <= 1e-6;

    // solved profiles at k = 8 and k = 16
    double amps[2] = {0.0, 0.0}, slopes[2] = {0.0, 0.0};
    bool solved_ok = true;
    int idx = 0;
    for (int n : {2048, 4096}) {
        const double k = n == 2048 ? 8.0 : 16.0;
        EnergyModel model(Grid::radial(k, n), well, prm);
        Solution s = mountain_pass(model);
        solved_ok = solved_ok && s.status == SolveStatus::converged;
        if (!solved_ok) break;
        DecayFit fit = decay_fit(s.u, prm, r0);
        amps[idx] = fit.amplitude;
        slopes[idx] = fit.slope;
        ++idx;
    }
    const bool slope_ok = solved_ok && slopes[0] <= -4.25 && slopes[1] <= -4.25;
    const bool amp_ok = solved_ok && std::abs(amps[1] - amps[0]) <= 0.10 * std::abs(amps[0]);
    criterion(7, "exponential decay", synth_ok && slope_ok && amp_ok,
              "synthetic slope " + fmt(sfit.slope) + "; solved slopes " + fmt(slopes[0]) + "," +
                  fmt(slopes[1]) + " <= -4.25; A " + fmt(amps[0]) + " vs " + fmt(amps[1]),
              t.seconds());
}

// ---------------------------------------------------------------- 8
void c8_mu_to_infinity() {
    Timer t;
    Well well = Well::ball({0, 0, 0}, 1.0);
    Params prm{3.0, 1.0, 0.0};
    auto grid = Grid::radial(8.0, 2048);
    auto res = mu_sweep(prm, well, grid, {50.0, 100.0, 200.0, 400.0});
    bool ok = res.complete;
    std::string detail = "incomplete";
    if (ok) {
        bool outside_dec = true, resid_dec = true, product_ok = true;
        const double first_product = res.entries.front().mu * res.entries.front().g_mass;
        for (std::size_t i = 0; i < res.entries.size(); ++i) {
            if (i > 0) {
                outside_dec &= res.entries[i].outside_mass < res.entries[i - 1].outside_mass;
                resid_dec &= res.entries[i].limit_residual < res.entries[i - 1].limit_residual;
            }
            product_ok &= res.entries[i].mu * res.entries[i].g_mass <= 2.0 * first_product;
        }
        const bool vs_direct =
            res.entries.back().limit_residual <= 10.0 * res.mu_infinity_residual;
        ok = outside_dec && resid_dec && product_ok && vs_direct;
        detail = "final residual " + fmt(res.entries.back().limit_residual) + " vs direct " +
                 fmt(res.mu_infinity_residual) + "; outside mass " +
                 fmt(res.entries.front().outside_mass) + " -> " +
                 fmt(res.entries.back().outside_mass);
    }
    criterion(8, "mu -> infinity localization", ok, detail, t.seconds());
}

// ---------------------------------------------------------------- 9
void c9_lambda_to_zero() {
    Timer t;
    Well well = Well::ball({0, 0, 0}, 1.0);
    Params prm{3.0, 1.0, 50.0};
    auto grid = Grid::radial(8.0, 2048);
    auto res = lambda_continuation(prm, well, grid, {1.0, 0.3, 0.1, 0.03, 0.01});
    bool ok = res.complete;
    std::string detail = "incomplete";
    if (ok) {
        bool dec = true;
        for (std::size_t i = 1; i < res.gaps_to_direct.size(); ++i)
            dec &= res.gaps_to_direct[i] < res.gaps_to_direct[i - 1];
        const bool final_ok =
            res.gaps_to_direct.back() <= 5e-2 * res.direct_lambda0.dv_norm;
        bool energies_ok = res.direct_lambda0.energy.total >=
                           res.solutions.front().alpha * (1.0 - 1e-6);
        for (const auto& s : res.solutions)
            energies_ok &= s.energy.total >= s.alpha * (1.0 - 1e-6);
        ok = dec && final_ok && energies_ok;
        detail = "gaps " + fmt(res.gaps_to_direct.front()) + " -> " +
                 fmt(res.gaps_to_direct.back()) + " (rel " +
                 fmt(res.gaps_to_direct.back() / res.direct_lambda0.dv_norm) + " <= 0.05)";
    }
    criterion(9, "lambda -> 0 continuation", ok, detail, t.seconds());
}

// ---------------------------------------------------------------- 10
void c10_lambda_monotonicity() {
    Timer t;
    Well well = Well::ball({0, 0, 0}, 1.0);
    Params prm{3.0, 1.0, 50.0};
    auto grid = Grid::radial(8.0, 2048);
    auto sols = lambda_level_scan(prm, well, grid, {0.25, 0.5, 1.0, 2.0});
    bool ok = true;
    std::string levels;
    double prev = 0.0;
    for (const auto& s : sols) {
        ok = ok && s.status == SolveStatus::converged;
        if (!ok) break;
        ok = ok && s.energy.total >= prev - 1e-6;
        prev = s.energy.total;
        levels += fmt(s.energy.total) + " ";
    }
    criterion(10, "lambda monotonicity", ok, "levels " + levels + "(nondecreasing, tol 1e-6)",
              t.seconds());
}

// ---------------------------------------------------------------- 11
void c11_moser_internals() {
    Timer t;
    bool ok = true;
    double worst = 0.0;
    for (double p : {1.5, 3.0, 4.0}) {
        MoserConstants m = moser_constants(p);
        ok = ok && m.delta > 0.0 && m.delta < 1.0;
        worst = std::max(worst, std::abs(m.f_of(40) - m.f_inf));
        worst = std::max(worst, std::abs(m.g_of(40) - m.g_inf));
    }
    for (int i = 1; i < 100; ++i) {
        const double p = 1.0 + 4.0 * i / 100.0;
        MoserConstants m = moser_constants(p);
        ok = ok && m.delta > 0.0 && m.delta < 1.0;
    }
    ok = ok && worst <= 1e-10;
    criterion(11, "moser iteration internals", ok,
              "ladder gap at i=40: " + fmt(worst) + " <= 1e-10; delta in (0,1)", t.seconds());
}

// ---------------------------------------------------------------- 12
void c12_determinism() {
    Timer t;
    RunConfig cfg;
    cfg.params = {3.0, 1.0, 50.0};
    cfg.well.shape = "ball";
    cfg.well.centers = {{0.0, 0.0, 0.0}};
    cfg.well.radii = {1.0};
    cfg.grid.kind = "radial";
    cfg.grid.k = 6.0;
    cfg.grid.n = 768;
    cfg.mode = RunMode::solve;
    cfg.seed = 11;
    RunReport a = run_compute(cfg);
    RunReport b = run_compute(cfg);
    const std::string ja = a.to_json(false).dump();
    const std::string jb = b.to_json(false).dump();
    bool ok = ja == jb;

    cfg.mode = RunMode::nonexistence_probe;
    cfg.params = {1.5, 0.05, 100.0};
    cfg.well.radii = {4.0};
    cfg.grid.k = 5.0;
    cfg.grid.n = 384;
    cfg.probe_count = 4;
    RunReport c = run_compute(cfg);
    RunReport d = run_compute(cfg);
    ok = ok && c.to_json(false).dump() == d.to_json(false).dump();
    criterion(12, "determinism", ok, "byte-identical reports (timings excluded)", t.seconds());
}

} // namespace

int main() {
    Timer total;
    std::printf("acceptance suite\n");
    const double s0 = estimate_s0(Grid::radial(160.0, 8192));

    c1_constants();
    c2_poisson_oracle(s0);
    c3_gradient_consistency();
    c4_supercubic_run(s0);
    c5_subquadratic_run();
    c6_nonexistence_probe();
    c7_decay();
    c8_mu_to_infinity();
    c9_lambda_to_zero();
    c10_lambda_monotonicity();
    c11_moser_internals();
    c12_determinism();

    std::printf("%d/12 criteria passed (total %.1fs)\n", 12 - g_failures, total.seconds());
    return g_failures == 0 ? 0 : 1;
}
