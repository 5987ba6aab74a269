#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "spwell/bounds.hpp"
#include "spwell/config.hpp"
#include "spwell/io.hpp"
#include "spwell/parallel.hpp"
#include "spwell/report.hpp"
#include "spwell/solver.hpp"
#include "spwell/sweeps.hpp"

namespace spwell {

namespace detail {

inline SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions o;
    o.newton_tol = cfg.tolerances.residual;
    o.level_tol = cfg.tolerances.level;
    return o;
}

/// Reference Sobolev estimates shared by all checks in a run.
struct Estimates {
    double s0 = 0.0;
    double s_q125 = 0.0;
};

inline Estimates make_estimates() {
    Estimates e;
    e.s0 = estimate_s0(Grid::radial(160.0, 8192));
    e.s_q125 = estimate_sobolev_h1(12.0 / 5.0);
    return e;
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

/// The per-solution verification battery.
inline void solution_checks(const Solution& s, const EnergyModel& model, const RunConfig& cfg,
                            const Estimates& est, std::vector<BoundCheck>& checks,
                            std::vector<std::string>& warnings, const std::string& tag,
                            bool with_decay) {
    const Tolerances& tol = cfg.tolerances;
    checks.push_back(BoundCheck::make(tag + "residual", s.residual_norm, tol.residual, 0.0));
    checks.push_back(BoundCheck::make(tag + "nehari", std::abs(s.nehari_gap),
                                      tol.nehari * s.dv_norm * s.dv_norm, 0.0));
    if (s.alpha > 0.0)
        checks.push_back(BoundCheck::make(tag + "energy_above_alpha",
                                          s.alpha * (1.0 - 1e-6), s.energy.total, 0.0));
    else
        checks.push_back(BoundCheck::make(tag + "energy_positive", 0.0, s.energy.total, 0.0));
    if (s.level_upper > 0.0)
        checks.push_back(BoundCheck::make(tag + "energy_below_c_lambda", s.energy.total,
                                          s.level_upper, 1e-8 * (1.0 + s.level_upper)));

    PoissonSolution phi = model.hartree(s.u);
    checks.push_back(BoundCheck::make(tag + "poisson_identity", phi.identity_gap(),
                                      1e-8 * phi.grad_energy, 1e-14));
    const double phimax = s.phi.max_abs();
    checks.push_back(BoundCheck::make(tag + "phi_nonnegative", -s.phi.min_value(), 0.0,
                                      1e-12 * (1.0 + phimax)));
    for (auto c : verify_poisson_bounds(s.u, phi, est.s0)) {
        c.name = tag + c.name;
        checks.push_back(std::move(c));
    }

    if (model.params().regime() == Regime::subquadratic) {
        for (auto c : check_pointwise(s.u, s.phi, model.params())) {
            c.name = tag + c.name;
            checks.push_back(std::move(c));
        }
        checks.push_back([&] {
            auto c = ps_device_check(s.u, phi, model.params());
            c.name = tag + c.name;
            return c;
        }());
    } else {
        auto c = moser_bound(s.u, model.params(), est.s0);
        c.name = tag + c.name;
        checks.push_back(std::move(c));
    }

    if (with_decay && model.grid()->kind() == GridKind::radial && model.params().mu > 0.0) {
        const double r0 = model.well().radius_where_g_exceeds(5.0 / 6.0);
        try {
            DecayFit fit = decay_fit(s.u, model.params(), r0);
            auto c = fit.check;
            c.name = tag + c.name;
            checks.push_back(std::move(c));
        } catch (const std::exception& e) {
            warnings.push_back(tag + "decay_fit skipped: " + e.what());
        }
    }

    // tail product soft diagnostic: tail_mass(u,R)·R bounded by the norm²
    if (model.grid()->kind() == GridKind::radial) {
        const double k = model.grid()->k();
        double worst = 0.0;
        for (double r : {k / 4.0, k / 3.0, k / 2.0})
            worst = std::max(worst, tail_mass(s.u, r) * r);
        checks.push_back(BoundCheck::make(tag + "tail_product", worst,
                                          s.dv_norm * s.dv_norm, 0.0, {}, /*hard=*/false));
    }
}

inline SweepRow make_row(const Solution& s, const RunConfig& cfg, double k,
                         double decay_slope = 0.0, double g_mass = 0.0,
                         double outside_mass = 0.0) {
    SweepRow r;
    r.p = s.params.p;
    r.lambda = s.params.lambda;
    r.mu = s.params.mu;
    r.k = k;
    r.energy = s.energy.total;
    r.dv_norm = s.dv_norm;
    r.sup_u = s.u.size() ? s.u.max_abs() : 0.0;
    r.decay_slope = decay_slope;
    r.g_mass = g_mass;
    r.outside_mass = outside_mass;
    (void)cfg;
    return r;
}

inline ConstantSet run_constants(const RunConfig& cfg, const Estimates& est,
                                 std::optional<double> c_upper) {
    ConstantInputs in;
    in.s0 = est.s0;
    in.s_q125 = est.s_q125;
    in.c_lambda_upper = c_upper;
    in.well_r1 = cfg.well.build().radius_where_g_exceeds(1.0);
    return constants(cfg.params, in);
}

/// The no-PDE verification lane: closed-form constants, their algebraic
/// identities, the Moser ladder, and the Poisson/Sobolev oracles.
inline void verify_suite(const RunConfig& cfg, const Estimates& est, RunReport& rep) {
    // two closed forms of the sup constant agree on a 50x50 grid
    double worst_gap = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double p = 1.0 + 0.9 * (i + 1) / 50.0;
        const double cp = nonexistence_threshold(p);
        for (int j = 0; j < 50; ++j) {
            const double lambda = cp * (j + 1) / 50.0;
            const double a = sup_constant_statement(p, lambda);
            const double b = sup_constant_barrier(p, lambda);
            worst_gap = std::max(worst_gap, std::abs(a - b) / a);
        }
    }
    rep.checks.push_back(BoundCheck::make("constants.forms_agree_50x50", worst_gap, 1e-12, 0.0));

    rep.checks.push_back(BoundCheck::make("constants.spot_cp", std::abs(pointwise_cp(1.5) - 0.25),
                                          0.0, 0.0));
    rep.checks.push_back(BoundCheck::make(
        "constants.spot_c_of_p", std::abs(nonexistence_threshold(1.5) - 0.015625), 0.0, 0.0));
    rep.checks.push_back(BoundCheck::make(
        "constants.spot_C", std::abs(sup_constant_statement(1.5, 0.01) - 421875.0 / 256.0), 0.0,
        0.0));

    // barrier inequality t + c_p t² - t^p >= 0
    double barrier_min = std::numeric_limits<double>::infinity();
    for (double p : {1.1, 1.3, 1.5, 1.7, 1.9}) {
        const double cp = pointwise_cp(p);
        for (int i = 0; i <= 10000; ++i) {
            const double t = 100.0 * i / 10000.0;
            barrier_min = std::min(barrier_min, t + cp * t * t - std::pow(t, p));
        }
    }
    rep.checks.push_back(BoundCheck::make("constants.barrier_nonnegative", -barrier_min, 0.0,
                                          1e-12));

    // max_t (t^p - (λ/c_p)t²) = C_{p,λ} against a golden-section oracle
    double worst_max_gap = 0.0;
    for (double p : {1.3, 1.5, 1.8})
        for (double lambda : {0.002, 0.008}) {
            const double cp = pointwise_cp(p);
            auto f = [&](double t) { return std::pow(t, p) - lambda / cp * t * t; };
            double a = 0.0, b = 1.0;
            while (f(2.0 * b) > f(b)) b *= 2.0;
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
            worst_max_gap = std::max(worst_max_gap, std::abs(oracle - closed) / closed);
        }
    rep.checks.push_back(BoundCheck::make("constants.max_identity", worst_max_gap, 1e-10, 0.0));

    // Moser ladder: f(i), g(i) converge to their limits; delta in (0,1)
    double worst_ladder = 0.0, delta_lo = 1.0, delta_hi = 0.0;
    for (double p : {1.5, 3.0, 4.0}) {
        MoserConstants m = moser_constants(p);
        worst_ladder = std::max(worst_ladder, std::abs(m.f_of(40) - m.f_inf));
        worst_ladder = std::max(worst_ladder, std::abs(m.g_of(40) - m.g_inf));
        delta_lo = std::min(delta_lo, m.delta);
        delta_hi = std::max(delta_hi, m.delta);
    }
    rep.checks.push_back(BoundCheck::make("moser.ladder_converged_i40", worst_ladder, 1e-10, 0.0));
    rep.checks.push_back(BoundCheck::make("moser.delta_in_unit_interval",
                                          std::max(-delta_lo, delta_hi - 1.0), 0.0, 1e-15));

    // Poisson oracles: uniform unit-ball charge, free-space closed form
    {
        auto g = Grid::radial(4.0, 1024);
        Field u = Field::sample(g, [](const Point& x) { return x[0] <= 1.0 ? 1.0 : 0.0; });
        auto sf = solve_free(u);
        auto at = [&](double r) {
            const double t = r / g->h();
            const int j = std::min(static_cast<int>(t), g->n() - 2);
            return (1.0 - (t - j)) * sf.phi[j] + (t - j) * sf.phi[j + 1];
        };
        rep.checks.push_back(BoundCheck::make("poisson.free_phi0",
                                              std::abs(at(0.0) - 0.5) / 0.5, 5e-3, 0.0));
        rep.checks.push_back(BoundCheck::make(
            "poisson.free_phi1", std::abs(at(1.0) - 1.0 / 3.0) * 3.0, 5e-3, 0.0));

        auto sb = solve_ball(u);
        rep.checks.push_back(BoundCheck::make("poisson.identity", sb.identity_gap(),
                                              1e-8 * sb.grad_energy, 1e-14));

        std::mt19937_64 rng(seeded_rng(cfg.seed, 977)());
        int passes = 0;
        const int trials = 20;
        for (int t = 0; t < trials; ++t) {
            Field b = random_bump_field(g, rng);
            auto s = solve_ball(b);
            auto cs = verify_poisson_bounds(b, s, est.s0);
            if (cs[0].pass && cs[1].pass) ++passes;
        }
        rep.checks.push_back(BoundCheck::make("poisson.l125_bounds_random_bumps",
                                              static_cast<double>(trials - passes), 0.0, 0.0,
                                              std::to_string(passes) + "/20 passed"));
        const double s0_coarse = estimate_s0(Grid::radial(160.0, 4096));
        rep.checks.push_back(BoundCheck::make("sobolev.s0_grid_stable",
                                              std::abs(s0_coarse - est.s0) / est.s0, 5e-3, 0.0));
    }
}

} // namespace detail

/// Execute a run; pure function of (config, seed) apart from the timings
/// block. Writes nothing — see run().
inline RunReport run_compute(const RunConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    RunReport rep;
    rep.config = cfg;
    rep.warnings = cfg.validate();
    const detail::Estimates est = detail::make_estimates();
    const SolveOptions opts = detail::solve_options(cfg);

    Well well = cfg.well.build();
    std::optional<double> c_upper;

    switch (cfg.mode) {
    case RunMode::verify: {
        detail::verify_suite(cfg, est, rep);
        break;
    }
    case RunMode::solve: {
        GridPtr grid = cfg.grid.build();
        EnergyModel model(grid, well, cfg.params);
        Solution s = mountain_pass(model, opts);
        rep.solutions.push_back(solution_summary(s));
        if (s.status == SolveStatus::converged) {
            c_upper = s.level_upper;
            detail::solution_checks(s, model, cfg, est, rep.checks, rep.warnings, "solution.",
                                    true);
            double slope = 0.0;
            try {
                slope = decay_fit(s.u, cfg.params, well.radius_where_g_exceeds(5.0 / 6.0)).slope;
            } catch (const std::exception&) {
            }
            const auto loc = well_localization(s.u, well);
            rep.rows.push_back(detail::make_row(s, cfg, grid->k(), slope, loc.g_mass,
                                                loc.outside_mass));
            rep.primary_u = s.u;
            rep.primary_phi = s.phi;
        } else {
            rep.status = s.status == SolveStatus::no_pass ? "partial" : "failed";
        }
        break;
    }
    case RunMode::ground_state: {
        GridPtr grid = cfg.grid.build();
        EnergyModel model(grid, well, cfg.params);
        GroundStateResult gs = ground_state(model, cfg.n_starts, cfg.seed, opts);
        for (const auto& cp : gs.critical_points) rep.solutions.push_back(solution_summary(cp));
        if (gs.best.status == SolveStatus::converged) {
            c_upper = gs.best.level_upper;
            detail::solution_checks(gs.best, model, cfg, est, rep.checks, rep.warnings,
                                    "ground_state.", true);
            for (std::size_t i = 0; i < gs.critical_points.size(); ++i)
                rep.checks.push_back(BoundCheck::make(
                    "ground_state.norm_lower_bound_" + std::to_string(i),
                    gs.nehari_lower * (1.0 - 1e-6), gs.critical_points[i].dv_norm, 0.0));
            const auto loc = well_localization(gs.best.u, well);
            rep.rows.push_back(detail::make_row(gs.best, cfg, grid->k(), 0.0, loc.g_mass,
                                                loc.outside_mass));
            rep.primary_u = gs.best.u;
            rep.primary_phi = gs.best.phi;
        } else {
            rep.status = "failed";
        }
        break;
    }
    case RunMode::domain_approx: {
        auto res = domain_approximation(cfg.params, well, cfg.grid.k_schedule, cfg.grid.n, opts);
        for (std::size_t i = 0; i < res.solutions.size(); ++i) {
            const auto& s = res.solutions[i];
            rep.solutions.push_back(solution_summary(s));
            if (s.status == SolveStatus::converged) {
                EnergyModel model(res.grids[i], well, cfg.params);
                detail::solution_checks(s, model, cfg, est, rep.checks, rep.warnings,
                                        "k" + std::to_string(i) + ".", false);
                rep.rows.push_back(detail::make_row(s, cfg, res.grids[i]->k()));
            }
        }
        for (std::size_t i = 1; i < res.cauchy_diffs.size(); ++i)
            rep.checks.push_back(BoundCheck::make(
                "domain_approx.cauchy_decreasing_" + std::to_string(i), res.cauchy_diffs[i],
                res.cauchy_diffs[i - 1], 0.0, {}, /*hard=*/false));
        if (res.complete && !res.solutions.empty())
            c_upper = res.solutions.front().level_upper;
        if (!res.complete) rep.status = "partial";
        break;
    }
    case RunMode::lambda_sweep: {
        GridPtr grid = cfg.grid.build();
        std::vector<double> schedule = cfg.schedules.lambda;
        std::sort(schedule.rbegin(), schedule.rend());
        auto res = lambda_continuation(cfg.params, well, grid, schedule, opts);
        for (const auto& s : res.solutions) rep.solutions.push_back(solution_summary(s));
        if (res.complete) {
            c_upper = res.solutions.front().level_upper;
            rep.solutions.push_back(solution_summary(res.direct_lambda0));
            for (std::size_t i = 0; i < res.solutions.size(); ++i) {
                const auto& s = res.solutions[i];
                EnergyModel model(grid, well, s.params);
                detail::solution_checks(s, model, cfg, est, rep.checks, rep.warnings,
                                        "lam" + std::to_string(i) + ".", false);
                rep.rows.push_back(detail::make_row(s, cfg, grid->k()));
            }
            for (std::size_t i = 1; i < res.gaps_to_direct.size(); ++i)
                rep.checks.push_back(BoundCheck::make(
                    "lambda_sweep.gap_decreasing_" + std::to_string(i), res.gaps_to_direct[i],
                    res.gaps_to_direct[i - 1], 0.0));
            rep.checks.push_back(BoundCheck::make(
                "lambda_sweep.final_gap", res.gaps_to_direct.back(),
                5e-2 * res.direct_lambda0.dv_norm, 0.0));
            rep.checks.push_back(BoundCheck::make(
                "lambda_sweep.limit_energy_above_alpha",
                res.solutions.front().alpha * (1.0 - 1e-6), res.direct_lambda0.energy.total,
                0.0));
            for (std::size_t i = 1; i < res.solutions.size(); ++i)
                rep.checks.push_back(BoundCheck::make(
                    "lambda_sweep.energy_nonincreasing_" + std::to_string(i),
                    res.solutions[i].energy.total, res.solutions[i - 1].energy.total, 1e-9));

            // matched-initialization level monotonicity (fresh passes,
            // shared endpoint)
            std::vector<Solution> scan = lambda_level_scan(cfg.params, well, grid, schedule,
                                                           opts);
            bool all_ok = true;
            for (const auto& s : scan) all_ok &= s.status == SolveStatus::converged;
            if (all_ok)
                for (std::size_t i = 1; i < scan.size(); ++i)
                    rep.checks.push_back(BoundCheck::make(
                        "lambda_sweep.level_monotone_" + std::to_string(i),
                        scan[i - 1].energy.total, scan[i].energy.total, 1e-6));
            rep.primary_u = res.direct_lambda0.u;
            rep.primary_phi = res.direct_lambda0.phi;
        } else {
            rep.status = "partial";
        }
        break;
    }
    case RunMode::mu_sweep: {
        GridPtr grid = cfg.grid.build();
        std::vector<double> schedule = cfg.schedules.mu;
        std::sort(schedule.begin(), schedule.end());
        auto res = mu_sweep(cfg.params, well, grid, schedule, opts);
        for (const auto& e : res.entries) {
            rep.solutions.push_back(solution_summary(e.solution));
            rep.rows.push_back(detail::make_row(e.solution, cfg, grid->k(), 0.0, e.g_mass,
                                                e.outside_mass));
        }
        if (res.complete) {
            c_upper = res.entries.front().solution.level_upper;
            for (std::size_t i = 0; i < res.entries.size(); ++i) {
                Params p = cfg.params;
                p.mu = res.entries[i].mu;
                EnergyModel model(grid, well, p);
                detail::solution_checks(res.entries[i].solution, model, cfg, est, rep.checks,
                                        rep.warnings, "mu" + std::to_string(i) + ".", false);
            }
            const double first_product = res.entries.front().mu * res.entries.front().g_mass;
            for (const auto& e : res.entries)
                rep.checks.push_back(BoundCheck::make(
                    "mu_sweep.g_mass_product_bounded_mu" + std::to_string(int(e.mu)),
                    e.mu * e.g_mass, 2.0 * first_product, 0.0));
            for (std::size_t i = 1; i < res.entries.size(); ++i) {
                rep.checks.push_back(BoundCheck::make(
                    "mu_sweep.outside_mass_decreasing_" + std::to_string(i),
                    res.entries[i].outside_mass, res.entries[i - 1].outside_mass, 0.0));
                rep.checks.push_back(BoundCheck::make(
                    "mu_sweep.limit_residual_decreasing_" + std::to_string(i),
                    res.entries[i].limit_residual, res.entries[i - 1].limit_residual, 0.0));
            }
            rep.checks.push_back(BoundCheck::make("mu_sweep.final_vs_direct_limit",
                                                  res.entries.back().limit_residual,
                                                  10.0 * res.mu_infinity_residual, 0.0));
            rep.solutions.push_back(solution_summary(res.mu_infinity));
            rep.primary_u = res.entries.back().solution.u;
            rep.primary_phi = res.entries.back().solution.phi;
        } else {
            rep.status = "partial";
        }
        break;
    }
    case RunMode::nonexistence_probe: {
        GridPtr grid = cfg.grid.build();
        EnergyModel model(grid, well, cfg.params);
        std::vector<int> decayed(cfg.probe_count, 0);
        std::vector<double> final_norms(cfg.probe_count, 0.0);
        parallel_for(cfg.probe_count, [&](std::size_t i) {
            auto rng = detail::seeded_rng(cfg.seed, i);
            Field u0 = random_bump_field(grid, rng);
            u0 *= 3.0;
            Solution s = gradient_flow(model, u0, opts);
            decayed[i] = s.status == SolveStatus::zero ? 1 : 0;
            final_norms[i] = s.dv_norm;
        });
        int total = 0;
        for (int d : decayed) total += d;
        rep.checks.push_back(BoundCheck::make(
            "probe.all_decayed", static_cast<double>(cfg.probe_count - total), 0.0, 0.0,
            std::to_string(total) + "/" + std::to_string(cfg.probe_count) +
                " initializations decayed to zero (consistent with nonexistence; "
                "a solver cannot prove it)",
            /*hard=*/false));
        // optional λ ladder: report the last λ where a pass still exists
        if (!cfg.schedules.lambda.empty()) {
            std::vector<double> ladder = cfg.schedules.lambda;
            std::sort(ladder.begin(), ladder.end());
            std::vector<int> found(ladder.size(), 0);
            parallel_for(ladder.size(), [&](std::size_t i) {
                Params p = cfg.params;
                p.lambda = ladder[i];
                EnergyModel m(grid, well, p);
                Solution s = mountain_pass(m, opts);
                found[i] = s.status == SolveStatus::converged ? 1 : 0;
            });
            double last_success = 0.0;
            for (std::size_t i = 0; i < ladder.size(); ++i)
                if (found[i]) last_success = ladder[i];
            rep.warnings.push_back("probe: empirical last-success lambda = " +
                                   std::to_string(last_success) +
                                   " (lower bracket for the existence threshold; "
                                   "not asserted equal to it)");
        }
        break;
    }
    }

    rep.constants = constants_json(detail::run_constants(cfg, est, c_upper));
    rep.tally_rows();
    if (rep.status == "ok" && !rep.hard_pass()) rep.status = "failed";
    rep.timings["total_seconds"] =
        std::chrono::duration<double>(clock::now() - t0).count();
    return rep;
}

/// Execute and write artifacts: report.json, sweep.csv, field dumps.
inline RunReport run(const RunConfig& cfg) {
    RunReport rep = run_compute(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    {
        std::ofstream out(fs::path(cfg.output_dir) / "report.json");
        out << rep.to_json(true).dump(2) << "\n";
    }
    {
        std::ofstream out(fs::path(cfg.output_dir) / "sweep.csv");
        out << sweep_table({rep});
    }
    if (rep.primary_u) {
        dump_field(*rep.primary_u, fs::path(cfg.output_dir) / "u");
        dump_field(*rep.primary_phi, fs::path(cfg.output_dir) / "phi");
    }
    return rep;
}

} // namespace spwell
