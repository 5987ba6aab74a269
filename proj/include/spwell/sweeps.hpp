#pragma once

#include <optional>
#include <vector>

#include "spwell/bounds.hpp"
#include "spwell/solver.hpp"

namespace spwell {

/// One µ-sweep entry: the solution plus the localization diagnostics of the
/// steep-well limit (g-weighted mass, mass outside Ω₀, limit-problem
/// residual of the restriction to Ω₀).
struct MuSweepEntry {
    double mu = 0.0;
    Solution solution;
    double g_mass = 0.0;
    double outside_mass = 0.0;
    double limit_residual = 0.0;
};

struct MuSweepResult {
    std::vector<MuSweepEntry> entries;
    Solution mu_infinity;          // same-grid Dirichlet-on-{g>0} reference
    double mu_infinity_residual = 0.0; // its limit-problem residual
    bool complete = false;
};

inline MuSweepResult mu_sweep(const Params& base, const Well& well, GridPtr grid,
                              const std::vector<double>& mus, const SolveOptions& opts = {}) {
    if (mus.empty() || !std::is_sorted(mus.begin(), mus.end()))
        throw std::invalid_argument("mu_sweep: schedule must increase");
    MuSweepResult out;
    std::optional<Field> seed;
    for (double mu : mus) {
        Params p = base;
        p.mu = mu;
        EnergyModel model(grid, well, p);
        Solution s;
        if (seed) {
            s = refine_newton(model, *seed, opts, Provenance::continuation);
            if (s.status == SolveStatus::converged) fill_geometry(s, model);
            else s = mountain_pass(model, opts);
        } else {
            s = mountain_pass(model, opts);
        }
        if (s.status != SolveStatus::converged) {
            out.entries.push_back({mu, std::move(s), 0.0, 0.0, 0.0});
            return out;
        }
        MuSweepEntry e;
        e.mu = mu;
        const auto loc = well_localization(s.u, well);
        e.g_mass = loc.g_mass;
        e.outside_mass = loc.outside_mass;
        e.limit_residual = limit_problem_residual(s.u, well, p);
        seed = s.u;
        e.solution = std::move(s);
        out.entries.push_back(std::move(e));
    }
    out.mu_infinity = solve_mu_infinity(grid, well, base, seed, opts);
    if (out.mu_infinity.status == SolveStatus::converged) {
        out.mu_infinity_residual = limit_problem_residual(out.mu_infinity.u, well, base);
        out.complete = true;
    }
    return out;
}

} // namespace spwell
