#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spwell/bound_check.hpp"
#include "spwell/constants.hpp"
#include "spwell/discretization.hpp"
#include "spwell/energy.hpp"
#include "spwell/field.hpp"
#include "spwell/poisson.hpp"
#include "spwell/solver.hpp"

namespace spwell {

/// Subquadratic pointwise bounds |u| ≤ c_p φ and |u| ≤ C_{p,λ}, checked
/// nodewise with discretization slack; reports the worst node.
inline std::vector<BoundCheck> check_pointwise(const Field& u, const Field& phi,
                                               const Params& params) {
    if (regime_of(params.p) != Regime::subquadratic)
        throw std::invalid_argument("check_pointwise: p must be in (1,2)");
    const Grid& g = u.grid();
    const double cp = pointwise_cp(params.p);
    const double cpl = sup_constant_statement(params.p, params.lambda);
    const double slack = 1e-8 + g.h() * g.h() * std::max(1.0, u.max_abs());

    double worst_phi = -std::numeric_limits<double>::infinity();
    double worst_sup = -std::numeric_limits<double>::infinity();
    std::size_t node_phi = 0, node_sup = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!g.active(i)) continue;
        const double a = std::abs(u[i]);
        if (a - cp * phi[i] > worst_phi) {
            worst_phi = a - cp * phi[i];
            node_phi = i;
        }
        if (a - cpl > worst_sup) {
            worst_sup = a - cpl;
            node_sup = i;
        }
    }
    std::vector<BoundCheck> out;
    out.push_back(BoundCheck::make("pointwise.u_le_cp_phi", worst_phi, 0.0, slack,
                                   "worst node " + std::to_string(node_phi)));
    out.push_back(BoundCheck::make("pointwise.u_le_C", worst_sup, 0.0, slack,
                                   "worst node " + std::to_string(node_sup)));
    return out;
}

/// Bounded-PS device: √λ∫|u|³ ≤ ½∫|∇u|² + (λ/2)∫φ_u u². Holds exactly for
/// any field/potential pair produced by the discrete Poisson solve.
inline BoundCheck ps_device_check(const Field& u, const PoissonSolution& phi,
                                  const Params& params) {
    const Grid& g = u.grid();
    const double lhs = std::sqrt(params.lambda) * lq_norm_pow(u, 3.0);
    const double rhs = 0.5 * g.dirichlet_form(u.values(), u.values()) +
                       0.5 * params.lambda * phi.coupling;
    return BoundCheck::make("ps_device", lhs, rhs, 1e-10 * (1.0 + rhs));
}

/// Moser-iteration sup-norm bound |u|_∞ ≤ C₁(1+|u|_{2*}^{C₂})|u|_{2*},
/// evaluated through the tight assembled form (which C₁/C₂ majorize).
inline BoundCheck moser_bound(const Field& u, const Params& params, double s0) {
    if (u.max_abs() == 0.0) throw std::invalid_argument("moser_bound: u must be nonzero");
    MoserConstants m = moser_constants(params.p, s0);
    const double a = lq_norm(u, 6.0);
    const double lhs = u.max_abs();
    const double rhs = m.bound_tight(a);
    std::string detail = "|u|_6=" + std::to_string(a) + " r1=" + std::to_string(m.r1_of(a)) +
                         " C1=" + std::to_string(*m.c1) + " C2=" + std::to_string(*m.c2) +
                         " s0=" + std::to_string(s0);
    return BoundCheck::make("moser.sup_bound", lhs, rhs, 1e-10 * (1.0 + rhs),
                            std::move(detail));
}

/// Exponential-decay fit against u(r) ≤ A r^{-1/2} e^{-(√µ/2)(r-R₀)}.
struct DecayFit {
    double amplitude = 0.0; // fitted A
    double slope = 0.0;     // LSQ slope of log(u√r)
    double window_lo = 0.0, window_hi = 0.0;
    double argmax_r = 0.0;
    BoundCheck check;
};

/// Fits over r ∈ (R₀, k-2], truncated at the solver noise floor
/// (last radius with u ≥ 1e-10·|u|_∞); the Dirichlet boundary layer and
/// sub-tolerance tail would otherwise contaminate the fit.
inline DecayFit decay_fit(const Field& u, const Params& params, double r0) {
    const Grid& g = u.grid();
    if (g.kind() != GridKind::radial)
        throw std::invalid_argument("decay_fit: radial grid required");
    const double sqmu_half = 0.5 * std::sqrt(params.mu);
    const double floor = 1e-10 * u.max_abs();

    DecayFit out;
    out.window_lo = r0;
    out.window_hi = g.k() - 2.0;
    if (out.window_hi <= out.window_lo + 4.0 * g.h())
        throw std::invalid_argument("decay_fit: window too small (need k >= R0 + 2 + margin)");

    std::vector<double> rs, logs;
    double amax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n(); ++i) {
        const double r = g.radius(i);
        if (r <= out.window_lo || r > out.window_hi) continue;
        if (u[i] <= 0.0 && std::abs(u[i]) >= floor)
            throw std::invalid_argument("decay_fit: u nonpositive inside the fit window");
        if (u[i] < floor) break; // below the solver noise floor: stop the window
        const double t = u[i] * std::sqrt(r);
        rs.push_back(r);
        logs.push_back(std::log(t));
        const double a = t * std::exp(sqmu_half * (r - r0));
        if (a > amax) {
            amax = a;
            out.argmax_r = r;
        }
    }
    if (rs.size() < 8) throw std::invalid_argument("decay_fit: window too small");
    out.window_hi = rs.back();
    out.amplitude = amax;

    double sr = 0.0, sl = 0.0, srr = 0.0, srl = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        sr += rs[i];
        sl += logs[i];
        srr += rs[i] * rs[i];
        srl += rs[i] * logs[i];
    }
    const double n = static_cast<double>(rs.size());
    out.slope = (n * srl - sr * sl) / (n * srr - sr * sr);

    // the bound permits faster decay, never slower; A must be finite and
    // attained away from the outer end of the usable window
    const double slope_req = -sqmu_half * (1.0 - 0.15);
    const bool a_ok = std::isfinite(out.amplitude) &&
                      out.argmax_r <= out.window_lo + 0.9 * (out.window_hi - out.window_lo);
    out.check = BoundCheck::make("decay.slope", out.slope, slope_req, 1e-12,
                                 "A=" + std::to_string(out.amplitude) +
                                     " argmax_r=" + std::to_string(out.argmax_r));
    out.check.pass = out.check.pass && a_ok;
    return out;
}

/// Tail integral ∫_{|x|>R}(|∇u|² + u²) dx (δ_µ = 1).
inline double tail_mass(const Field& u, double R) {
    const Grid& g = u.grid();
    if (!(R < g.k())) throw std::invalid_argument("tail_mass: need R < k");
    double acc = 0.0;
    if (g.kind() == GridKind::radial) {
        const double h = g.h();
        for (int i = 0; i + 1 < g.n(); ++i) {
            const double rf = (i + 0.5) * h;
            if (rf <= R) continue;
            const double du = (g.dof(i + 1) ? u[i + 1] : 0.0) - u[i];
            acc += g.face_area(i) * du * du / h;
        }
        for (int i = 0; i < g.n(); ++i)
            if (g.radius(i) > R) acc += g.weights()[i] * u[i] * u[i];
        return acc;
    }
    const int n = g.n();
    const double h = g.h();
    auto val = [&](std::size_t idx) { return g.dof(idx) ? u[idx] : 0.0; };
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t a = g.index(ix, iy, iz);
                const Point x = g.coords(a);
                const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
                if (g.active(a) && r > R) acc += g.weights()[a] * u[a] * u[a];
                // faces in +direction, assigned by midpoint radius
                const int d[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
                for (const auto& dd : d) {
                    const int jx = ix + dd[0], jy = iy + dd[1], jz = iz + dd[2];
                    if (jx >= n || jy >= n || jz >= n) continue;
                    const std::size_t b = g.index(jx, jy, jz);
                    if (!g.active(a) && !g.active(b)) continue;
                    const Point y = g.coords(b);
                    const double mx = 0.5 * (x[0] + y[0]), my = 0.5 * (x[1] + y[1]),
                                 mz = 0.5 * (x[2] + y[2]);
                    if (std::sqrt(mx * mx + my * my + mz * mz) <= R) continue;
                    const double du = val(b) - val(a);
                    acc += h * du * du;
                }
            }
    return acc;
}

/// L² norm of the strong-form limit-problem residual
///   -Δu + u + (λ/4π)(u²∗1/|x|)u - |u|^{p-1}u
/// on interior Ω₀ nodes (full stencil inside Ω₀), with the Hartree term
/// from the free-space Poisson operator of the masked field.
inline double limit_problem_residual(const Field& u, const Well& well, const Params& params) {
    GridPtr grid = u.grid_ptr();
    EnergyModel::Options mo;
    mo.hartree = HartreeMode::free_space;
    mo.submask = omega0_submask(well, *grid);
    mo.unit_potential = true;
    bool any = false;
    for (auto b : mo.submask) any |= (b != 0);
    if (!any) throw std::invalid_argument("limit_problem_residual: Ω₀ unresolved by grid");
    const std::vector<std::uint8_t> sub = mo.submask;
    EnergyModel model(grid, well, params, std::move(mo));

    Field v = model.masked(u);
    EnergyResidual res = model.residual(v);

    // interior: every stencil neighbor stays inside Ω₀
    const Grid& g = *grid;
    double acc = 0.0;
    if (g.kind() == GridKind::radial) {
        for (int i = 0; i + 1 < g.n(); ++i) {
            if (!sub[i]) continue;
            const bool interior = (i == 0 || sub[i - 1]) && sub[i + 1];
            if (interior) acc += g.weights()[i] * res.r[i] * res.r[i];
        }
    } else {
        const int n = g.n();
        for (int ix = 1; ix + 1 < n; ++ix)
            for (int iy = 1; iy + 1 < n; ++iy)
                for (int iz = 1; iz + 1 < n; ++iz) {
                    const std::size_t a = g.index(ix, iy, iz);
                    if (!sub[a]) continue;
                    const bool interior =
                        sub[g.index(ix - 1, iy, iz)] && sub[g.index(ix + 1, iy, iz)] &&
                        sub[g.index(ix, iy - 1, iz)] && sub[g.index(ix, iy + 1, iz)] &&
                        sub[g.index(ix, iy, iz - 1)] && sub[g.index(ix, iy, iz + 1)];
                    if (interior) acc += g.weights()[a] * res.r[a] * res.r[a];
                }
    }
    return std::sqrt(acc);
}

/// Mass of g·u² and of u² outside Ω₀ (the µ → ∞ localization diagnostics).
struct WellLocalization {
    double g_mass = 0.0;       // ∫ g u²
    double outside_mass = 0.0; // ∫_{B_k \ Ω₀} u²
};

inline WellLocalization well_localization(const Field& u, const Well& well) {
    const Grid& g = u.grid();
    well.require_compatible(g);
    WellLocalization out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!g.active(i)) continue;
        const Point x = g.coords(i);
        const double w = g.weights()[i];
        out.g_mass += w * well.value(x) * u[i] * u[i];
        if (!well.inside_omega0(x)) out.outside_mass += w * u[i] * u[i];
    }
    return out;
}

} // namespace spwell
