#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spwell/discretization.hpp"
#include "spwell/field.hpp"
#include "spwell/grid.hpp"
#include "spwell/params.hpp"
#include "spwell/poisson.hpp"
#include "spwell/sobolev.hpp"
#include "spwell/well.hpp"

namespace spwell {

/// I(u) = ½∫(|∇u|² + V_µu²) + (λ/4)∫φ_u u² - (1/(p+1))∫|u|^{p+1},
/// split into its three parts.
struct EnergyBreakdown {
    double kinetic = 0.0;
    double hartree = 0.0;
    double potential_power = 0.0;
    double total = 0.0;
};

/// Strong-form Euler–Lagrange residual r = -Δu + V_µu + λφ_u u - |u|^{p-1}u
/// (boundary-masked), its weighted L² norm, and the Nehari gap
/// ‖u‖² + λ∫φ_u u² - ∫|u|^{p+1} = I'(u)u.
struct EnergyResidual {
    Field r;
    double norm_l2 = 0.0;
    double nehari_gap = 0.0;
};

/// How the Hartree potential φ_u is produced.
enum class HartreeMode {
    ball,       // Dirichlet solve on B_k (the problem actually discretized)
    free_space  // Newtonian kernel (radial) / ball + monopole shift (box3d)
};

inline double odd_power(double u, double p) {
    return std::copysign(std::pow(std::abs(u), p), u);
}

/// The discrete functional: grid + well + params + Hartree route, with an
/// optional Dirichlet sub-mask (used by the Ω₀ limit problem, where V ≡ 1).
/// All quadratures, the stiffness form, and the Hartree coupling are built
/// from the same weights, so the directional derivative of energy() is
/// exactly the weighted pairing with residual().
class EnergyModel {
public:
    struct Options {
        HartreeMode hartree = HartreeMode::ball;
        std::vector<std::uint8_t> submask; // empty: whole Dirichlet dof set
        bool unit_potential = false;       // V ≡ 1 (limit problem on Ω₀)
        double poisson_tol = 1e-10;
    };

    EnergyModel(GridPtr grid, const Well& well, const Params& params)
        : EnergyModel(std::move(grid), well, params, Options{}) {}

    EnergyModel(GridPtr grid, const Well& well, const Params& params, Options opt)
        : grid_(std::move(grid)), well_(well), params_(params), opt_(std::move(opt)),
          poisson_(grid_, opt_.submask, opt_.poisson_tol) {
        params_.validate();
        well_.require_compatible(*grid_);
        vpot_ = Field(grid_, 1.0);
        if (!opt_.unit_potential)
            for (std::size_t i = 0; i < vpot_.size(); ++i)
                if (grid_->active(i))
                    vpot_[i] = 1.0 + params_.mu * well_.value(grid_->coords(i));
        if (opt_.hartree == HartreeMode::free_space && grid_->kind() == GridKind::radial)
            build_kernel();
    }

    const GridPtr& grid() const { return grid_; }
    const Well& well() const { return well_; }
    const Params& params() const { return params_; }
    const Field& potential() const { return vpot_; }
    const BallPoisson& poisson() const { return poisson_; }
    const std::vector<std::uint8_t>* submask() const {
        return opt_.submask.empty() ? nullptr : &opt_.submask;
    }

    bool in_domain(std::size_t i) const {
        return grid_->dof(i) && (opt_.submask.empty() || opt_.submask[i]);
    }

    /// Quadrature over the model's domain.
    double quad(const std::vector<double>& f) const {
        const auto& w = grid_->weights();
        double acc = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (in_domain(i)) acc += w[i] * f[i];
        return acc;
    }

    /// ⟨u,v⟩ = ∫∇u·∇v + V u v on the model domain.
    double dv(const Field& u, const Field& v) const {
        double acc = grid_->dirichlet_form(u.values(), v.values(), submask());
        const auto& w = grid_->weights();
        for (std::size_t i = 0; i < u.size(); ++i)
            if (in_domain(i)) acc += w[i] * vpot_[i] * u[i] * v[i];
        return acc;
    }
    double dv_norm(const Field& u) const { return std::sqrt(std::max(0.0, dv(u, u))); }

    double l2w(const Field& u, const Field& v) const {
        const auto& w = grid_->weights();
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (in_domain(i)) acc += w[i] * u[i] * v[i];
        return acc;
    }

    PoissonSolution hartree(const Field& u) const {
        if (params_.lambda == 0.0) { // Hartree term absent; skip the solve
            PoissonSolution s;
            s.phi = Field(grid_);
            return s;
        }
        if (opt_.hartree == HartreeMode::ball) return poisson_.solve(masked(u));
        if (grid_->kind() == GridKind::radial) return kernel_solve(u);
        return monopole_solve(u);
    }

    /// Poisson inverse applied to a general density (Jacobian building block).
    Field hartree_inverse(const Field& density) const {
        if (opt_.hartree == HartreeMode::ball) return poisson_.apply_inverse(density);
        if (grid_->kind() == GridKind::radial) return kernel_apply(density);
        Field phi = poisson_.apply_inverse(density);
        const double q = quad_density(density);
        const double shift = q / (4.0 * std::numbers::pi * grid_->k());
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (in_domain(i)) phi[i] += shift;
        return phi;
    }

    EnergyBreakdown energy(const Field& u) const { return energy(u, hartree(u)); }

    EnergyBreakdown energy(const Field& u, const PoissonSolution& phi) const {
        EnergyBreakdown e;
        const auto& w = grid_->weights();
        double quad_v = 0.0, power = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (in_domain(i)) {
                quad_v += w[i] * vpot_[i] * u[i] * u[i];
                power += w[i] * std::pow(std::abs(u[i]), params_.p + 1.0);
            }
        e.kinetic = 0.5 * (grid_->dirichlet_form(u.values(), u.values(), submask()) + quad_v);
        e.hartree = 0.25 * params_.lambda * phi.coupling;
        e.potential_power = power / (params_.p + 1.0);
        e.total = e.kinetic + e.hartree - e.potential_power;
        return e;
    }

    EnergyResidual residual(const Field& u) const { return residual(u, hartree(u)); }

    EnergyResidual residual(const Field& u, const PoissonSolution& phi) const {
        EnergyResidual res{Field(grid_), 0.0, 0.0};
        std::vector<double> lap;
        grid_->laplacian(u.values(), lap, submask());
        const auto& w = grid_->weights();
        double norm2 = 0.0, dvq = 0.0, power = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!in_domain(i)) continue;
            const double r = -lap[i] + vpot_[i] * u[i] + params_.lambda * phi.phi[i] * u[i] -
                             odd_power(u[i], params_.p);
            res.r[i] = r;
            norm2 += w[i] * r * r;
            dvq += w[i] * vpot_[i] * u[i] * u[i];
            power += w[i] * std::pow(std::abs(u[i]), params_.p + 1.0);
        }
        res.norm_l2 = std::sqrt(norm2);
        const double dv_uu = grid_->dirichlet_form(u.values(), u.values(), submask()) + dvq;
        res.nehari_gap = dv_uu + params_.lambda * phi.coupling - power;
        return res;
    }

    Field masked(const Field& u) const {
        Field out = u;
        for (std::size_t i = 0; i < out.size(); ++i)
            if (!in_domain(i)) out[i] = 0.0;
        return out;
    }

private:
    double quad_density(const Field& density) const {
        const auto& w = grid_->weights();
        double acc = 0.0;
        for (std::size_t i = 0; i < density.size(); ++i)
            if (in_domain(i)) acc += w[i] * density[i];
        return acc;
    }

    // Radial Newtonian kernel G_ij = 1/(4π max(r_i, r_j)); the (0,0) self
    // cell uses the analytic cell average, r_eff = h/3.
    void build_kernel() {
        const int n = grid_->n();
        kernel_r_.resize(n);
        for (int i = 0; i < n; ++i) kernel_r_[i] = grid_->radius(i);
        kernel_r_[0] = grid_->h() / 3.0;
    }

    Field kernel_apply(const Field& density) const {
        const int n = grid_->n();
        const auto& w = grid_->weights();
        const double pi4 = 4.0 * std::numbers::pi;
        std::vector<double> rho(n, 0.0);
        for (int i = 0; i < n; ++i)
            if (in_domain(i)) rho[i] = w[i] * density[i];
        // prefix/suffix split of Σ_j rho_j / max(r_i, r_j)
        std::vector<double> suffix(n + 1, 0.0);
        for (int j = n - 1; j > 0; --j) suffix[j] = suffix[j + 1] + rho[j] / grid_->radius(j);
        Field phi(grid_);
        double prefix = rho[0]; // charge at radii <= r_i
        phi[0] = rho[0] / (pi4 * kernel_r_[0]) + suffix[1] / pi4;
        for (int i = 1; i < n; ++i) {
            prefix += rho[i];
            phi[i] = (prefix / grid_->radius(i) + suffix[i + 1]) / pi4;
        }
        return phi;
    }

    PoissonSolution kernel_solve(const Field& u) const {
        Field density(grid_);
        for (std::size_t i = 0; i < density.size(); ++i)
            density[i] = in_domain(i) ? u[i] * u[i] : 0.0;
        PoissonSolution s;
        s.boundary = PoissonBoundary::free_space;
        s.phi = kernel_apply(density);
        s.iterations = 0;
        s.grad_energy = grid_->interior_grad_form(s.phi.values(), s.phi.values());
        s.coupling = l2w(s.phi, density);
        s.residual = 0.0;
        return s;
    }

    PoissonSolution monopole_solve(const Field& u) const {
        Field mu = masked(u);
        PoissonSolution s = poisson_.solve(mu);
        const double q = total_charge(mu);
        const double shift = q / (4.0 * std::numbers::pi * grid_->k());
        for (std::size_t i = 0; i < s.phi.size(); ++i)
            if (grid_->active(i)) s.phi[i] += shift;
        s.boundary = PoissonBoundary::free_space;
        s.coupling += shift * q;
        s.grad_energy = grid_->interior_grad_form(s.phi.values(), s.phi.values());
        return s;
    }

    GridPtr grid_;
    Well well_;
    Params params_;
    Options opt_;
    BallPoisson poisson_;
    Field vpot_;
    std::vector<double> kernel_r_;
};

/// One-shot conveniences; solvers hold an EnergyModel instead.
inline EnergyBreakdown energy(const Field& u, const Params& params, const Well& well) {
    return EnergyModel(u.grid_ptr(), well, params).energy(u);
}
inline EnergyResidual residual(const Field& u, const Params& params, const Well& well) {
    return EnergyModel(u.grid_ptr(), well, params).residual(u);
}

/// Polynomial bump (1 - |x-x₀|²/ε₀²)² on the inscribed ball of Ω₀.
inline Field omega0_bump(const Well& well, GridPtr grid, double shrink = 1.0) {
    const auto [x0, eps0_raw] = well.inscribed_ball();
    const double eps0 = eps0_raw * shrink;
    return Field::sample(grid, [&](const Point& x) {
        const double d2 = (x[0] - x0[0]) * (x[0] - x0[0]) + (x[1] - x0[1]) * (x[1] - x0[1]) +
                          (x[2] - x0[2]) * (x[2] - x0[2]);
        const double s = d2 / (eps0 * eps0);
        return s < 1.0 ? (1.0 - s) * (1.0 - s) : 0.0;
    });
}

/// Mountain-pass endpoint, subquadratic regime: e = t₀w with w a fixed bump
/// supported in Ω₀ and t₀ the smallest doubling power of 2 with
/// I_{λ=0}(e) < 0 and ‖e‖ > ρ. Independent of λ and µ.
inline Field endpoint_subquadratic(const Well& well, GridPtr grid, const Params& params,
                                   double rho) {
    if (regime_of(params.p) != Regime::subquadratic)
        throw std::invalid_argument("endpoint_subquadratic: p must be in (1,2)");
    Params lam0 = params;
    lam0.lambda = 0.0;
    EnergyModel model(grid, well, lam0);
    Field w = omega0_bump(well, grid);
    if (w.max_abs() == 0.0)
        throw std::invalid_argument("endpoint_subquadratic: grid does not resolve Ω₀");
    PoissonSolution none; // λ = 0: Hartree term vanishes, skip the solve
    none.phi = Field(grid);
    double t0 = 1.0;
    for (int it = 0; it < 80; ++it) {
        Field e = t0 * w;
        if (model.energy(e, none).total < 0.0 && model.dv_norm(e) > rho) return e;
        t0 *= 2.0;
    }
    throw std::runtime_error("endpoint_subquadratic: no negative-energy endpoint found");
}

/// Mountain-pass endpoint, supercubic regime: w_t(x) = t²w(t(x-x₀)) with t
/// doubled until I_λ(w_t) < 0 and ‖w_t‖ > ρ; valid for every λ > 0 since
/// the t^{2p-1} term dominates (2p-1 > 3). When the grid cannot resolve the
/// shrinking support (coarse box3d), an amplitude-only ray t·w is tried
/// instead, which reaches negative energy whenever ∫|w|^{p+1} outweighs the
/// Hartree quartic along that ray.
inline Field endpoint_supercubic(const Well& well, GridPtr grid, const Params& params,
                                 double rho) {
    if (regime_of(params.p) != Regime::supercubic)
        throw std::invalid_argument("endpoint_supercubic: p must be in [3,5)");
    const auto [x0, eps0] = well.inscribed_ball();
    EnergyModel model(grid, well, params);
    double t = 2.0;
    for (int it = 0; it < 40; ++it) {
        if (eps0 / t < 3.0 * grid->h()) break; // support no longer resolved
        Field wt = Field::sample(grid, [&](const Point& x) {
            const double d2 = (x[0] - x0[0]) * (x[0] - x0[0]) +
                              (x[1] - x0[1]) * (x[1] - x0[1]) +
                              (x[2] - x0[2]) * (x[2] - x0[2]);
            const double s = t * t * d2 / (eps0 * eps0);
            return s < 1.0 ? t * t * (1.0 - s) * (1.0 - s) : 0.0;
        });
        if (model.energy(wt).total < 0.0 && model.dv_norm(wt) > rho) return wt;
        t *= 2.0;
    }
    Field w = omega0_bump(well, grid);
    if (w.max_abs() == 0.0)
        throw std::runtime_error("endpoint_supercubic: grid does not resolve Ω₀");
    double amp = 2.0;
    for (int it = 0; it < 60; ++it) {
        Field e = amp * w;
        if (model.energy(e).total < 0.0 && model.dv_norm(e) > rho) return e;
        amp *= 2.0;
    }
    throw std::runtime_error("endpoint_supercubic: no negative-energy endpoint found");
}

/// Upper bound for the mountain-pass level: max_{t∈[0,1]} I(te) along the
/// straight segment, via the scaling I(te) = t²K + t⁴H - t^{p+1}P and a
/// refining 1D grid search.
inline double mp_level_upper(const Field& endpoint, const Params& params, const Well& well) {
    EnergyModel model(endpoint.grid_ptr(), well, params);
    const auto phi = model.hartree(endpoint);
    const EnergyBreakdown parts = model.energy(endpoint, phi);
    const double K = parts.kinetic, H = parts.hartree, P = parts.potential_power;
    auto val = [&](double t) {
        return t * t * K + t * t * t * t * H - std::pow(t, params.p + 1.0) * P;
    };
    double lo = 0.0, hi = 1.0;
    double best_t = 0.0, best = 0.0;
    for (int round = 0; round < 40; ++round) {
        const int samples = 128;
        best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= samples; ++i) {
            const double t = lo + (hi - lo) * i / samples;
            const double v = val(t);
            if (v > best) {
                best = v;
                best_t = t;
            }
        }
        const double step = (hi - lo) / samples;
        lo = std::max(0.0, best_t - step);
        hi = std::min(1.0, best_t + step);
        if (hi - lo < 1e-14) break;
    }
    return best;
}

} // namespace spwell
