#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spwell/constants.hpp"
#include "spwell/discretization.hpp"
#include "spwell/energy.hpp"
#include "spwell/field.hpp"
#include "spwell/parallel.hpp"
#include "spwell/poisson.hpp"
#include "spwell/sobolev.hpp"

namespace spwell {

struct SolveOptions {
    double newton_tol = 1e-10;
    int newton_max_steps = 40;
    int minres_max = 500;
    double level_tol = 1e-8;
    int path_samples = 33;
    int max_sweeps = 50000;
    double zero_tol = 1e-6;   // ‖u‖ below this counts as the zero field
    double basin = 0.1;       // residual threshold for Newton handoff in flows
    int flow_max_iter = 20000;
    double nehari_tol = 1e-6;
};

enum class Provenance { mountain_pass, newton, gradient_flow, continuation };
enum class SolveStatus { converged, zero, no_pass, diverged };

/// A converged critical point (or the diagnostic outcome of the attempt).
struct Solution {
    Field u;
    Field phi;
    Params params;
    EnergyBreakdown energy;
    double residual_norm = 0.0;
    double nehari_gap = 0.0;
    double dv_norm = 0.0;
    int iterations = 0;
    Provenance provenance = Provenance::mountain_pass;
    SolveStatus status = SolveStatus::converged;
    // mountain-pass bookkeeping
    double mp_level = std::numeric_limits<double>::quiet_NaN();
    int sweeps = 0;
    bool endpoint_admissible = true;
    double rho = 0.0, alpha = 0.0, level_upper = 0.0;

    bool nontrivial() const { return status == SolveStatus::converged; }
};

/// Shifted elliptic operator A + W·diag(c) (c = V_µ for the Sobolev
/// preconditioner). Radial: cached LDLᵀ; box3d: CG.
class ShiftedElliptic {
public:
    ShiftedElliptic(GridPtr grid, const Field& coef, const std::vector<std::uint8_t>* sub)
        : grid_(std::move(grid)), coef_(coef.values()) {
        if (sub) sub_ = *sub;
        if (grid_->kind() == GridKind::radial) factor();
    }

    Field solve(const Field& rhs_density) const {
        const Grid& g = *grid_;
        std::vector<double> b(g.node_count(), 0.0);
        for (std::size_t i = 0; i < b.size(); ++i)
            if (is_dof(i)) b[i] = g.weights()[i] * rhs_density[i];
        std::vector<double> x(g.node_count(), 0.0);
        if (g.kind() == GridKind::radial) {
            substitute(b, x);
        } else {
            cg(b, x);
        }
        return Field(grid_, std::move(x));
    }

private:
    bool is_dof(std::size_t i) const { return grid_->dof(i) && (sub_.empty() || sub_[i]); }

    void factor() {
        const int n = grid_->n();
        m_ = 0;
        for (int i = 0; i < n; ++i)
            if (is_dof(i)) ++m_;
        const double h = grid_->h();
        d_.resize(m_);
        l_.assign(std::max(0, m_ - 1), 0.0);
        std::vector<double> off(std::max(0, m_ - 1), 0.0);
        for (int i = 0; i < m_; ++i) {
            double diag = grid_->face_area(i) / h;
            if (i > 0) diag += grid_->face_area(i - 1) / h;
            diag += grid_->weights()[i] * coef_[i];
            d_[i] = diag;
            if (i + 1 < m_) off[i] = -grid_->face_area(i) / h;
        }
        for (int i = 0; i + 1 < m_; ++i) {
            l_[i] = off[i] / d_[i];
            d_[i + 1] -= off[i] * l_[i];
        }
    }

    void substitute(const std::vector<double>& b, std::vector<double>& x) const {
        std::vector<double> y(m_);
        y[0] = b[0];
        for (int i = 1; i < m_; ++i) y[i] = b[i] - l_[i - 1] * y[i - 1];
        for (int i = 0; i < m_; ++i) y[i] /= d_[i];
        x[m_ - 1] = y[m_ - 1];
        for (int i = m_ - 2; i >= 0; --i) x[i] = y[i] - l_[i] * x[i + 1];
    }

    void cg(const std::vector<double>& b, std::vector<double>& x) const {
        const Grid& g = *grid_;
        const std::size_t total = g.node_count();
        auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
            g.apply_stiffness(v, out, sub_.empty() ? nullptr : &sub_);
            for (std::size_t i = 0; i < total; ++i)
                if (is_dof(i)) out[i] += g.weights()[i] * coef_[i] * v[i];
        };
        std::vector<double> r = b, p = b, ap(total);
        auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < total; ++i)
                if (is_dof(i)) acc += a[i] * c[i];
            return acc;
        };
        const double bnorm = std::sqrt(dot(b, b));
        if (bnorm == 0.0) return;
        double rr = dot(r, r);
        for (int it = 0; it < 40 * g.n(); ++it) {
            apply(p, ap);
            const double alpha = rr / dot(p, ap);
            for (std::size_t i = 0; i < total; ++i)
                if (is_dof(i)) {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * ap[i];
                }
            const double rr_new = dot(r, r);
            if (std::sqrt(rr_new) <= 1e-11 * bnorm) return;
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < total; ++i)
                if (is_dof(i)) p[i] = r[i] + beta * p[i];
        }
    }

    GridPtr grid_;
    std::vector<double> coef_;
    std::vector<std::uint8_t> sub_;
    int m_ = 0;
    std::vector<double> d_, l_;
};

/// Linearization of the Euler–Lagrange map at u:
///   J v = -Δv + V v + λ(φ_u v + 2u·K(uv)) - p(u²+ε²)^{(p-1)/2} v,
/// symmetric in the weighted L² inner product. ε regularizes the p < 2
/// derivative; the residual itself stays unregularized.
class Linearization {
public:
    Linearization(const EnergyModel& model, const Field& u, const PoissonSolution& phi)
        : model_(model), u_(u), phi_(phi.phi), apow_(u.grid_ptr()) {
        const double p = model.params().p;
        const double eps2 = p < 2.0 ? 1e-16 : 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (model.in_domain(i))
                apow_[i] = p * std::pow(u[i] * u[i] + eps2, (p - 1.0) / 2.0);
    }

    Field apply(const Field& v) const {
        const EnergyModel& m = model_;
        const Grid& g = *m.grid();
        const double lambda = m.params().lambda;
        std::vector<double> lap;
        g.laplacian(v.values(), lap, m.submask());
        Field out(m.grid());
        std::optional<Field> kuv;
        if (lambda > 0.0) {
            Field uv(m.grid());
            for (std::size_t i = 0; i < uv.size(); ++i)
                if (m.in_domain(i)) uv[i] = u_[i] * v[i];
            kuv = m.hartree_inverse(uv);
        }
        const Field& vpot = m.potential();
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!m.in_domain(i)) continue;
            double r = -lap[i] + vpot[i] * v[i] - apow_[i] * v[i];
            if (lambda > 0.0)
                r += lambda * (phi_[i] * v[i] + 2.0 * u_[i] * (*kuv)[i]);
            out[i] = r;
        }
        return out;
    }

private:
    const EnergyModel& model_;
    Field u_;
    Field phi_;
    Field apow_;
};

/// Preconditioned MINRES in the weighted L² inner product; M is the SPD
/// Sobolev preconditioner (A + W·V)⁻¹.
inline Field minres(const EnergyModel& model, const Linearization& lin,
                    const ShiftedElliptic& precond, const Field& b, double rtol, int max_iter,
                    int* iters_out = nullptr) {
    auto inner = [&](const Field& a, const Field& c) { return model.l2w(a, c); };

    Field x(model.grid());
    Field r1 = b;
    Field y = precond.solve(r1);
    double beta1 = std::sqrt(std::max(0.0, inner(r1, y)));
    if (iters_out) *iters_out = 0;
    if (beta1 == 0.0) return x;

    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
    double cs = -1.0, sn = 0.0, oldeps = 0.0;
    Field r2 = r1;
    Field w(model.grid()), w2(model.grid()), w1(model.grid());

    for (int itn = 1; itn <= max_iter; ++itn) {
        Field v = y;
        v *= 1.0 / beta;
        y = lin.apply(v);
        if (itn >= 2) {
            Field tmp = r1;
            tmp *= beta / oldb;
            y -= tmp;
        }
        const double alfa = inner(v, y);
        {
            Field tmp = r2;
            tmp *= alfa / beta;
            y -= tmp;
        }
        r1 = r2;
        r2 = y;
        y = precond.solve(r2);
        oldb = beta;
        const double bb = inner(r2, y);
        beta = std::sqrt(std::max(0.0, bb));

        oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        double gamma = std::sqrt(gbar * gbar + beta * beta);
        gamma = std::max(gamma, 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        w1 = w2;
        w2 = w;
        w = v;
        {
            Field tmp = w1;
            tmp *= oldeps;
            w -= tmp;
        }
        {
            Field tmp = w2;
            tmp *= delta;
            w -= tmp;
        }
        w *= 1.0 / gamma;
        {
            Field tmp = w;
            tmp *= phi;
            x += tmp;
        }
        if (iters_out) *iters_out = itn;
        if (phibar <= rtol * beta1 || beta <= 1e-300) break;
    }
    return x;
}

/// Matrix-free Newton–Krylov refinement of a seed toward I'(u) = 0.
/// Inexact forcing, residual-norm backtracking; on divergence returns the
/// best iterate with a diagnostic status.
inline Solution refine_newton(const EnergyModel& model, const Field& seed,
                              const SolveOptions& opts = {},
                              Provenance provenance = Provenance::newton) {
    Field u = model.masked(seed);
    ShiftedElliptic precond(model.grid(), model.potential(), model.submask());

    Solution out;
    out.params = model.params();
    out.provenance = provenance;

    PoissonSolution phi = model.hartree(u);
    EnergyResidual res = model.residual(u, phi);
    double best_norm = res.norm_l2;
    Field best_u = u;

    int steps = 0;
    while (res.norm_l2 > opts.newton_tol && steps < opts.newton_max_steps) {
        ++steps;
        Linearization lin(model, u, phi);
        Field rhs = res.r;
        rhs *= -1.0;
        const double forcing =
            std::clamp(res.norm_l2, 0.1 * opts.newton_tol / std::max(res.norm_l2, 1e-300), 0.1);
        Field d = minres(model, lin, precond, rhs, std::min(forcing, 0.1), opts.minres_max);

        double s = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 14; ++bt) {
            Field trial = u;
            {
                Field step = d;
                step *= s;
                trial += step;
            }
            PoissonSolution phi_t = model.hartree(trial);
            EnergyResidual res_t = model.residual(trial, phi_t);
            if (res_t.norm_l2 < res.norm_l2 * (1.0 - 1e-4 * s)) {
                u = std::move(trial);
                phi = std::move(phi_t);
                res = std::move(res_t);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break;
        if (res.norm_l2 < best_norm) {
            best_norm = res.norm_l2;
            best_u = u;
        }
    }

    if (res.norm_l2 > best_norm) {
        u = best_u;
        phi = model.hartree(u);
        res = model.residual(u, phi);
    }
    out.u = u;
    out.phi = phi.phi;
    out.energy = model.energy(u, phi);
    out.residual_norm = res.norm_l2;
    out.nehari_gap = res.nehari_gap;
    out.dv_norm = model.dv_norm(u);
    out.iterations = steps;
    if (res.norm_l2 <= opts.newton_tol)
        out.status = out.dv_norm > opts.zero_tol ? SolveStatus::converged : SolveStatus::zero;
    else
        out.status = SolveStatus::diverged;
    return out;
}

/// Sobolev-preconditioned descent with opportunistic Newton polish:
/// returns a Solution when the residual tolerance is met, or the zero
/// outcome when the iterate collapses below zero_tol.
inline Solution gradient_flow(const EnergyModel& model, const Field& u0,
                              const SolveOptions& opts = {}) {
    Field u = model.masked(u0);
    ShiftedElliptic precond(model.grid(), model.potential(), model.submask());

    Solution out;
    out.params = model.params();
    out.provenance = Provenance::gradient_flow;

    const double norm0 = std::max(1.0, model.dv_norm(u));
    const double e_start = model.energy(u).total;
    double basin = opts.basin;
    for (int it = 0; it < opts.flow_max_iter; ++it) {
        const double nrm = model.dv_norm(u);
        if (nrm > 1e6 * norm0) { // sliding down an unbounded-below chute
            Solution div = refine_newton(model, u, opts, Provenance::gradient_flow);
            div.status = div.status == SolveStatus::converged ? div.status
                                                              : SolveStatus::diverged;
            div.iterations += it;
            return div;
        }
        if (nrm < opts.zero_tol) {
            out.u = Field(model.grid());
            out.phi = Field(model.grid());
            out.status = SolveStatus::zero;
            out.iterations = it;
            return out;
        }
        PoissonSolution phi = model.hartree(u);
        EnergyResidual res = model.residual(u, phi);
        if (res.norm_l2 <= opts.newton_tol) {
            Solution s = refine_newton(model, u, opts, Provenance::gradient_flow);
            s.iterations += it;
            return s;
        }
        if (res.norm_l2 <= basin * std::max(1.0, nrm)) {
            Solution s = refine_newton(model, u, opts, Provenance::gradient_flow);
            if (s.status == SolveStatus::converged || s.status == SolveStatus::zero) {
                s.iterations += it;
                return s;
            }
            basin *= 0.25; // Newton refused; keep descending
        }
        Field d = precond.solve(res.r);
        const double slope = model.l2w(res.r, d); // ≥ 0, P is SPD
        const double e0 = model.energy(u, phi).total;
        if (e0 < -1e3 * (1.0 + std::abs(e_start))) { // unboundedly negative branch
            Solution div;
            div.params = model.params();
            div.provenance = Provenance::gradient_flow;
            div.u = u;
            div.phi = phi.phi;
            div.energy = model.energy(u, phi);
            div.residual_norm = res.norm_l2;
            div.nehari_gap = res.nehari_gap;
            div.dv_norm = nrm;
            div.iterations = it;
            div.status = SolveStatus::diverged;
            return div;
        }
        double s = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            Field trial = u;
            {
                Field step = d;
                step *= -s;
                trial += step;
            }
            if (model.energy(trial).total <= e0 - 1e-4 * s * slope) {
                u = std::move(trial);
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            // stationary for the line search: try Newton once, else report
            Solution s2 = refine_newton(model, u, opts, Provenance::gradient_flow);
            s2.iterations += it;
            if (s2.status == SolveStatus::converged || s2.status == SolveStatus::zero) return s2;
            s2.status = SolveStatus::diverged;
            return s2;
        }
    }
    Solution s = refine_newton(model, u, opts, Provenance::gradient_flow);
    s.iterations += opts.flow_max_iter;
    return s;
}

/// Ray maximization helper: the first local maximum of
///   i(t) = t²·k2/2 + t⁴·λq/4 - t^{p+1}·pp/(p+1)
/// along the ray through a direction field, or nothing when the ray has no
/// peak (the level-collapse / nonexistence signature).
struct RayPeak {
    double t = 0.0;
    double value = 0.0;
};

inline std::optional<RayPeak> ray_peak(double k2, double lambda_q, double pp, double p,
                                       double t_ref) {
    if (!(k2 > 0.0) || !(pp > 0.0)) return std::nullopt;
    // i'(t)/t = k2 + λq t² - pp t^{p-1}; find its first down-crossing
    auto psi = [&](double t) {
        return k2 + lambda_q * t * t - pp * std::pow(t, p - 1.0);
    };
    double lo = 1e-6 * t_ref;
    if (psi(lo) <= 0.0) lo = 1e-12 * t_ref;
    if (psi(lo) <= 0.0) return std::nullopt;
    double hi = lo;
    bool bracketed = false;
    for (int it = 0; it < 400; ++it) {
        hi *= 1.2;
        if (psi(hi) < 0.0) {
            bracketed = true;
            break;
        }
        lo = hi;
    }
    if (!bracketed) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (psi(mid) > 0.0 ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    RayPeak out;
    out.t = 0.5 * (lo + hi);
    out.value = 0.5 * out.t * out.t * k2 + 0.25 * lambda_q * std::pow(out.t, 4) -
                std::pow(out.t, p + 1.0) * pp / (p + 1.0);
    return out;
}

/// Numerical mountain pass. The path is the ray segment through the current
/// direction; each sweep deforms the path maximizer by a scaled
/// preconditioned descent step and re-maximizes along the deformed ray
/// (closed-form in t after one Poisson solve). The level is monotone
/// nonincreasing across sweeps and can only collapse by losing the ray
/// peak altogether, which is reported as the no-pass diagnostic.
inline Solution mountain_pass(const EnergyModel& model, const SolveOptions& opts = {},
                              const std::optional<Field>& endpoint = std::nullopt) {
    const Params& prm = model.params();
    if (prm.regime() == Regime::middle)
        throw std::invalid_argument("mountain_pass: p in [2,3) is outside the solvable regimes");

    const SphereGeometry geo = sphere_geometry(prm.p);
    Field e = endpoint ? *endpoint
              : prm.regime() == Regime::subquadratic
                  ? endpoint_subquadratic(model.well(), model.grid(), prm, geo.rho)
                  : endpoint_supercubic(model.well(), model.grid(), prm, geo.rho);

    Solution out;
    out.params = prm;
    out.rho = geo.rho;
    out.alpha = geo.alpha;
    out.level_upper = mp_level_upper(e, prm, model.well());
    out.endpoint_admissible = model.energy(e).total < 0.0;

    auto peak_of = [&](const Field& dir, double t_ref) -> std::optional<RayPeak> {
        const double k2 = model.dv(dir, dir);
        const double q = prm.lambda > 0.0 ? model.hartree(dir).coupling : 0.0;
        double pp = 0.0;
        const auto& w = model.grid()->weights();
        for (std::size_t i = 0; i < dir.size(); ++i)
            if (model.in_domain(i)) pp += w[i] * std::pow(std::abs(dir[i]), prm.p + 1.0);
        return ray_peak(k2, prm.lambda * q, pp, prm.p, t_ref);
    };

    Field dir = e;
    auto peak = peak_of(dir, 1.0);
    if (!peak) { // no admissible peak anywhere on the starting ray
        out.status = SolveStatus::no_pass;
        out.u = Field(model.grid());
        out.phi = Field(model.grid());
        out.mp_level = 0.0;
        return out;
    }

    ShiftedElliptic precond(model.grid(), model.potential(), model.submask());
    Field w = dir;
    w *= peak->t;
    double level = peak->value;
    out.mp_level = level;

    std::optional<Solution> refined;
    double basin = opts.basin;
    int sweeps = 0;
    bool stalled = false;
    for (; sweeps < opts.max_sweeps; ++sweeps) {
        PoissonSolution phi = model.hartree(w);
        EnergyResidual res = model.residual(w, phi);
        const double wn = std::sqrt(std::max(0.0, model.dv(w, w)));
        if (stalled || res.norm_l2 <= basin * std::max(1.0, wn)) {
            Solution attempt = refine_newton(model, w, opts, Provenance::mountain_pass);
            if (attempt.status == SolveStatus::converged ||
                attempt.status == SolveStatus::zero) {
                refined = std::move(attempt);
                break;
            }
            if (stalled) { // nothing left to deform; report the best iterate
                refined = std::move(attempt);
                break;
            }
            basin *= 0.1;
        }
        Field d = precond.solve(res.r);
        const double slope = model.l2w(res.r, d);
        const double dn = std::sqrt(std::max(0.0, model.dv(d, d)));
        double s = dn > 0.5 * wn ? 0.5 * wn / dn : 1.0;
        bool accepted = false;
        if (slope > 1e-14 * std::abs(level) + 1e-300) {
            for (int bt = 0; bt < 40; ++bt) {
                Field trial = w;
                {
                    Field step = d;
                    step *= -s;
                    trial += step;
                }
                auto pk = peak_of(trial, 1.0);
                if (pk && pk->value <= level - 1e-4 * s * slope) {
                    trial *= pk->t;
                    w = std::move(trial);
                    level = pk->value;
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
        }
        if (!accepted) stalled = true; // maximizer near-critical: Newton next
        if (!stalled && out.mp_level - level < opts.level_tol && sweeps > 2) stalled = true;
        out.mp_level = level;
    }
    out.sweeps = sweeps;
    out.mp_level = level;

    if (!refined) refined = refine_newton(model, w, opts, Provenance::mountain_pass);
    if (refined->status == SolveStatus::diverged &&
        refined->residual_norm > 1e-6 * std::max(1.0, refined->dv_norm)) {
        // classify: a vanishing flow from the stalled maximizer is the
        // level-collapse signature of the nonexistence regime (a Newton
        // stall at tiny residual is a tolerance issue instead, and keeps
        // its best iterate)
        Solution cls = gradient_flow(model, w, opts);
        if (cls.status == SolveStatus::zero) refined = std::move(cls);
    }
    refined->provenance = Provenance::mountain_pass;
    refined->sweeps = sweeps;
    refined->mp_level = level;
    refined->rho = geo.rho;
    refined->alpha = geo.alpha;
    refined->level_upper = out.level_upper;
    refined->endpoint_admissible = out.endpoint_admissible;
    if (refined->status == SolveStatus::zero) refined->status = SolveStatus::no_pass;
    return *refined;
}

/// Sampled admissible path from 0 through a critical point's ray:
/// γ(0) = 0, I(γ(1)) < 0, ‖γ(1)‖ > ρ, level = max over the samples.
struct MpPath {
    std::vector<Field> samples;
    double level = 0.0;
};

inline MpPath mp_path(const EnergyModel& model, const Field& u, double rho, int n = 33) {
    double t_end = 1.0;
    bool found = false;
    for (int it = 0; it < 80; ++it) {
        Field e = u;
        e *= t_end;
        if (model.energy(e).total < 0.0 && model.dv_norm(e) > rho) {
            found = true;
            break;
        }
        t_end *= 1.25;
    }
    if (!found) throw std::runtime_error("mp_path: ray never reaches negative energy");
    MpPath out;
    out.level = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        Field gi = u;
        gi *= t_end * i / (n - 1);
        out.level = std::max(out.level, model.energy(gi).total);
        out.samples.push_back(std::move(gi));
    }
    return out;
}

/// Attach the mountain-pass geometry numbers (ρ, α, c_λ upper bound) to a
/// solution produced by Newton continuation rather than a fresh pass.
inline void fill_geometry(Solution& s, const EnergyModel& model) {
    const SphereGeometry geo = sphere_geometry(model.params().p);
    s.rho = geo.rho;
    s.alpha = geo.alpha;
    Field e = model.params().regime() == Regime::subquadratic
                  ? endpoint_subquadratic(model.well(), model.grid(), model.params(), geo.rho)
                  : endpoint_supercubic(model.well(), model.grid(), model.params(), geo.rho);
    s.level_upper = mp_level_upper(e, model.params(), model.well());
}

/// Minimal-energy critical point among n_starts independent searches:
/// the mountain pass, perturbed Newton restarts, sign flips, and random
/// descent starts. Deterministic for a fixed seed.
struct GroundStateResult {
    Solution best;
    std::vector<Solution> critical_points;
    double nehari_lower = 0.0; // C_p = S_emb^{-(p+1)/(p-1)}
};

inline GroundStateResult ground_state(const EnergyModel& model, int n_starts,
                                      std::uint64_t seed, const SolveOptions& opts = {}) {
    GroundStateResult out;
    out.nehari_lower = nehari_lower_bound(model.params().p);

    std::vector<Solution> found;
    auto consider = [&](Solution s) {
        if (s.status != SolveStatus::converged) return;
        for (const auto& other : found)
            if (std::sqrt(std::max(0.0, model.dv(s.u - other.u, s.u - other.u))) <=
                1e-6 * (s.dv_norm + other.dv_norm))
                return; // duplicate critical point
        found.push_back(std::move(s));
    };

    Solution base = mountain_pass(model, opts);
    consider(base);

    std::mt19937_64 rng(seed);
    const double scale = base.status == SolveStatus::converged ? base.dv_norm : 1.0;
    for (int j = 1; j < n_starts; ++j) {
        Field start(model.grid());
        switch (j % 3) {
        case 1: { // perturbed restart around the base point
            Field bump = random_bump_field(model.grid(), rng);
            const double bn = std::sqrt(std::max(1e-30, model.dv(bump, bump)));
            bump *= 0.05 * scale / bn;
            start = base.status == SolveStatus::converged ? base.u + bump : bump;
            consider(refine_newton(model, start, opts));
            break;
        }
        case 2: { // sign flip
            if (base.status == SolveStatus::converged) {
                start = base.u;
                start *= -1.0;
                consider(refine_newton(model, start, opts));
            } else {
                Field bump = random_bump_field(model.grid(), rng);
                consider(gradient_flow(model, bump, opts));
            }
            break;
        }
        default: { // fresh random descent
            Field bump = random_bump_field(model.grid(), rng);
            const double bn = std::sqrt(std::max(1e-30, model.dv(bump, bump)));
            bump *= scale / bn;
            consider(gradient_flow(model, bump, opts));
            break;
        }
        }
    }

    if (found.empty()) {
        out.best = base; // carries the diagnostic status
        return out;
    }
    std::size_t arg = 0;
    for (std::size_t i = 1; i < found.size(); ++i)
        if (found[i].energy.total < found[arg].energy.total) arg = i;
    out.best = found[arg];
    out.critical_points = std::move(found);
    return out;
}

/// Domain approximation: solve on B_{k₀}, zero-extend as the seed on each
/// larger ball, and record Cauchy differences of consecutive extensions.
struct DomainApproxResult {
    std::vector<Solution> solutions;
    std::vector<double> cauchy_diffs; // ‖ũ_{k_{i+1}} - u_{k_i}‖ on the larger grid
    std::vector<GridPtr> grids;
    bool complete = false;
};

inline DomainApproxResult domain_approximation(const Params& params, const Well& well,
                                               const std::vector<double>& k_schedule, int n0,
                                               const SolveOptions& opts = {}) {
    if (k_schedule.size() < 2 || !std::is_sorted(k_schedule.begin(), k_schedule.end()))
        throw std::invalid_argument("domain_approximation: k_schedule must increase");
    DomainApproxResult out;
    const double h0 = k_schedule.front() / (n0 - 1);
    for (double k : k_schedule)
        out.grids.push_back(Grid::radial(k, static_cast<int>(std::lround(k / h0)) + 1));

    EnergyModel model0(out.grids.front(), well, params);
    Solution s = mountain_pass(model0, opts);
    if (s.status != SolveStatus::converged) {
        out.solutions.push_back(std::move(s));
        return out;
    }
    out.solutions.push_back(s);
    for (std::size_t i = 1; i < out.grids.size(); ++i) {
        EnergyModel model(out.grids[i], well, params);
        Field seed = extend(out.solutions.back().u, out.grids[i]);
        Solution next = refine_newton(model, seed, opts, Provenance::continuation);
        if (next.status == SolveStatus::converged) fill_geometry(next, model);
        else next = mountain_pass(model, opts);
        if (next.status != SolveStatus::converged) {
            out.solutions.push_back(std::move(next));
            return out; // partial results
        }
        out.cauchy_diffs.push_back(
            std::sqrt(std::max(0.0, model.dv(next.u - seed, next.u - seed))));
        out.solutions.push_back(std::move(next));
    }
    out.complete = true;
    return out;
}

/// Continuation of the supercubic branch along a decreasing λ schedule,
/// compared against a direct λ = 0 solve.
struct LambdaContinuationResult {
    std::vector<Solution> solutions; // one per λ in schedule order
    Solution direct_lambda0;
    std::vector<double> gaps_to_direct; // ‖u_λ - u₀‖ per schedule entry
    bool complete = false;
};

inline LambdaContinuationResult lambda_continuation(const Params& base, const Well& well,
                                                    GridPtr grid,
                                                    const std::vector<double>& lambdas,
                                                    const SolveOptions& opts = {}) {
    if (lambdas.empty() || !std::is_sorted(lambdas.rbegin(), lambdas.rend()))
        throw std::invalid_argument("lambda_continuation: schedule must decrease");
    LambdaContinuationResult out;

    Params p0 = base;
    p0.lambda = lambdas.front();
    EnergyModel model0(grid, well, p0);
    Solution cur = mountain_pass(model0, opts);
    if (cur.status != SolveStatus::converged) {
        out.solutions.push_back(std::move(cur));
        return out;
    }
    out.solutions.push_back(cur);
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        Params pi = base;
        pi.lambda = lambdas[i];
        EnergyModel model(grid, well, pi);
        Solution next = refine_newton(model, out.solutions.back().u, opts,
                                      Provenance::continuation);
        if (next.status != SolveStatus::converged) {
            out.solutions.push_back(std::move(next));
            return out;
        }
        fill_geometry(next, model);
        out.solutions.push_back(std::move(next));
    }

    Params pz = base;
    pz.lambda = 0.0;
    EnergyModel modelz(grid, well, pz);
    out.direct_lambda0 = refine_newton(modelz, out.solutions.back().u, opts,
                                       Provenance::continuation);
    if (out.direct_lambda0.status == SolveStatus::converged)
        fill_geometry(out.direct_lambda0, modelz);
    else
        out.direct_lambda0 = mountain_pass(modelz, opts);
    if (out.direct_lambda0.status != SolveStatus::converged) return out;

    for (const auto& s : out.solutions) {
        Field diff = s.u - out.direct_lambda0.u;
        out.gaps_to_direct.push_back(
            std::sqrt(std::max(0.0, modelz.dv(diff, diff))));
    }
    out.complete = true;
    return out;
}

/// Fresh mountain-pass levels at matched initialization across a λ ladder:
/// the endpoint is built once at the largest λ (it stays admissible for
/// smaller λ since I is pointwise nondecreasing in λ) and shared.
inline std::vector<Solution> lambda_level_scan(const Params& base, const Well& well,
                                               GridPtr grid, std::vector<double> lambdas,
                                               const SolveOptions& opts = {}) {
    std::sort(lambdas.begin(), lambdas.end());
    Params top = base;
    top.lambda = lambdas.back();
    const SphereGeometry geo = sphere_geometry(top.p);
    Field shared = top.regime() == Regime::subquadratic
                       ? endpoint_subquadratic(well, grid, top, geo.rho)
                       : endpoint_supercubic(well, grid, top, geo.rho);
    std::vector<Solution> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        Params p = base;
        p.lambda = lambdas[i];
        EnergyModel model(grid, well, p);
        out[i] = mountain_pass(model, opts, shared);
    });
    return out;
}

/// The Ω₀ node set of a well on a grid (Dirichlet sub-mask of the limit
/// problem: exactly the nodes where g = 0).
inline std::vector<std::uint8_t> omega0_submask(const Well& well, const Grid& grid) {
    std::vector<std::uint8_t> sub(grid.node_count(), 0);
    for (std::size_t i = 0; i < sub.size(); ++i)
        sub[i] = grid.dof(i) && well.inside_omega0(grid.coords(i)) ? 1 : 0;
    return sub;
}

/// Direct solve of the limit problem on Ω₀ with the free-space Hartree
/// (the equation the µ → ∞ limit satisfies on ℝ³ restricted to Ω₀).
inline Solution solve_limit_free(GridPtr grid, const Well& well, const Params& params,
                                 const std::optional<Field>& seed = std::nullopt,
                                 const SolveOptions& opts = {}) {
    EnergyModel::Options mo;
    mo.hartree = HartreeMode::free_space;
    mo.submask = omega0_submask(well, *grid);
    mo.unit_potential = true;
    EnergyModel model(grid, well, params, std::move(mo));
    if (seed) {
        Solution s = refine_newton(model, *seed, opts);
        if (s.status == SolveStatus::converged) return s;
    }
    return mountain_pass(model, opts);
}

/// Direct solve of the same-grid µ = ∞ problem: Dirichlet on the g > 0
/// node set, ball Hartree — the object the discrete µ-sweep converges to.
inline Solution solve_mu_infinity(GridPtr grid, const Well& well, const Params& params,
                                  const std::optional<Field>& seed = std::nullopt,
                                  const SolveOptions& opts = {}) {
    EnergyModel::Options mo;
    mo.hartree = HartreeMode::ball;
    mo.submask = omega0_submask(well, *grid);
    mo.unit_potential = true;
    EnergyModel model(grid, well, params, std::move(mo));
    if (seed) {
        Solution s = refine_newton(model, *seed, opts);
        if (s.status == SolveStatus::converged) return s;
    }
    return mountain_pass(model, opts);
}

} // namespace spwell
