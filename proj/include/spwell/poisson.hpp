#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spwell/bound_check.hpp"
#include "spwell/discretization.hpp"
#include "spwell/field.hpp"
#include "spwell/grid.hpp"

namespace spwell {

struct PoissonError : std::runtime_error {
    double residual;
    PoissonError(const std::string& what, double res)
        : std::runtime_error(what + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

enum class PoissonBoundary { ball, free_space };

/// Solution of -Δφ = u² with φ ≥ 0.
/// For the ball (Dirichlet) setting the discrete identity
/// ∫|∇φ|² = ∫φu² holds to solver tolerance; for the free-space radial
/// setting the same identity holds up to the exterior tail q²/(4πk).
struct PoissonSolution {
    Field phi;
    double grad_energy = 0.0;
    double coupling = 0.0;
    int iterations = 0;
    double residual = 0.0;
    PoissonBoundary boundary = PoissonBoundary::ball;

    double identity_gap() const { return std::abs(grad_energy - coupling); }
};

/// Dirichlet Poisson operator on B_k (optionally on a node sub-mask).
/// Radial grids get a cached LDLᵀ tridiagonal factorization reused across
/// solves; box3d uses conjugate gradient on the masked 7-point stiffness.
class BallPoisson {
public:
    explicit BallPoisson(GridPtr grid, std::vector<std::uint8_t> submask = {},
                         double tol = 1e-10, int max_iter_factor = 40)
        : grid_(std::move(grid)), sub_(std::move(submask)), tol_(tol),
          max_iter_factor_(max_iter_factor) {
        if (!sub_.empty() && sub_.size() != grid_->node_count())
            throw std::invalid_argument("BallPoisson: submask size mismatch");
        if (grid_->kind() == GridKind::radial) factor_radial();
    }

    const GridPtr& grid() const { return grid_; }
    const std::vector<std::uint8_t>* submask() const { return sub_.empty() ? nullptr : &sub_; }

    /// Solve the stiffness system A φ = W·density.  density is a node field
    /// (e.g. u²); returns φ with zeros on non-dof nodes.
    Field apply_inverse(const Field& density, int* iterations = nullptr) const {
        const Grid& g = *grid_;
        std::vector<double> b(g.node_count(), 0.0);
        const auto& w = g.weights();
        for (std::size_t i = 0; i < b.size(); ++i)
            if (is_dof(i)) b[i] = w[i] * density[i];
        std::vector<double> x(g.node_count(), 0.0);
        int iters = 0;
        if (g.kind() == GridKind::radial) {
            solve_radial(b, x);
            iters = 1;
        } else {
            iters = solve_cg(b, x);
        }
        if (iterations) *iterations = iters;
        return Field(grid_, std::move(x));
    }

    /// Solve -Δφ = u² and package diagnostics.
    PoissonSolution solve(const Field& u) const {
        require_finite(u, "poisson");
        if (!u.grid().same(*grid_))
            throw std::invalid_argument("BallPoisson: field lives on another grid");
        Field density(grid_);
        for (std::size_t i = 0; i < density.size(); ++i)
            density[i] = is_dof(i) ? u[i] * u[i] : 0.0;

        PoissonSolution s;
        s.boundary = PoissonBoundary::ball;
        s.phi = apply_inverse(density, &s.iterations);
        clamp_tiny_negatives(s.phi);
        s.residual = laplacian_residual(s.phi, density);
        s.grad_energy = grid_->dirichlet_form(s.phi.values(), s.phi.values(), submask());
        s.coupling = l2_pair(s.phi, density);
        return s;
    }

    /// ‖Δφ + density‖ / ‖density‖ in the weighted L² norm over dof nodes.
    double laplacian_residual(const Field& phi, const Field& density) const {
        const Grid& g = *grid_;
        std::vector<double> lap;
        g.laplacian(phi.values(), lap, submask());
        const auto& w = g.weights();
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < lap.size(); ++i)
            if (is_dof(i)) {
                const double r = lap[i] + density[i];
                num += w[i] * r * r;
                den += w[i] * density[i] * density[i];
            }
        return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    }

private:
    bool is_dof(std::size_t i) const {
        return grid_->dof(i) && (sub_.empty() || sub_[i]);
    }

    void factor_radial() {
        // dof nodes of a radial (sub)problem form the prefix 0..m-1
        const int n = grid_->n();
        m_ = 0;
        for (int i = 0; i < n; ++i) {
            if (is_dof(i)) {
                if (i != m_) throw std::invalid_argument(
                    "BallPoisson: radial submask must be a contiguous prefix");
                ++m_;
            }
        }
        if (m_ == 0) throw std::invalid_argument("BallPoisson: empty dof set");
        const double h = grid_->h();
        diag_.resize(m_);
        off_.assign(std::max(0, m_ - 1), 0.0);
        for (int i = 0; i < m_; ++i) {
            double d = grid_->face_area(i) / h; // face to node i+1 (dof or Dirichlet)
            if (i > 0) d += grid_->face_area(i - 1) / h;
            diag_[i] = d;
            if (i + 1 < m_) off_[i] = -grid_->face_area(i) / h;
        }
        ldl_d_ = diag_;
        ldl_l_.assign(off_.size(), 0.0);
        for (int i = 0; i + 1 < m_; ++i) {
            ldl_l_[i] = off_[i] / ldl_d_[i];
            ldl_d_[i + 1] -= off_[i] * ldl_l_[i];
        }
    }

    void solve_radial(const std::vector<double>& b, std::vector<double>& x) const {
        std::vector<double> y(m_);
        auto substitute = [&](const std::vector<double>& rhs, std::vector<double>& out) {
            y[0] = rhs[0];
            for (int i = 1; i < m_; ++i) y[i] = rhs[i] - ldl_l_[i - 1] * y[i - 1];
            for (int i = 0; i < m_; ++i) y[i] /= ldl_d_[i];
            out[m_ - 1] = y[m_ - 1];
            for (int i = m_ - 2; i >= 0; --i) out[i] = y[i] - ldl_l_[i] * out[i + 1];
        };
        std::vector<double> sol(grid_->node_count(), 0.0);
        substitute(b, sol);
        // one pass of iterative refinement keeps the residual at roundoff
        std::vector<double> ax;
        grid_->apply_stiffness(sol, ax, submask());
        std::vector<double> r(grid_->node_count(), 0.0);
        for (int i = 0; i < m_; ++i) r[i] = b[i] - ax[i];
        std::vector<double> dx(grid_->node_count(), 0.0);
        substitute(r, dx);
        for (int i = 0; i < m_; ++i) sol[i] += dx[i];
        x = std::move(sol);
    }

    int solve_cg(const std::vector<double>& b, std::vector<double>& x) const {
        const Grid& g = *grid_;
        const std::size_t total = g.node_count();
        x.assign(total, 0.0);
        std::vector<double> r = b, p = b, ap(total);
        auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < total; ++i)
                if (is_dof(i)) acc += a[i] * c[i];
            return acc;
        };
        const double bnorm = std::sqrt(dot(b, b));
        if (bnorm == 0.0) return 0;
        double rr = dot(r, r);
        const int max_iter = max_iter_factor_ * g.n();
        for (int it = 1; it <= max_iter; ++it) {
            g.apply_stiffness(p, ap, submask());
            const double alpha = rr / dot(p, ap);
            for (std::size_t i = 0; i < total; ++i)
                if (is_dof(i)) {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * ap[i];
                }
            const double rr_new = dot(r, r);
            if (std::sqrt(rr_new) <= tol_ * bnorm) return it;
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < total; ++i)
                if (is_dof(i)) p[i] = r[i] + beta * p[i];
        }
        throw PoissonError("Poisson CG did not converge after " + std::to_string(max_iter) +
                               " iterations",
                           std::sqrt(rr) / bnorm);
    }

    static void clamp_tiny_negatives(Field& phi) {
        double mx = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) mx = std::max(mx, std::abs(phi[i]));
        const double eps = 1e-10 * mx;
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (phi[i] < 0.0 && phi[i] > -eps) phi[i] = 0.0;
    }

    GridPtr grid_;
    std::vector<std::uint8_t> sub_;
    double tol_;
    int max_iter_factor_;
    int m_ = 0;
    std::vector<double> diag_, off_, ldl_d_, ldl_l_;
};

/// Convenience one-shot ball solve.
inline PoissonSolution solve_ball(const Field& u) {
    return BallPoisson(u.grid_ptr()).solve(u);
}

/// Newtonian potential on a radial grid:
///   φ(r) = (1/r) ∫₀^r s²u²(s) ds + ∫_r^k s u²(s) ds,
/// the free-space solution of -Δφ = u² for charge essentially inside B_k.
inline PoissonSolution solve_free(const Field& u) {
    const Grid& g = u.grid();
    if (g.kind() != GridKind::radial)
        throw std::invalid_argument("solve_free: radial grid required");
    require_finite(u, "solve_free");
    const int n = g.n();
    const double h = g.h();
    std::vector<double> q2(n);
    for (int i = 0; i < n; ++i) q2[i] = u[i] * u[i];

    std::vector<double> inner(n, 0.0), outer(n, 0.0);
    for (int i = 1; i < n; ++i) {
        const double r0 = g.radius(i - 1), r1 = g.radius(i);
        inner[i] = inner[i - 1] + 0.5 * h * (r0 * r0 * q2[i - 1] + r1 * r1 * q2[i]);
    }
    for (int i = n - 2; i >= 0; --i) {
        const double r0 = g.radius(i), r1 = g.radius(i + 1);
        outer[i] = outer[i + 1] + 0.5 * h * (r0 * q2[i] + r1 * q2[i + 1]);
    }
    PoissonSolution s;
    s.boundary = PoissonBoundary::free_space;
    s.phi = Field(u.grid_ptr());
    s.phi[0] = outer[0];
    for (int i = 1; i < n; ++i) s.phi[i] = inner[i] / g.radius(i) + outer[i];
    s.iterations = 0;
    s.grad_energy = g.interior_grad_form(s.phi.values(), s.phi.values());
    Field density(u.grid_ptr());
    for (int i = 0; i < n; ++i) density[i] = q2[i];
    s.coupling = l2_pair(s.phi, density);
    s.residual = BallPoisson(u.grid_ptr()).laplacian_residual(s.phi, density);
    return s;
}

/// Total charge ∫u² of a field.
inline double total_charge(const Field& u) {
    const Grid& g = u.grid();
    const auto& w = g.weights();
    double q = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (g.active(i)) q += w[i] * u[i] * u[i];
    return q;
}

/// Both inequalities of the unique-solvability lemma:
///   |∇φ_u|₂ ≤ S₀^{-1/2} |u|²_{12/5}   and   ∫φ_u u² ≤ S₀^{-1} |u|⁴_{12/5}.
inline std::vector<BoundCheck> verify_poisson_bounds(const Field& u, const PoissonSolution& sol,
                                              double s0) {
    if (!(s0 > 0.0)) throw std::invalid_argument("verify_poisson_bounds: s0 must be positive");
    const double u125 = lq_norm(u, 12.0 / 5.0);
    const double grad = std::sqrt(std::max(0.0, sol.grad_energy));
    std::vector<BoundCheck> out;
    out.push_back(BoundCheck::make("poisson.grad_vs_l125", grad,
                                   u125 * u125 / std::sqrt(s0), 1e-10 * (1.0 + u125 * u125)));
    out.push_back(BoundCheck::make("poisson.coupling_vs_l125", sol.coupling,
                                   std::pow(u125, 4) / s0, 1e-10 * (1.0 + std::pow(u125, 4))));
    return out;
}

} // namespace spwell
