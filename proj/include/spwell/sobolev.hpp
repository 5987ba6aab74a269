#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spwell/discretization.hpp"
#include "spwell/field.hpp"
#include "spwell/grid.hpp"

namespace spwell {

/// D^{1,2} Sobolev quotient S₀ = inf ∫|∇u|² / (∫u⁶)^{1/3}, estimated by the
/// Rayleigh quotient of the extremal profile (1+|x/σ|²)^{-1/2}, shifted to
/// vanish at r=k so its zero-extension is admissible. Converges from above
/// at rate O(1/k) as k and n grow.
inline double estimate_s0(GridPtr grid, double sigma = 1.0) {
    if (grid->kind() != GridKind::radial)
        throw std::invalid_argument("estimate_s0: radial grid required");
    const double rim = grid->k() / sigma;
    const double shift = 1.0 / std::sqrt(1.0 + rim * rim);
    Field u = Field::sample(grid, [&](const Point& x) {
        const double r = x[0] / sigma;
        return 1.0 / std::sqrt(1.0 + r * r) - shift;
    });
    const double grad = grid->dirichlet_form(u.values(), u.values());
    const double l6 = lq_norm_pow(u, 6.0);
    return grad / std::cbrt(l6);
}

/// H¹ Sobolev quotient S_q = inf (∫|∇u|²+u²) / |u|_q², q ∈ (2,6), via the
/// radial ground state of -Δw + w = w^{q-1} computed by shooting on w(0):
/// undershoot grows back, overshoot crosses zero, bisect between them.
/// Grid-free: integrates the radial ODE on an internal reference mesh.
inline double estimate_sobolev_h1(double q, double r_max = 16.0, double dr = 1.0 / 1024.0) {
    if (!(q > 2.0 && q < 6.0))
        throw std::invalid_argument("estimate_sobolev_h1: q must lie in (2,6)");

    // w'' = -2 w'/r + w - w^{q-1}; near r=0, w'' = (w - w^{q-1})/3.
    auto rhs = [&](double r, double w, double v) {
        const double f = w - (w > 0.0 ? std::pow(w, q - 1.0) : 0.0);
        if (r < 1e-12) return f / 3.0;
        return f - 2.0 * v / r;
    };
    // 1 = shot escapes upward (undershoot), -1 = crossed zero (overshoot)
    auto classify = [&](double a, std::vector<double>* profile) {
        double w = a, v = 0.0;
        if (profile) profile->assign(1, w);
        const int steps = static_cast<int>(r_max / dr);
        for (int i = 0; i < steps; ++i) {
            const double r = i * dr;
            const double k1w = v, k1v = rhs(r, w, v);
            const double k2w = v + 0.5 * dr * k1v, k2v = rhs(r + 0.5 * dr, w + 0.5 * dr * k1w, v + 0.5 * dr * k1v);
            const double k3w = v + 0.5 * dr * k2v, k3v = rhs(r + 0.5 * dr, w + 0.5 * dr * k2w, v + 0.5 * dr * k2v);
            const double k4w = v + dr * k3v, k4v = rhs(r + dr, w + dr * k3w, v + dr * k3v);
            w += dr / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
            v += dr / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if (profile) profile->push_back(std::max(w, 0.0));
            if (w <= 0.0) return -1;
            if (v > 0.0 && w < a) return 1;
            if (w > 2.0 * a) return 1;
        }
        return 1; // still positive at r_max: treat as undershoot
    };

    double lo = 1.0, hi = 1.0;
    while (classify(lo, nullptr) == -1) lo *= 0.5;
    while (classify(hi, nullptr) == 1) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (classify(mid, nullptr) == 1 ? lo : hi) = mid;
    }
    std::vector<double> w;
    classify(0.5 * (lo + hi), &w);
    // truncate the tail once the shot departs from the decaying branch
    std::size_t last = w.size() - 1;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] > w[i - 1] || w[i] < 1e-13 * w[0]) { last = i; break; }
    for (std::size_t i = last; i < w.size(); ++i) w[i] = 0.0;

    const double pi4 = 4.0 * std::numbers::pi;
    double grad = 0.0, mass = 0.0, lq = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double rf = (i + 0.5) * dr;
        const double d = (w[i + 1] - w[i]) / dr;
        grad += pi4 * rf * rf * d * d * dr;
        const double r = i * dr;
        const double wgt = pi4 * r * r * dr;
        mass += wgt * w[i] * w[i];
        lq += wgt * std::pow(w[i], q);
    }
    return (grad + mass) / std::pow(lq, 2.0 / q);
}

/// Mountain-pass small-sphere geometry derived from the Sobolev constant:
/// with C_S = S^{-(p+1)/2}, I(u) ≥ ½‖u‖² - C_S‖u‖^{p+1}/(p+1), maximized at
/// ρ = C_S^{-1/(p-1)}; α = ρ²(p-1)/(2(p+1)) > 0, independent of λ, µ, k.
struct SphereGeometry {
    double s_h1 = 0.0; // Rayleigh quotient inf (∫|∇u|²+u²)/|u|_{p+1}²
    double rho = 0.0;
    double alpha = 0.0;
};

inline SphereGeometry sphere_geometry(double p) {
    SphereGeometry g;
    g.s_h1 = estimate_sobolev_h1(p + 1.0);
    const double cs = std::pow(g.s_h1, -(p + 1.0) / 2.0);
    g.rho = std::pow(cs, -1.0 / (p - 1.0));
    g.alpha = g.rho * g.rho * (p - 1.0) / (2.0 * (p + 1.0));
    return g;
}

/// Nehari-set lower bound ‖u‖ ≥ C_p for nontrivial critical points, with the
/// embedding constant |u|_{p+1} ≤ S_emb‖u‖, S_emb = S_{p+1}^{-1/2}:
/// C_p = S_emb^{-(p+1)/(p-1)}. Coincides with the small-sphere radius ρ.
inline double nehari_lower_bound(double p) {
    const double s_emb = 1.0 / std::sqrt(estimate_sobolev_h1(p + 1.0));
    return std::pow(s_emb, -(p + 1.0) / (p - 1.0));
}

} // namespace spwell
