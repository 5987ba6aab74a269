#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "spwell/field.hpp"
#include "spwell/grid.hpp"
#include "spwell/params.hpp"
#include "spwell/well.hpp"

namespace spwell {

inline void require_same_grid(const Field& a, const Field& b) {
    if (!a.grid().same(b.grid()))
        throw std::invalid_argument("grid mismatch between fields");
}

inline void require_finite(const Field& f, const char* what) {
    if (!f.finite())
        throw std::invalid_argument(std::string(what) + ": non-finite values");
}

/// Σ w_i f_i over active nodes. Exact for constants up to mask error.
inline double integrate(const Field& f) {
    require_finite(f, "integrate");
    const Grid& g = f.grid();
    const auto& w = g.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (g.active(i)) acc += w[i] * f[i];
    return acc;
}

/// (∫ |u|^q)^{1/q}, q ≥ 1.
inline double lq_norm(const Field& u, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be >= 1");
    require_finite(u, "lq_norm");
    const Grid& g = u.grid();
    const auto& w = g.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (g.active(i)) acc += w[i] * std::pow(std::abs(u[i]), q);
    return std::pow(acc, 1.0 / q);
}

inline double lq_norm_pow(const Field& u, double q) {
    const Grid& g = u.grid();
    const auto& w = g.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (g.active(i)) acc += w[i] * std::pow(std::abs(u[i]), q);
    return acc;
}

/// Weighted L² pairing ⟨u, v⟩_W = Σ w u v over active nodes.
inline double l2_pair(const Field& u, const Field& v) {
    require_same_grid(u, v);
    const Grid& g = u.grid();
    const auto& w = g.weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (g.active(i)) acc += w[i] * u[i] * v[i];
    return acc;
}

/// Sample V_µ = 1 + µ g on the grid.
inline Field potential_field(const Well& well, GridPtr grid, const Params& params) {
    well.require_compatible(*grid);
    Field v(grid, 1.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (grid->active(i)) v[i] = 1.0 + params.mu * well.value(grid->coords(i));
    return v;
}

/// Sample g itself.
inline Field well_field(const Well& well, GridPtr grid) {
    well.require_compatible(*grid);
    return Field::sample(grid, [&](const Point& x) { return well.value(x); });
}

/// Indicator field of Ω₀.
inline Field omega0_mask(const Well& well, GridPtr grid) {
    well.require_compatible(*grid);
    return Field::sample(grid, [&](const Point& x) { return well.inside_omega0(x) ? 1.0 : 0.0; });
}

/// ⟨u,v⟩ = ∫ ∇u·∇v + V_µ u v. Symmetric, positive definite on nonzero
/// fields; dv_inner(u,u) dominates the H¹ norm since V_µ ≥ 1.
inline double dv_inner(const Field& u, const Field& v, const Well& well, const Params& params) {
    require_same_grid(u, v);
    const Grid& g = u.grid();
    well.require_compatible(g);
    double acc = g.dirichlet_form(u.values(), v.values());
    const auto& w = g.weights();
    for (std::size_t i = 0; i < u.size(); ++i)
        if (g.active(i)) {
            const double vmu = 1.0 + params.mu * well.value(g.coords(i));
            acc += w[i] * vmu * u[i] * v[i];
        }
    return acc;
}

inline double dv_norm(const Field& u, const Well& well, const Params& params) {
    return std::sqrt(std::max(0.0, dv_inner(u, u, well, params)));
}

/// Zero-extension of u onto a larger ball: values inside B_k interpolated
/// (linear in r / trilinear), 0 outside. Grids must share the kind.
inline Field extend(const Field& u, GridPtr target) {
    const Grid& src = u.grid();
    const Grid& dst = *target;
    if (src.kind() != dst.kind())
        throw std::invalid_argument("extend: source and target grid kinds differ");
    if (dst.k() < src.k())
        throw std::invalid_argument("extend: target radius must be >= source radius");
    require_finite(u, "extend");

    Field out(target, 0.0);
    if (src.kind() == GridKind::radial) {
        for (int i = 0; i < dst.n(); ++i) {
            const double r = dst.radius(i);
            if (r > src.k()) continue;
            const double t = r / src.h();
            const int j = std::min(static_cast<int>(t), src.n() - 2);
            const double frac = t - j;
            out[i] = (1.0 - frac) * u[j] + frac * u[j + 1];
        }
        out.enforce_boundary();
        return out;
    }
    const int n = dst.n();
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz) {
                const std::size_t a = dst.index(ix, iy, iz);
                if (!dst.active(a)) continue;
                const Point x = dst.coords(a);
                if (std::abs(x[0]) > src.k() || std::abs(x[1]) > src.k() || std::abs(x[2]) > src.k())
                    continue;
                // trilinear interpolation inside the source cube
                double tloc[3];
                int base[3];
                for (int d = 0; d < 3; ++d) {
                    const double t = (x[d] + src.k()) / src.h();
                    base[d] = std::min(static_cast<int>(t), src.n() - 2);
                    tloc[d] = t - base[d];
                }
                double acc = 0.0;
                for (int dx = 0; dx < 2; ++dx)
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dz = 0; dz < 2; ++dz) {
                            const std::size_t b =
                                src.index(base[0] + dx, base[1] + dy, base[2] + dz);
                            const double wgt = (dx ? tloc[0] : 1.0 - tloc[0]) *
                                               (dy ? tloc[1] : 1.0 - tloc[1]) *
                                               (dz ? tloc[2] : 1.0 - tloc[2]);
                            acc += wgt * (src.active(b) ? u[b] : 0.0);
                        }
                out[a] = acc;
            }
    out.enforce_boundary();
    return out;
}

/// Smooth random bump field for property tests and solver restarts:
/// a few Gaussians with seeded centers/widths, times a cutoff vanishing
/// at the Dirichlet boundary.
inline Field random_bump_field(GridPtr grid, std::mt19937_64& rng, int modes = 4) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    const double k = grid->k();
    Field out(*&grid, 0.0);
    if (grid->kind() == GridKind::radial) {
        std::vector<double> a(modes), b(modes), s(modes);
        for (int m = 0; m < modes; ++m) {
            a[m] = sym(rng);
            b[m] = 0.6 * k * unit(rng);
            s[m] = k * (0.08 + 0.22 * unit(rng));
        }
        for (int i = 0; i < grid->n(); ++i) {
            const double r = grid->radius(i);
            double v = 0.0;
            for (int m = 0; m < modes; ++m)
                v += a[m] * std::exp(-(r - b[m]) * (r - b[m]) / (s[m] * s[m]));
            const double cut = std::max(0.0, 1.0 - (r / k) * (r / k));
            out[i] = v * cut * cut;
        }
    } else {
        std::vector<Point> c(modes);
        std::vector<double> a(modes), s(modes);
        for (int m = 0; m < modes; ++m) {
            for (int d = 0; d < 3; ++d) c[m][d] = 0.5 * k * sym(rng);
            a[m] = sym(rng);
            s[m] = k * (0.15 + 0.2 * unit(rng));
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!grid->active(i)) continue;
            const Point x = grid->coords(i);
            double v = 0.0;
            for (int m = 0; m < modes; ++m) {
                const double d2 = (x[0] - c[m][0]) * (x[0] - c[m][0]) +
                                  (x[1] - c[m][1]) * (x[1] - c[m][1]) +
                                  (x[2] - c[m][2]) * (x[2] - c[m][2]);
                v += a[m] * std::exp(-d2 / (s[m] * s[m]));
            }
            const double r2 = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (k * k);
            const double cut = std::max(0.0, 1.0 - r2);
            out[i] = v * cut * cut;
        }
    }
    out.enforce_boundary();
    return out;
}

} // namespace spwell
