#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "spwell/params.hpp"

namespace spwell {

/// pow that routes integral exponents through repeated multiplication, so
/// closed-form rational cases reproduce exactly and identically across libms.
inline double pow_exact(double base, double e) {
    const double rounded = std::nearbyint(e);
    if (e == rounded && std::abs(rounded) <= 64.0) {
        double acc = 1.0;
        double b = base;
        long n = static_cast<long>(std::abs(rounded));
        while (n > 0) {
            if (n & 1) acc *= b;
            b *= b;
            n >>= 1;
        }
        return rounded < 0.0 ? 1.0 / acc : acc;
    }
    return std::pow(base, e);
}

/// c_p = (p-1)(2-p)^{(2-p)/(p-1)}, the constant of the pointwise barrier
/// t + c_p t² - t^p ≥ 0 (subquadratic regime).
inline double pointwise_cp(double p) {
    if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("pointwise_cp: p must be in (1,2)");
    return (p - 1.0) * pow_exact(2.0 - p, (2.0 - p) / (p - 1.0));
}

/// Sup-norm constant, statement form:
///   C_{p,λ} = 2^{2/(p-2)} (2-p)^{(2p-1)/(p-1)} [p(p-1)/λ]^{p/(2-p)}.
inline double sup_constant_statement(double p, double lambda) {
    if (!(p > 1.0 && p < 2.0) || !(lambda > 0.0))
        throw std::invalid_argument("sup_constant: need p in (1,2), lambda > 0");
    return pow_exact(2.0, 2.0 / (p - 2.0)) * pow_exact(2.0 - p, (2.0 * p - 1.0) / (p - 1.0)) *
           pow_exact(p * (p - 1.0) / lambda, p / (2.0 - p));
}

/// Same constant, barrier form: C_{p,λ} = ½(2-p)(p c_p / (2λ))^{p/(2-p)},
/// which is also max_{t≥0} (t^p - (λ/c_p)t²).
inline double sup_constant_barrier(double p, double lambda) {
    if (!(p > 1.0 && p < 2.0) || !(lambda > 0.0))
        throw std::invalid_argument("sup_constant: need p in (1,2), lambda > 0");
    const double cp = pointwise_cp(p);
    return 0.5 * (2.0 - p) * pow_exact(p * cp / (2.0 * lambda), p / (2.0 - p));
}

/// Nonexistence threshold c(p) = ¼(p-1)²(2-p)^{2(2-p)/(p-1)}: no nontrivial
/// solution for λ ≥ c(p) in the subquadratic regime.
inline double nonexistence_threshold(double p) {
    if (!(p > 1.0 && p < 2.0))
        throw std::invalid_argument("nonexistence_threshold: p must be in (1,2)");
    return 0.25 * (p - 1.0) * (p - 1.0) * pow_exact(2.0 - p, 2.0 * (2.0 - p) / (p - 1.0));
}

/// µ₁ = C_{p,λ}^{p-1} - 1, the well-depth threshold of the subquadratic
/// existence threshold of the subquadratic regime.
inline double mu1_threshold(double p, double lambda) {
    return pow_exact(sup_constant_statement(p, lambda), p - 1.0) - 1.0;
}

/// Constants of the Moser iteration in N = 3:
///   β₀ = 2*/2 = 3, δ = 2β₀/(2β₀²+1-p), γ = (2*-p-1)/2*,
///   f(i), g(i) exponent ladders with limits (2δ²-δ³)/(1-δ)², δ²/(1-δ),
///   ball radii r_i = (2+2^{-i})/4 · r₁ shrinking to r₁/2, and the assembled
///   sup-norm bound |u|_∞ ≤ C₁(1+|u|_{2*}^{C₂})|u|_{2*}.
struct MoserConstants {
    double p = 0.0;
    double beta0 = 3.0;
    double delta = 0.0;
    double gamma = 0.0;
    double f_inf = 0.0;
    double g_inf = 0.0;
    double exponent = 0.0; // E = g_inf + 1/β₀
    double cbar = 0.0;     // per-step constant, explicit supremum form
    // present when a Sobolev constant was supplied
    std::optional<double> c_big;  // C = sqrt(68/S₀)
    std::optional<double> cbar1;  // C̄₁ = C̄/sqrt(S₀)
    std::optional<double> c1;
    std::optional<double> c2;

    double f_of(int i) const {
        const double d = delta;
        return 2.0 * d * d / (1.0 - d) +
               d * d * d * (1.0 - std::pow(d, i - 2)) / ((1.0 - d) * (1.0 - d)) +
               i * std::pow(d, i + 1) / (1.0 - d);
    }
    double g_of(int i) const {
        const double d = delta;
        return d * d * (1.0 - std::pow(d, i - 1)) / (1.0 - d);
    }
    /// r_i = (2+2^{-i})/4 · r₁ for i ≥ 2 (r₁ itself at i = 1).
    static double radius_of(int i, double r1) {
        if (i <= 1) return r1;
        return (2.0 + std::pow(2.0, -i)) / 4.0 * r1;
    }
    /// r₁ = |B₁|^{-1/3}(68β₀²a^{p-1}+1)^{-γ/3} at field norm a = |u|_{2*}.
    double r1_of(double a) const {
        const double b1 = 4.0 * std::numbers::pi / 3.0;
        return std::pow(b1, -1.0 / 3.0) *
               std::pow(68.0 * beta0 * beta0 * std::pow(a, p - 1.0) + 1.0, -gamma / 3.0);
    }
    /// Tight assembled bound before the C₁/C₂ majorization.
    double bound_tight(double a) const {
        const double b1 = 4.0 * std::numbers::pi / 3.0;
        const double k0 = 8.0 * *cbar1 + (16.0 / 7.0) * *c_big * beta0;
        const double inner = k0 * (1.0 + std::pow(a, (p - 1.0) / 2.0)) *
                             std::pow(b1, 1.0 / 3.0) *
                             std::pow(68.0 * beta0 * beta0 * std::pow(a, p - 1.0) + 1.0, gamma / 3.0);
        return std::pow(2.0 / delta, f_inf) * std::pow(inner, exponent) * a;
    }
    /// Majorized form C₁(1 + a^{C₂})·a; dominates bound_tight for all a ≥ 0.
    double bound_c1c2(double a) const {
        return *c1 * (1.0 + std::pow(a, *c2)) * a;
    }
};

inline MoserConstants moser_constants(double p, std::optional<double> s0 = std::nullopt) {
    if (!(p > 1.0 && p < 5.0))
        throw std::invalid_argument("moser_constants: p must be in (1,5)");
    MoserConstants m;
    m.p = p;
    m.beta0 = 3.0; // 2*/2 with 2* = 6 in N = 3
    m.delta = 2.0 * m.beta0 / (2.0 * m.beta0 * m.beta0 + 1.0 - p);
    m.gamma = (6.0 - p - 1.0) / 6.0;
    m.f_inf = (2.0 * m.delta * m.delta - std::pow(m.delta, 3)) /
              ((1.0 - m.delta) * (1.0 - m.delta));
    m.g_inf = m.delta * m.delta / (1.0 - m.delta);
    m.exponent = m.g_inf + 1.0 / m.beta0;
    // Per-step constant: sup over admissible r₁ ≤ |B₁|^{-1/3} and field norms
    // of 34[(2/(r_i-r_{i+1}))² + (2/(r₁-r₂))^{(p-1)/β₀} a^{p-1}] (r_i-r_{i+1})²
    //                                              / (1+a^{(p-1)/2})².
    const double q = (p - 1.0) / m.beta0;
    const double b1 = 4.0 * std::numbers::pi / 3.0;
    m.cbar = std::sqrt(34.0 * (4.0 + std::pow(32.0 / 7.0, q) *
                                   std::pow(b1, -(2.0 - q) / 3.0) / 1024.0));
    if (s0) {
        m.c_big = std::sqrt(68.0 / *s0);
        m.cbar1 = m.cbar / std::sqrt(*s0);
        const double k0 = 8.0 * *m.cbar1 + (16.0 / 7.0) * *m.c_big * m.beta0;
        m.c1 = std::pow(2.0 / m.delta, m.f_inf) *
               std::pow(k0 * std::pow(b1, 1.0 / 3.0) *
                            std::pow(68.0 * m.beta0 * m.beta0, m.gamma / 3.0) * 3.0,
                        m.exponent);
        m.c2 = (p - 1.0) * (0.5 + m.gamma / 3.0) * m.exponent;
    }
    return m;
}

/// All closed-form constants evaluable for a parameter point, plus the
/// norm/sup bounds that need runtime inputs (estimated Sobolev constants,
/// the mountain-pass level upper bound, the well plateau radius).
struct ConstantSet {
    // subquadratic closed forms
    std::optional<double> c_p;
    std::optional<double> c_p_lambda_statement;
    std::optional<double> c_p_lambda_barrier;
    std::optional<double> c_p_lambda_gap; // relative gap between the two forms
    std::optional<double> c_of_p;
    std::optional<double> mu1;
    // derived bounds (need runtime inputs)
    std::optional<double> m0;  // sup-norm bound, supercubic
    std::optional<double> m_lambda;  // ‖u‖ + |∇φ|₂ bound, supercubic
    std::optional<double> m_mu;      // ‖u‖ + (∫φu²)^{1/2} bound, subquadratic
    std::optional<double> mu2;
    std::optional<double> mu0;
    std::optional<double> s0;        // estimated Sobolev constants used
    std::optional<double> s_q125;
    std::optional<double> c_lambda_upper;
    MoserConstants moser;
};

struct ConstantInputs {
    std::optional<double> s0;             // D^{1,2} quotient estimate
    std::optional<double> s_q125;         // H¹ quotient at q = 12/5
    std::optional<double> c_lambda_upper; // mp_level_upper of the run
    std::optional<double> well_r1;        // radius where g reaches its plateau
};

inline ConstantSet constants(const Params& params, const ConstantInputs& in = {}) {
    params.validate();
    ConstantSet out;
    const double p = params.p, lambda = params.lambda;
    out.moser = moser_constants(p, in.s0);
    out.s0 = in.s0;
    out.s_q125 = in.s_q125;
    out.c_lambda_upper = in.c_lambda_upper;

    if (regime_of(p) == Regime::subquadratic) {
        out.c_p = pointwise_cp(p);
        out.c_of_p = nonexistence_threshold(p);
        if (lambda > 0.0) {
            out.c_p_lambda_statement = sup_constant_statement(p, lambda);
            out.c_p_lambda_barrier = sup_constant_barrier(p, lambda);
            out.c_p_lambda_gap = std::abs(*out.c_p_lambda_statement - *out.c_p_lambda_barrier) /
                                 *out.c_p_lambda_statement;
            out.mu1 = mu1_threshold(p, lambda);
            out.mu0 = 3.0 * pow_exact(*out.c_p_lambda_statement, p - 1.0) - 3.0;
            // M_µ from the cutoff argument: C* = (4/27)c_p² C^{3(p-1)}/λ²,
            // r_µ = max(4R₁, 16C^{p-1}/(µ-µ₁)), B = sqrt(2C*|B_{r/2}|),
            // M_µ = B(1 + sqrt(C^{p-1}/λ)).
            if (in.well_r1 && params.mu > *out.mu1) {
                const double L = *out.c_p_lambda_statement;
                const double cstar = (4.0 / 27.0) * (*out.c_p) * (*out.c_p) *
                                     pow_exact(L, 3.0 * (p - 1.0)) / (lambda * lambda);
                const double r_mu = std::max(4.0 * *in.well_r1,
                                             16.0 * pow_exact(L, p - 1.0) / (params.mu - *out.mu1));
                const double ball = 4.0 * std::numbers::pi / 3.0 * std::pow(r_mu / 2.0, 3);
                const double b = std::sqrt(2.0 * cstar * ball);
                out.m_mu = b * (1.0 + std::sqrt(pow_exact(L, p - 1.0) / lambda));
            }
        }
    }
    if (regime_of(p) == Regime::supercubic && in.s0 && in.c_lambda_upper) {
        const double a = 2.0 * std::sqrt(*in.c_lambda_upper / *in.s0);
        out.m0 = out.moser.bound_c1c2(a);
        out.mu2 = std::max(0.0, pow_exact(*out.m0, p - 1.0) - 1.0);
        out.mu0 = 3.0 * pow_exact(*out.m0, p - 1.0) - 3.0;
        if (in.s_q125) {
            const double norm_bound = 2.0 * std::sqrt(*in.c_lambda_upper);
            out.m_lambda = norm_bound + norm_bound * norm_bound /
                                            (std::sqrt(*in.s0) * *in.s_q125);
        }
    }
    return out;
}

} // namespace spwell
