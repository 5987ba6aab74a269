#pragma once

#include <stdexcept>
#include <string>

namespace spwell {

/// Nonlinearity regime of the exponent p. The solver drivers accept
/// subquadratic and supercubic only; middle is evaluation-only.
enum class Regime { subquadratic, middle, supercubic };

inline Regime regime_of(double p) {
    if (p > 1.0 && p < 2.0) return Regime::subquadratic;
    if (p >= 3.0 && p < 5.0) return Regime::supercubic;
    return Regime::middle;
}

/// Problem parameters: -Δu + (1 + mu·g)u + lambda·φ_u u = |u|^{p-1}u.
struct Params {
    double p = 3.0;
    double lambda = 1.0;
    double mu = 50.0;

    Regime regime() const { return regime_of(p); }

    void validate() const {
        if (!(p > 1.0 && p < 5.0))
            throw std::invalid_argument("Params: p must lie in (1,5), got " + std::to_string(p));
        if (!(lambda >= 0.0))
            throw std::invalid_argument("Params: lambda must be >= 0");
        if (!(mu >= 0.0))
            throw std::invalid_argument("Params: mu must be >= 0");
    }
};

} // namespace spwell
