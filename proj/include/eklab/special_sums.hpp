#pragma once

#include <cstdint>

namespace eklab {

/// H_k = sum_{i<=k} 1/i. Tabulated for small k, asymptotic expansion above.
double harmonic_number(std::uint64_t k);

/// sum_{l=1}^{k} l^(-s) for s > 0, via Euler-Maclaurin past a short direct
/// head. Relative error near machine precision for all k.
double partial_zeta(double s, std::uint64_t k);

/// zeta(s) - 1 for s > 1, accurate even when zeta(s) is within an ulp of 1.
double zeta_minus_one(double s);

double riemann_zeta(double s);

}  // namespace eklab
