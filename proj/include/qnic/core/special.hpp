#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "qnic/core/errors.hpp"

namespace qnic {

inline double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary_entropy: p outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// Unique p in [0, 1/2] with h(p) = y.
inline double inv_binary_entropy(double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("inv_binary_entropy: y outside [0,1]");
    if (y == 0.0) return 0.0;
    if (y == 1.0) return 0.5;
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (binary_entropy(mid) < y) lo = mid;
        else hi = mid;
    }
    const double dlo = std::abs(binary_entropy(lo) - y);
    const double dhi = std::abs(binary_entropy(hi) - y);
    return dlo <= dhi ? lo : hi;
}

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

constexpr double kEigenClampTolerance = 1e-9;

/// -sum lambda log2 lambda with small negative eigenvalues clamped to zero.
inline double entropy_from_eigenvalues(std::span<const double> lambdas) {
    double s = 0.0;
    for (double l : lambdas) {
        if (l < -kEigenClampTolerance) throw DomainError("entropy: eigenvalue below clamp tolerance");
        s -= xlog2x(std::max(l, 0.0));
    }
    return std::max(s, 0.0);
}

/// Shannon entropy (bits) of a probability vector.
inline double shannon_entropy(std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s -= xlog2x(x);
    return s;
}

} // namespace qnic
