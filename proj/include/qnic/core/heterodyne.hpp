#pragma once

#include <cmath>
#include <numbers>

#include "qnic/core/types.hpp"

namespace qnic {

/// Amplitude-to-outcome-mean gain.
inline double mean_gain(const NoiseModel& noise, const DetectorParams& det = {}) {
    return std::sqrt(det.eta * noise.T * convention_scale(noise.convention));
}

/// Per-quadrature outcome variances (x, p): (1 + T*xi/2 + v_el)/2.
inline double quadrature_variance_x(const NoiseModel& noise, const DetectorParams& det = {}) {
    return 0.5 * (1.0 + noise.T * noise.xi_x() / 2.0 + det.v_el);
}
inline double quadrature_variance_p(const NoiseModel& noise, const DetectorParams& det = {}) {
    return 0.5 * (1.0 + noise.T * noise.xi_pq() / 2.0 + det.v_el);
}

/// Total complex variance sigma^2 (sum of both quadratures) for symmetric noise.
inline double complex_variance(const NoiseModel& noise, const DetectorParams& det = {}) {
    return quadrature_variance_x(noise, det) + quadrature_variance_p(noise, det);
}

inline double heterodyne_pdf(ComplexSample x, Complex alpha, const NoiseModel& noise, const DetectorParams& det = {}) {
    const Complex mu = mean_gain(noise, det) * alpha;
    const double vx = quadrature_variance_x(noise, det), vp = quadrature_variance_p(noise, det);
    const double dx = x.real() - mu.real(), dp = x.imag() - mu.imag();
    return std::exp(-dx * dx / (2.0 * vx) - dp * dp / (2.0 * vp)) / (2.0 * std::numbers::pi * std::sqrt(vx * vp));
}

} // namespace qnic
