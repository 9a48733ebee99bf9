#pragma once

#include <cmath>

#include "qnic/secanalysis/region.hpp"

namespace qnic {

struct PerrResult {
    double p_err = 0.0;
    double N = 1.0;          // acceptance probability
    double abs_error = 0.0;  // quadrature error actually achieved
};

/// Eliminating quadrant q names symbols (q+2)%4 and (q+3)%4, so sending k mismatches
/// exactly when the outcome lands in quadrant (k+1)%4 or (k+2)%4.
inline bool quadrant_mismatches(int q, int k) {
    const int d = ((q - k) % 4 + 4) % 4;
    return d == 1 || d == 2;
}

inline PerrResult perr_from_table(const Alphabet& alph, const QuadrantTable& t) {
    PerrResult r;
    double acc = 0.0, mis = 0.0;
    for (std::size_t k = 0; k < alph.size(); ++k)
        for (int q = 0; q < 4; ++q) {
            const double p = alph.weights[k] * t.p[k][static_cast<std::size_t>(q)];
            acc += p;
            if (quadrant_mismatches(q, static_cast<int>(k))) mis += p;
        }
    r.N = acc;
    r.abs_error = t.abs_error;
    r.p_err = acc > 0.0 ? mis / acc : 0.5;
    return r;
}

/// Honest mismatch probability for a QPSK alphabet, with postselection.
inline PerrResult perr_honest(const Alphabet& alph, const NoiseModel& noise, const DetectorParams& det,
                              const PostselectionRegion& region) {
    noise.validate();
    det.validate();
    region.validate();
    if (alph.size() != 4) throw DomainError("perr_honest: QPSK alphabet required");
    return perr_from_table(alph, quadrant_table(alph, noise, det, region));
}

inline PerrResult perr_honest(double a, const NoiseModel& noise, const DetectorParams& det,
                              const PostselectionRegion& region) {
    if (!(a >= 0.0)) throw DomainError("perr_honest: a must be >= 0");
    return perr_honest(Alphabet::qpsk(a), noise, det, region);
}

/// Same quantity, always through the 2D quadrature path.
inline PerrResult perr_honest_quadrature(double a, const NoiseModel& noise, const DetectorParams& det,
                                         const PostselectionRegion& region) {
    const Alphabet alph = Alphabet::qpsk(a);
    return perr_from_table(alph, quadrant_table(alph, noise, det, region, true));
}

/// 1/2 erfc(mu / (sqrt(2) s)), mu the outcome-mean magnitude and s the quadrature std.
inline double perr_closed_form(double a, const NoiseModel& noise, const DetectorParams& det) {
    const double mu = mean_gain(noise, det) * a;
    return 0.5 * std::erfc(mu / std::sqrt(2.0 * quadrature_variance_x(noise, det)));
}

} // namespace qnic
