#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qnic/core/errors.hpp"
#include "qnic/core/heterodyne.hpp"
#include "qnic/core/quadrature.hpp"
#include "qnic/core/types.hpp"

namespace qnic {

struct PostselectionRegion {
    double delta_r = 0.0;
    double delta_theta = 0.0;

    bool trivial() const { return delta_r == 0.0 && delta_theta == 0.0; }

    void validate() const {
        if (!(delta_r >= 0.0) || !std::isfinite(delta_r)) throw DomainError("region: delta_r must be >= 0");
        if (!(delta_theta >= 0.0 && delta_theta < std::numbers::pi / 4))
            throw DomainError("region: delta_theta must lie in [0, pi/4)");
    }
};

/// Quadrant of x, 0..3, counted counter-clockwise from [0, pi/2).
inline int quadrant_of(ComplexSample x) {
    const bool re = x.real() >= 0.0, im = x.imag() >= 0.0;
    if (re && im) return 0;
    if (!re && im) return 1;
    if (!re && !im) return 2;
    return 3;
}

inline bool region_accepts(ComplexSample x, const PostselectionRegion& reg) {
    if (std::abs(x) < reg.delta_r) return false;
    if (reg.delta_theta == 0.0) return true;
    double th = std::atan2(x.imag(), x.real());
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    const double off = std::fmod(th, std::numbers::pi / 2);
    return std::min(off, std::numbers::pi / 2 - off) >= reg.delta_theta;
}

/// P(outcome in quadrant q and accepted) for a Gaussian outcome with mean mu and
/// per-quadrature variances (vx, vp).
struct QuadrantMass {
    std::array<double, 4> p{};
    double abs_error = 0.0;
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

} // namespace detail

inline QuadrantMass quadrant_mass_closed(Complex mu, double vx, double vp) {
    const double px = detail::normal_cdf(mu.real() / std::sqrt(vx));
    const double pp = detail::normal_cdf(mu.imag() / std::sqrt(vp));
    QuadrantMass m;
    m.p = {px * pp, (1 - px) * pp, (1 - px) * (1 - pp), px * (1 - pp)};
    return m;
}

/// Nested adaptive Gauss-Kronrod in polar coordinates over the accepted part of each quadrant.
inline QuadrantMass quadrant_mass_quadrature(Complex mu, double vx, double vp, const PostselectionRegion& reg,
                                             double abs_tol = 1e-10) {
    reg.validate();
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(vx * vp));
    const double sd = std::sqrt(std::max(vx, vp));
    // Gaussian tail outside radius |mu| + 8 sd is below 1e-14
    const double r_max = std::abs(mu) + 8.5 * sd;
    QuadrantMass out;
    if (reg.delta_r >= r_max) return out;
    const double tail = std::exp(-0.5 * 8.5 * 8.5);
    for (int q = 0; q < 4; ++q) {
        const double t0 = q * std::numbers::pi / 2 + reg.delta_theta;
        const double t1 = (q + 1) * std::numbers::pi / 2 - reg.delta_theta;
        double inner_err = 0.0;
        auto radial = [&](double r) {
            auto ang = [&](double th) {
                const double dx = r * std::cos(th) - mu.real(), dp = r * std::sin(th) - mu.imag();
                return std::exp(-dx * dx / (2 * vx) - dp * dp / (2 * vp));
            };
            const auto in = integrate_adaptive(ang, t0, t1, abs_tol * 1e-2 / (r_max + 1.0));
            inner_err = std::max(inner_err, in.abs_error * norm * r);
            return in.value * norm * r;
        };
        // split the radial range at the peak so the kernel sees the bump
        std::vector<double> cuts = {reg.delta_r};
        const double rp = std::abs(mu);
        for (double c : {rp - 2 * sd, rp, rp + 2 * sd})
            if (c > reg.delta_r && c < r_max) cuts.push_back(c);
        cuts.push_back(r_max);
        double v = 0.0, e = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const auto res = integrate_adaptive(radial, cuts[i], cuts[i + 1], abs_tol / 4);
            v += res.value;
            e += res.abs_error;
        }
        out.p[static_cast<std::size_t>(q)] = v;
        out.abs_error += e + inner_err * (r_max - reg.delta_r) + tail;
    }
    return out;
}

inline QuadrantMass quadrant_mass(Complex mu, double vx, double vp, const PostselectionRegion& reg,
                                  double abs_tol = 1e-10) {
    if (reg.trivial()) return quadrant_mass_closed(mu, vx, vp);
    return quadrant_mass_quadrature(mu, vx, vp, reg, abs_tol);
}

/// Accepted-quadrant table P[k][q] for every alphabet symbol.
struct QuadrantTable {
    std::vector<std::array<double, 4>> p;
    double abs_error = 0.0;
};

inline QuadrantTable quadrant_table(const Alphabet& alph, const NoiseModel& noise, const DetectorParams& det,
                                    const PostselectionRegion& reg, bool force_quadrature = false,
                                    double abs_tol = 1e-10) {
    const double g = mean_gain(noise, det);
    const double vx = quadrature_variance_x(noise, det), vp = quadrature_variance_p(noise, det);
    QuadrantTable t;
    // equal-amplitude QPSK with isotropic noise: every row is a rotation of row 0
    bool rotational = vx == vp && alph.size() == 4;
    if (rotational) {
        Complex rot = alph.amplitudes[0];
        for (int k = 1; k < 4; ++k) {
            rot *= Complex{0, 1};
            if (std::abs(alph.amplitudes[static_cast<std::size_t>(k)] - rot) > 1e-14) rotational = false;
        }
    }
    auto mass = [&](Complex mu) {
        return force_quadrature ? quadrant_mass_quadrature(mu, vx, vp, reg, abs_tol) : quadrant_mass(mu, vx, vp, reg, abs_tol);
    };
    if (rotational) {
        const QuadrantMass m0 = mass(g * alph.amplitudes[0]);
        for (int k = 0; k < 4; ++k) {
            std::array<double, 4> row{};
            for (int q = 0; q < 4; ++q) row[static_cast<std::size_t>(q)] = m0.p[static_cast<std::size_t>((q - k + 4) % 4)];
            t.p.push_back(row);
        }
        t.abs_error = m0.abs_error;
        return t;
    }
    for (auto a : alph.amplitudes) {
        const QuadrantMass m = mass(g * a);
        t.p.push_back(m.p);
        t.abs_error = std::max(t.abs_error, m.abs_error);
    }
    return t;
}

} // namespace qnic
