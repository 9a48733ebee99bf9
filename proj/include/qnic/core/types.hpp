#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "qnic/core/errors.hpp"

namespace qnic {

using Complex = std::complex<double>;

/// Heterodyne outcome in sqrt(snu); vacuum variance 1/2 per quadrature.
using ComplexSample = std::complex<double>;

inline bool is_finite(ComplexSample x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }

inline ComplexSample require_finite(ComplexSample x) {
    if (!is_finite(x)) throw DomainError("non-finite complex sample");
    return x;
}

struct CoherentSymbol {
    Complex amplitude;
    int index = 0;
};

/// Sending alphabet: amplitudes with prior weights. QPSK index k sits at a * i^k * e^{i phi0}.
struct Alphabet {
    std::vector<Complex> amplitudes;
    std::vector<double> weights;

    static Alphabet qpsk(double a, double phi0 = 0.0) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("qpsk: amplitude must be >= 0");
        Alphabet out;
        const Complex rot = std::polar(1.0, phi0);
        const Complex ik[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        for (int k = 0; k < 4; ++k) {
            out.amplitudes.push_back(a * ik[k] * rot);
            out.weights.push_back(0.25);
        }
        return out;
    }

    std::size_t size() const { return amplitudes.size(); }

    CoherentSymbol symbol(int k) const { return {amplitudes.at(static_cast<std::size_t>(k)), k}; }

    void validate() const {
        if (amplitudes.empty() || amplitudes.size() != weights.size())
            throw DomainError("alphabet: amplitudes/weights size mismatch");
        double s = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw DomainError("alphabet: negative weight");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-12) throw DomainError("alphabet: weights do not sum to 1");
    }
};

/// How an amplitude maps onto the mean of a heterodyne outcome.
///  SplitQuadrature: mean sqrt(eta*T/2)*alpha (signal split across two quadratures).
///  Husimi:          mean sqrt(eta*T)*alpha   (Q-function convention).
enum class HeterodyneConvention { SplitQuadrature, Husimi };

inline double convention_scale(HeterodyneConvention c) {
    return c == HeterodyneConvention::Husimi ? 1.0 : 0.5;
}

inline std::string to_string(HeterodyneConvention c) {
    return c == HeterodyneConvention::Husimi ? "husimi" : "split-quadrature";
}

struct NoiseModel {
    double T = 1.0;
    double xi = 0.0;
    std::optional<double> xi_p; // p-quadrature excess noise when asymmetric
    HeterodyneConvention convention = HeterodyneConvention::SplitQuadrature;

    double xi_x() const { return xi; }
    double xi_pq() const { return xi_p.value_or(xi); }

    void validate() const {
        if (!(T >= 0.0 && T <= 1.0)) throw DomainError("noise: T must lie in [0,1]");
        if (!(xi >= 0.0) || !std::isfinite(xi)) throw DomainError("noise: xi must be >= 0");
        if (xi_p && (!(*xi_p >= 0.0) || !std::isfinite(*xi_p))) throw DomainError("noise: xi_p must be >= 0");
    }
};

struct DetectorParams {
    double eta = 1.0;
    double v_el = 0.0;

    void validate() const {
        if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("detector: eta must lie in (0,1]");
        if (!(v_el >= 0.0) || !std::isfinite(v_el)) throw DomainError("detector: v_el must be >= 0");
    }
};

inline double loss_db_to_T(double db) { return std::pow(10.0, -db / 10.0); }
inline double T_to_loss_db(double T) { return -10.0 * std::log10(T); }

} // namespace qnic
