#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qnic/core/errors.hpp"

namespace qnic {

struct SecurityBudget {
    double epsilon_fail = 1e-4;
    double p_err = 0.0;
    double p_e = 0.0;
    double s_B = 0.0;
    double s_C = 0.0;
    double g_sec = 0.0;
    double N = 1.0;
    std::uint64_t L = 0;
    std::uint64_t L_tilde = 0;
    double L_real = 0.0;        // closed form before ceil
    double L_tilde_real = 0.0;

    bool secure() const { return g_sec > 0.0; }
};

inline double signature_length_real(double gap, double epsilon) { return 16.0 * std::log(2.0 / epsilon) / (gap * gap); }

inline SecurityBudget thresholds_and_length(double p_e, double p_err, double epsilon, double N = 1.0) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("thresholds: epsilon must lie in (0,1)");
    if (!(N > 0.0 && N <= 1.0)) throw DomainError("thresholds: N must lie in (0,1]");
    SecurityBudget b;
    b.epsilon_fail = epsilon;
    b.p_err = p_err;
    b.p_e = p_e;
    b.N = N;
    b.g_sec = p_e - p_err;
    if (!(b.g_sec > 0.0)) throw InsecureChannel("p_e <= p_err: no signature length achieves security");
    b.s_B = p_err + b.g_sec / 4.0;
    b.s_C = p_err + 3.0 * b.g_sec / 4.0;
    b.L_real = signature_length_real(b.g_sec, epsilon);
    b.L_tilde_real = b.L_real / N;
    constexpr double kMaxExact = 9.0e15;
    if (!(b.L_tilde_real < kMaxExact)) throw InsecureChannel("signature length beyond representable range");
    b.L = static_cast<std::uint64_t>(std::ceil(b.L_real));
    b.L_tilde = static_cast<std::uint64_t>(std::ceil(static_cast<double>(b.L) / N));
    return b;
}

struct AbortBounds {
    double eps_rep = 0.0;
    double eps_reject = 0.0;
    double eps_forg = 0.0;
    std::vector<std::string> warnings;
};

inline AbortBounds abort_bounds(double s_B, double s_C, double p_err, double p_e, double L) {
    if (!(p_err < s_B && s_B <= s_C && s_C < p_e)) throw DomainError("abort_bounds: need p_err < s_B <= s_C < p_e");
    AbortBounds a;
    a.eps_rep = 2.0 * std::exp(-(s_C - s_B) * (s_C - s_B) * L / 4.0);
    a.eps_reject = 2.0 * std::exp(-(s_B - p_err) * (s_B - p_err) * L);
    a.eps_forg = 2.0 * std::exp(-(p_e - s_C) * (p_e - s_C) * L / 2.0);
    auto clamp = [&a](double& v, const char* name) {
        if (v > 1.0) {
            v = 1.0;
            a.warnings.push_back(std::string(name) + " bound is vacuous (> 1), clamped");
        }
    };
    clamp(a.eps_rep, "repudiation");
    clamp(a.eps_reject, "robustness");
    clamp(a.eps_forg, "forgery");
    return a;
}

} // namespace qnic
