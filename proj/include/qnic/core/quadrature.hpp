#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "qnic/core/errors.hpp"

namespace qnic {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
};

namespace detail {

// 15-point Kronrod nodes / weights with the embedded 7-point Gauss rule.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * kWgk[7];
    double rg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx), f2 = f(c + dx);
        rk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
    }
    return {rk * h, std::abs((rk - rg) * h)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) on [a, b].
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol, int max_intervals = 2000) {
    struct Seg {
        double a, b, v, e;
    };
    std::vector<Seg> segs;
    auto [v0, e0] = detail::gk15(f, a, b);
    segs.push_back({a, b, v0, e0});
    int evals = 15;
    double total = v0, err = e0;
    while (err > abs_tol) {
        if (static_cast<int>(segs.size()) >= max_intervals)
            throw QuadratureFailure("adaptive quadrature: tolerance not reached within interval budget");
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].e > segs[worst].e) worst = i;
        const Seg s = segs[worst];
        const double m = 0.5 * (s.a + s.b);
        auto [vl, el] = detail::gk15(f, s.a, m);
        auto [vr, er] = detail::gk15(f, m, s.b);
        evals += 30;
        segs[worst] = {s.a, m, vl, el};
        segs.push_back({m, s.b, vr, er});
        total = 0.0;
        err = 0.0;
        for (const auto& g : segs) {
            total += g.v;
            err += g.e;
        }
    }
    return {total, err, evals};
}

struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] via Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
    GaussLegendreRule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return r;
}

} // namespace qnic
