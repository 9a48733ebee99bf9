#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnic/channels/channels.hpp"
#include "qnic/core/coherent.hpp"
#include "qnic/core/heterodyne.hpp"
#include "qnic/core/quadrature.hpp"
#include "qnic/core/special.hpp"

namespace qnic {

enum class RateVariant { EveOnly, DishonestB, DishonestC };

inline std::string to_string(RateVariant v) {
    switch (v) {
    case RateVariant::EveOnly: return "eve-only";
    case RateVariant::DishonestB: return "dishonest-b";
    default: return "dishonest-c";
    }
}

struct RateBreakdown {
    double mutual_information = 0.0;
    double holevo = 0.0;
    double kappa = 0.0;
    bool clamped = false;
    RateVariant variant = RateVariant::EveOnly;
    double grid_error = 0.0;  // change between the last two grid refinements
    int grid_points = 0;      // points per axis at convergence
};

inline constexpr double kRateFloor = 1e-10;

inline RateBreakdown make_breakdown(double mi, double chi, RateVariant v, double err, int n) {
    RateBreakdown r;
    r.mutual_information = mi;
    r.holevo = chi;
    // differences at the level of the achieved integration error are not a rate
    r.clamped = mi - chi <= std::max(err, kRateFloor);
    r.kappa = r.clamped ? 0.0 : mi - chi;
    r.variant = v;
    r.grid_error = err;
    r.grid_points = n;
    return r;
}

/// Grid control for the X_A plane integrals.
struct RateGrid {
    int n_initial = 40;
    double tol = 1e-4;
    int n_limit = 320;
};

/// Two senders (B, C) to one heterodyning receiver.
struct QssParams {
    double a = 0.64;
    double T_B = 1.0, T_C = 1.0;
    double xi_B = 0.0, xi_C = 0.0;
    DetectorParams det{};
    HeterodyneConvention convention = HeterodyneConvention::Husimi;

    static QssParams symmetric(double a, double T, double xi, DetectorParams det = {},
                               HeterodyneConvention c = HeterodyneConvention::Husimi) {
        return {a, T, T, xi, xi, det, c};
    }

    NoiseModel noise_b() const { return {T_B, xi_B, std::nullopt, convention}; }
    NoiseModel noise_c() const { return {T_C, xi_C, std::nullopt, convention}; }

    void validate() const {
        if (!(a >= 0.0)) throw DomainError("qss: a must be >= 0");
        noise_b().validate();
        noise_c().validate();
        det.validate();
    }
};

/// One sender to one heterodyning receiver.
struct LinkParams {
    double a = 0.64;
    double T = 1.0;
    double xi = 0.0;
    DetectorParams det{};
    HeterodyneConvention convention = HeterodyneConvention::Husimi;

    NoiseModel noise() const { return {T, xi, std::nullopt, convention}; }
};

namespace detail {

template <int N>
double gram_entropy_fixed(const Eigen::Matrix<Complex, N, N>& overlap, const double* w) {
    Eigen::Matrix<Complex, N, N> G;
    std::array<double, N> s{};
    for (int j = 0; j < N; ++j) s[static_cast<std::size_t>(j)] = std::sqrt(std::max(w[j], 0.0));
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) G(j, k) = s[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(k)] * overlap(j, k);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Complex, N, N>> es(G, Eigen::EigenvaluesOnly);
    double h = 0.0;
    for (int j = 0; j < N; ++j) {
        const double l = es.eigenvalues()(j);
        if (l < -kEigenClampTolerance) throw DomainError("gram entropy: eigenvalue below clamp tolerance");
        h -= xlog2x(std::max(l, 0.0));
    }
    return std::max(h, 0.0);
}

inline Eigen::Matrix4cd overlap4(const std::array<Complex, 4>& e) {
    Eigen::Matrix4cd O;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) O(j, k) = coherent_overlap(e[static_cast<std::size_t>(j)], e[static_cast<std::size_t>(k)]);
    return O;
}

inline std::array<Complex, 4> qpsk4(double a) {
    return {Complex{a, 0}, Complex{0, a}, Complex{-a, 0}, Complex{0, -a}};
}

/// Square tensor Gauss-Legendre grid over [-R, R]^2, refined until every tracked
/// integral moves by less than tol.
template <class Eval>
auto refine_grid(double R, const RateGrid& grid, Eval&& eval) {
    int n = grid.n_initial;
    auto run = [&](int m) {
        const GaussLegendreRule gl = gauss_legendre(m);
        std::vector<double> xs(static_cast<std::size_t>(m)), ws(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            xs[static_cast<std::size_t>(i)] = R * gl.nodes[static_cast<std::size_t>(i)];
            ws[static_cast<std::size_t>(i)] = R * gl.weights[static_cast<std::size_t>(i)];
        }
        return eval(xs, ws);
    };
    auto prev = run(n);
    for (;;) {
        const int next = n + n / 2;
        auto cur = run(next);
        const double diff = cur.max_abs_diff(prev);
        if (diff < grid.tol) {
            cur.error = diff;
            cur.n = next;
            return cur;
        }
        if (next > grid.n_limit) throw QuadratureFailure("rate grid: tolerance not reached");
        prev = cur;
        n = next;
    }
}

} // namespace detail

enum QssTerms : unsigned { kTermEve = 1u, kTermB = 2u, kTermC = 4u, kTermAll = 7u };

struct QssEvaluation {
    double mi = 0.0;
    double chi_eve = 0.0, chi_b = 0.0, chi_c = 0.0;
    double error = 0.0;
    int n = 0;

    double max_abs_diff(const QssEvaluation& o) const {
        return std::max({std::abs(mi - o.mi), std::abs(chi_eve - o.chi_eve), std::abs(chi_b - o.chi_b),
                         std::abs(chi_c - o.chi_c)});
    }
};

/// Mutual information I(X_B,X_C : X_A) and the requested Holevo terms, with
/// X_A = g A_B + h A_C and beamsplitter eavesdropping on both legs.
inline QssEvaluation qss_evaluate(const QssParams& P, double g, double h, unsigned terms = kTermAll,
                                  const RateGrid& grid = {}) {
    P.validate();
    if (g == 0.0 && h == 0.0) throw DomainError("qss: (g, h) must not both vanish");
    const double gb = mean_gain(P.noise_b(), P.det), gc = mean_gain(P.noise_c(), P.det);
    const double vx = g * g * quadrature_variance_x(P.noise_b(), P.det) + h * h * quadrature_variance_x(P.noise_c(), P.det);
    const double vp = g * g * quadrature_variance_p(P.noise_b(), P.det) + h * h * quadrature_variance_p(P.noise_c(), P.det);
    const auto al = detail::qpsk4(P.a);
    std::array<Complex, 16> mu{};
    double reach = 0.0;
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            mu[static_cast<std::size_t>(4 * k + l)] = g * gb * al[static_cast<std::size_t>(k)] + h * gc * al[static_cast<std::size_t>(l)];
            reach = std::max({reach, std::abs(mu[static_cast<std::size_t>(4 * k + l)].real()),
                              std::abs(mu[static_cast<std::size_t>(4 * k + l)].imag())});
        }
    const double R = reach + 8.5 * std::sqrt(std::max(vx, vp));

    std::array<Complex, 4> eb{}, ec{};
    for (int k = 0; k < 4; ++k) {
        eb[static_cast<std::size_t>(k)] = std::sqrt(1.0 - P.T_B) * al[static_cast<std::size_t>(k)];
        ec[static_cast<std::size_t>(k)] = std::sqrt(1.0 - P.T_C) * al[static_cast<std::size_t>(k)];
    }
    const Eigen::Matrix4cd OB = detail::overlap4(eb), OC = detail::overlap4(ec);
    Eigen::Matrix<Complex, 16, 16> O16;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) O16(i, j) = OB(i / 4, j / 4) * OC(i % 4, j % 4);
    const double quarter[4] = {0.25, 0.25, 0.25, 0.25};
    const double S1B = detail::gram_entropy_fixed<4>(OB, quarter);
    const double S1C = detail::gram_entropy_fixed<4>(OC, quarter);
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(vx * vp));

    auto eval = [&](const std::vector<double>& xs, const std::vector<double>& ws) {
        double hcond = 0.0, se = 0.0, sb = 0.0, sc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < xs.size(); ++j) {
                std::array<double, 16> d{};
                double px = 0.0;
                for (std::size_t c = 0; c < 16; ++c) {
                    const double dx = xs[i] - mu[c].real(), dp = xs[j] - mu[c].imag();
                    d[c] = norm / 16.0 * std::exp(-dx * dx / (2 * vx) - dp * dp / (2 * vp));
                    px += d[c];
                }
                if (!(px > 1e-300)) continue;
                const double wq = ws[i] * ws[j];
                std::array<double, 16> post{};
                for (std::size_t c = 0; c < 16; ++c) {
                    post[c] = d[c] / px;
                    hcond -= wq * d[c] * (post[c] > 0 ? std::log2(post[c]) : 0.0);
                }
                if (terms & kTermEve) se += wq * px * detail::gram_entropy_fixed<16>(O16, post.data());
                if (terms & kTermB) {
                    double acc = 0.0;
                    for (int k = 0; k < 4; ++k) {
                        double pk = 0.0;
                        for (int l = 0; l < 4; ++l) pk += post[static_cast<std::size_t>(4 * k + l)];
                        if (pk <= 0.0) continue;
                        double pl[4];
                        for (int l = 0; l < 4; ++l) pl[l] = post[static_cast<std::size_t>(4 * k + l)] / pk;
                        acc += -xlog2x(pk) + pk * detail::gram_entropy_fixed<4>(OC, pl);
                    }
                    sb += wq * px * acc;
                }
                if (terms & kTermC) {
                    double acc = 0.0;
                    for (int l = 0; l < 4; ++l) {
                        double pl = 0.0;
                        for (int k = 0; k < 4; ++k) pl += post[static_cast<std::size_t>(4 * k + l)];
                        if (pl <= 0.0) continue;
                        double pk[4];
                        for (int k = 0; k < 4; ++k) pk[k] = post[static_cast<std::size_t>(4 * k + l)] / pl;
                        acc += -xlog2x(pl) + pl * detail::gram_entropy_fixed<4>(OB, pk);
                    }
                    sc += wq * px * acc;
                }
            }
        QssEvaluation e;
        e.mi = 4.0 - hcond;
        e.chi_eve = (terms & kTermEve) ? std::max(0.0, S1B + S1C - se) : 0.0;
        e.chi_b = (terms & kTermB) ? std::max(0.0, 2.0 + S1C - sb) : 0.0;
        e.chi_c = (terms & kTermC) ? std::max(0.0, 2.0 + S1B - sc) : 0.0;
        return e;
    };
    return detail::refine_grid(R, grid, eval);
}

inline double qss_mutual_information(const QssParams& P, double g, double h, const RateGrid& grid = {}) {
    return qss_evaluate(P, g, h, 0u, grid).mi;
}

inline double qss_holevo(const QssParams& P, double g, double h, AttackModel attack, RateVariant variant,
                         const RateGrid& grid = {}) {
    if (attack != AttackModel::Beamsplitter) throw UnsupportedAttack("qss_holevo: only the beamsplitter attack is modelled");
    const unsigned t = variant == RateVariant::EveOnly ? kTermEve : variant == RateVariant::DishonestB ? kTermB : kTermC;
    const QssEvaluation e = qss_evaluate(P, g, h, t, grid);
    return variant == RateVariant::EveOnly ? e.chi_eve : variant == RateVariant::DishonestB ? e.chi_b : e.chi_c;
}

struct QssRate {
    RateBreakdown eve, dishonest_b, dishonest_c;
    double kappa_final = 0.0;
    double two_kappa = 0.0;
    double g = 1.0, h = 1.0;
};

inline QssRate qss_rate(const QssParams& P, double g, double h, AttackModel attack = AttackModel::Beamsplitter,
                        const RateGrid& grid = {}) {
    if (attack != AttackModel::Beamsplitter) throw UnsupportedAttack("qss_rate: only the beamsplitter attack is modelled");
    const QssEvaluation e = qss_evaluate(P, g, h, kTermAll, grid);
    QssRate r;
    r.eve = make_breakdown(e.mi, e.chi_eve, RateVariant::EveOnly, e.error, e.n);
    r.dishonest_b = make_breakdown(e.mi, e.chi_b, RateVariant::DishonestB, e.error, e.n);
    r.dishonest_c = make_breakdown(e.mi, e.chi_c, RateVariant::DishonestC, e.error, e.n);
    r.kappa_final = std::min(r.dishonest_b.kappa, r.dishonest_c.kappa);
    r.two_kappa = 2.0 * r.kappa_final;
    r.g = g;
    r.h = h;
    return r;
}

struct LinkEvaluation {
    double mi = 0.0;
    double chi = 0.0;
    double error = 0.0;
    int n = 0;

    double max_abs_diff(const LinkEvaluation& o) const { return std::max(std::abs(mi - o.mi), std::abs(chi - o.chi)); }
};

/// I(A:B) and chi(B:E) with the key on the receiver's outcome.
inline LinkEvaluation link_evaluate(const LinkParams& P, bool with_chi = true, const RateGrid& grid = {}) {
    const NoiseModel nm = P.noise();
    nm.validate();
    P.det.validate();
    const double gain = mean_gain(nm, P.det);
    const double vx = quadrature_variance_x(nm, P.det), vp = quadrature_variance_p(nm, P.det);
    const auto al = detail::qpsk4(P.a);
    std::array<Complex, 4> mu{}, e{};
    for (std::size_t k = 0; k < 4; ++k) {
        mu[k] = gain * al[k];
        e[k] = std::sqrt(1.0 - P.T) * al[k];
    }
    const Eigen::Matrix4cd O = detail::overlap4(e);
    const double quarter[4] = {0.25, 0.25, 0.25, 0.25};
    const double S1 = detail::gram_entropy_fixed<4>(O, quarter);
    const double R = gain * P.a + 8.5 * std::sqrt(std::max(vx, vp));
    const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(vx * vp));
    auto eval = [&](const std::vector<double>& xs, const std::vector<double>& ws) {
        double hcond = 0.0, se = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 0; j < xs.size(); ++j) {
                double d[4], px = 0.0;
                for (std::size_t c = 0; c < 4; ++c) {
                    const double dx = xs[i] - mu[c].real(), dp = xs[j] - mu[c].imag();
                    d[c] = norm / 4.0 * std::exp(-dx * dx / (2 * vx) - dp * dp / (2 * vp));
                    px += d[c];
                }
                if (!(px > 1e-300)) continue;
                const double wq = ws[i] * ws[j];
                double post[4];
                for (std::size_t c = 0; c < 4; ++c) {
                    post[c] = d[c] / px;
                    hcond -= wq * d[c] * (post[c] > 0 ? std::log2(post[c]) : 0.0);
                }
                if (with_chi) se += wq * px * detail::gram_entropy_fixed<4>(O, post);
            }
        LinkEvaluation r;
        r.mi = 2.0 - hcond;
        r.chi = with_chi ? std::max(0.0, S1 - se) : 0.0;
        return r;
    };
    return detail::refine_grid(R, grid, eval);
}

inline RateBreakdown qkd_f_rate(const LinkParams& P, AttackModel attack = AttackModel::Beamsplitter,
                                const RateGrid& grid = {}) {
    if (attack != AttackModel::Beamsplitter) throw UnsupportedAttack("qkd_f_rate: only the beamsplitter attack is modelled");
    const LinkEvaluation e = link_evaluate(P, true, grid);
    return make_breakdown(e.mi, e.chi, RateVariant::EveOnly, e.error, e.n);
}

} // namespace qnic
