#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "qnic/secanalysis/budget.hpp"
#include "qnic/secanalysis/qds.hpp"
#include "qnic/secanalysis/rates.hpp"

namespace qnic {

enum class QdsDirection { Backward, Forward };

inline std::string to_string(QdsDirection d) { return d == QdsDirection::Backward ? "qds-b" : "qds-f"; }

struct QdsParams {
    Alphabet alphabet = Alphabet::qpsk(0.64);
    NoiseModel noise{};
    DetectorParams det{0.5, 0.0};
    AttackModel attack = AttackModel::EntanglingCloner;
    double epsilon = 1e-4;
    int n_max = 40;
};

struct RegionPoint {
    PostselectionRegion region;
    PerrResult perr;
    PeResult pe;
    std::optional<SecurityBudget> budget;  // empty when insecure

    double objective() const {
        return budget ? budget->L_tilde_real : std::numeric_limits<double>::infinity();
    }
};

inline RegionPoint evaluate_region(QdsDirection dir, const QdsParams& P, const PostselectionRegion& reg,
                                   const std::optional<PeResult>& pe_b = std::nullopt) {
    RegionPoint pt;
    pt.region = reg;
    pt.perr = perr_honest(P.alphabet, P.noise, P.det, reg);
    if (dir == QdsDirection::Backward)
        pt.pe = pe_b ? *pe_b : pe_qds_b(P.attack, P.alphabet, P.noise.T, P.noise.xi, P.n_max);
    else
        pt.pe = pe_qds_f(P.attack, P.alphabet, P.noise, P.det, reg);
    if (pt.perr.N > 0.0 && pt.pe.p_e > pt.perr.p_err) {
        try {
            pt.budget = thresholds_and_length(pt.pe.p_e, pt.perr.p_err, P.epsilon, pt.perr.N);
        } catch (const InsecureChannel&) {
        }
    }
    return pt;
}

struct RegionGrid {
    double dr_max = 6.0;
    double dr_step = 0.25;
    int refine_levels = 2;
    int refine_factor = 5;
    bool optimize_theta = false;
    double dtheta_max = 0.6;
    double dtheta_step = 0.1;
};

struct RegionOptimum {
    RegionPoint best;
    int evaluations = 0;
};

/// Coarse-to-fine search over delta_r (and optionally delta_theta) minimizing L-tilde.
/// Candidates are scanned in ascending order and replaced only on strict improvement.
inline RegionOptimum optimize_region(QdsDirection dir, const QdsParams& P, const RegionGrid& grid = {}) {
    if (!(grid.dr_step > 0.0) || !(grid.dr_max >= 0.0)) throw DomainError("optimize_region: empty grid");
    std::optional<PeResult> pe_b;
    if (dir == QdsDirection::Backward) pe_b = pe_qds_b(P.attack, P.alphabet, P.noise.T, P.noise.xi, P.n_max);

    std::vector<double> thetas = {0.0};
    if (grid.optimize_theta)
        for (double t = grid.dtheta_step; t <= grid.dtheta_max && t < std::numbers::pi / 4; t += grid.dtheta_step)
            thetas.push_back(t);

    RegionOptimum out;
    bool have = false;
    auto consider = [&](double dr, double dt) {
        const RegionPoint pt = evaluate_region(dir, P, {dr, dt}, pe_b);
        ++out.evaluations;
        if (!have || pt.objective() < out.best.objective()) {
            out.best = pt;
            have = true;
        }
    };
    const int n = static_cast<int>(std::floor(grid.dr_max / grid.dr_step + 1e-9));
    for (double dt : thetas)
        for (int i = 0; i <= n; ++i) consider(i * grid.dr_step, dt);

    double step = grid.dr_step;
    for (int lvl = 0; lvl < grid.refine_levels && out.best.budget; ++lvl) {
        const double centre = out.best.region.delta_r, dt = out.best.region.delta_theta;
        const double fine = step / grid.refine_factor;
        for (int i = -grid.refine_factor; i <= grid.refine_factor; ++i) {
            const double dr = centre + i * fine;
            if (i == 0 || dr < 0.0) continue;
            consider(dr, dt);
        }
        step = fine;
    }
    if (!out.best.budget) throw InsecureChannel("optimize_region: no region yields p_e > p_err");
    return out;
}

struct GhGrid {
    int coarse = 9;
    double theta_tol = 1e-3;
    RateGrid rate{};
};

/// Maximizes min(kappa_B, kappa_C) over the gauge angle theta, g = cos(theta), h = sin(theta).
inline QssRate optimize_gh(const QssParams& P, const GhGrid& grid = {}) {
    if (grid.coarse < 2) throw DomainError("optimize_gh: empty grid");
    const double lo = 0.02, hi = std::numbers::pi / 2 - 0.02;
    auto objective = [&](double th) {
        const QssEvaluation e = qss_evaluate(P, std::cos(th), std::sin(th), kTermB | kTermC, grid.rate);
        return std::min(e.mi - e.chi_b, e.mi - e.chi_c);
    };
    std::vector<double> th(static_cast<std::size_t>(grid.coarse)), val(th.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < th.size(); ++i) {
        th[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(th.size() - 1);
        val[i] = objective(th[i]);
        if (val[i] > val[best]) best = i;
    }
    double a = th[best == 0 ? 0 : best - 1], b = th[std::min(best + 1, th.size() - 1)];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > grid.theta_tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = objective(d);
        }
    }
    double t = 0.5 * (a + b);
    if (val[best] > std::max(fc, fd)) t = th[best];
    return qss_rate(P, std::cos(t), std::sin(t), AttackModel::Beamsplitter, grid.rate);
}

} // namespace qnic
