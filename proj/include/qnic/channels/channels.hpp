#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnic/core/coherent.hpp"
#include "qnic/core/errors.hpp"
#include "qnic/core/fock.hpp"
#include "qnic/core/heterodyne.hpp"
#include "qnic/core/random.hpp"
#include "qnic/core/types.hpp"

namespace qnic {

enum class AttackModel { Beamsplitter, EntanglingCloner };

inline std::string to_string(AttackModel a) {
    return a == AttackModel::Beamsplitter ? "beamsplitter" : "entangling-cloner";
}

/// Eve's state conditioned on each sent symbol, either pure coherent states or density matrices.
struct EveConditionalStates {
    std::vector<double> priors;
    std::vector<Complex> pure_amplitudes;     // used when is_pure()
    std::vector<FockDensityMatrix> mixed;     // used otherwise
    double truncation_deficit = 0.0;

    bool is_pure() const { return mixed.empty(); }
    std::size_t size() const { return priors.size(); }
};

inline ComplexSample transmit_symbol(const CoherentSymbol& sym, const NoiseModel& noise, const DetectorParams& det,
                                     SeededRandomSource& rng) {
    const Complex mu = mean_gain(noise, det) * sym.amplitude;
    const double sx = std::sqrt(quadrature_variance_x(noise, det));
    const double sp = std::sqrt(quadrature_variance_p(noise, det));
    const double nx = rng.normal(), np = rng.normal();
    return {mu.real() + sx * nx, mu.imag() + sp * np};
}

inline EveConditionalStates eve_states_beamsplitter(const Alphabet& alph, double T) {
    if (!(T >= 0.0 && T <= 1.0)) throw DomainError("beamsplitter: T must lie in [0,1]");
    alph.validate();
    EveConditionalStates out;
    out.priors = alph.weights;
    for (auto a : alph.amplitudes) out.pure_amplitudes.push_back(std::sqrt(1.0 - T) * a);
    return out;
}

/// Thermal-mode variance of the injected two-mode squeezed vacuum.
inline double cloner_variance(double T, double xi) { return 1.0 + T * xi / (1.0 - T); }

/// Entangling cloner: Eve keeps the beamsplitter output E1 and the TMSV partner E2.
/// States live on E1 (dim n1) x E2 (dim n2), index e1 * n2 + e2.
inline EveConditionalStates eve_states_cloner(const Alphabet& alph, double T, double xi, int n_max = 40) {
    alph.validate();
    if (!(T > 0.0 && T <= 1.0) || !(xi >= 0.0)) throw DomainError("cloner: need T in (0,1], xi >= 0");
    if (T == 1.0) {
        if (xi > 0.0) throw DomainError("cloner: T = 1 with xi > 0 is unphysical");
        return eve_states_beamsplitter(alph, T);
    }
    if (xi == 0.0) return eve_states_beamsplitter(alph, T);

    const double W = cloner_variance(T, xi);
    const double lam2 = (W - 1.0) / (W + 1.0);
    // photon-number cutoff for the TMSV: geometric tail lam2^N below 1e-13
    int nn = 1;
    while (std::pow(lam2, nn) > 1e-13) ++nn;
    double amax = 0.0;
    for (auto a : alph.amplitudes) amax = std::max(amax, std::abs(a) * std::sqrt(1.0 - T));
    const int n2 = nn;
    auto c = [T](int n, int j) {
        const double lb = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        return std::exp(0.5 * lb) * std::pow(1.0 - T, 0.5 * j) * std::pow(T, 0.5 * (n - j));
    };

    for (int n1 = nn + required_n_max(amax * amax, 1e-10); n1 <= n_max + 1; n1 += 4) {
        if (n2 > n_max + 1) break;
        const int dim = n1 * n2;
        auto idx = [n2](int e1, int e2) { return e1 * n2 + e2; };
        // sigma_E = Tr_B |Psi0><Psi0| for vacuum signal input
        Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(dim, dim);
        for (int n = 0; n < nn; ++n)
            for (int np = 0; np < nn; ++np) {
                const double pre = (1.0 - lam2) * std::pow(lam2, 0.5 * (n + np));
                for (int j = 0; j <= std::min(n, np); ++j)
                    sigma(idx(n - j, n), idx(np - j, np)) += pre * c(n, j) * c(np, j);
            }
        const double tr0 = sigma.trace().real();
        sigma /= tr0;

        EveConditionalStates out;
        out.priors = alph.weights;
        double worst = 1.0 - tr0;
        const Eigen::MatrixXcd I2 = Eigen::MatrixXcd::Identity(n2, n2);
        for (auto a : alph.amplitudes) {
            const Eigen::MatrixXcd D1 = displacement_matrix(std::sqrt(1.0 - T) * a, n1);
            Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(dim, dim);
            for (int r = 0; r < n1; ++r)
                for (int q = 0; q < n1; ++q) D.block(r * n2, q * n2, n2, n2) = D1(r, q) * I2;
            Eigen::MatrixXcd rho = D * sigma * D.adjoint();
            const double tr = rho.trace().real();
            worst = std::max(worst, 1.0 - tr);
            rho /= tr;
            rho = 0.5 * (rho + rho.adjoint()).eval();
            out.mixed.emplace_back(std::move(rho), 1.0 - tr);
        }
        if (worst <= 1e-10) {
            out.truncation_deficit = worst;
            return out;
        }
    }
    throw TruncationError("cloner: state does not fit the requested Fock cutoff");
}

/// chi = S(sum_k p_k rho_k) - sum_k p_k S(rho_k), in bits.
inline double holevo_information(const EveConditionalStates& s) {
    if (s.is_pure()) {
        const double chi = gram_entropy(s.pure_amplitudes.data(), s.priors.data(), s.size());
        return std::clamp(chi, 0.0, std::log2(static_cast<double>(s.size())));
    }
    const Eigen::Index d = s.mixed.front().matrix().rows();
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(d, d);
    double cond = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        avg += s.priors[k] * s.mixed[k].matrix();
        cond += s.priors[k] * von_neumann_entropy(s.mixed[k]);
    }
    return std::clamp(hermitian_entropy(avg) - cond, 0.0, std::log2(static_cast<double>(s.size())));
}

/// Fock-path evaluation of the same quantity for pure conditionals; used as a cross-check.
inline double holevo_information_fock(const EveConditionalStates& s, int n_max) {
    if (!s.is_pure()) return holevo_information(s);
    std::vector<EnsembleEntry> all;
    for (std::size_t k = 0; k < s.size(); ++k) all.push_back({s.pure_amplitudes[k], s.priors[k]});
    return std::max(0.0, von_neumann_entropy(ensemble_to_fock(StateEnsemble(all), n_max)));
}

} // namespace qnic
