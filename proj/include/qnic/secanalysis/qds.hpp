#pragma once

#include <algorithm>
#include <vector>

#include "qnic/channels/channels.hpp"
#include "qnic/core/special.hpp"
#include "qnic/secanalysis/perr.hpp"

namespace qnic {

struct PeResult {
    double p_e = 0.5;
    double chi = 0.0;
    double truncation_deficit = 0.0;
};

inline double pe_from_chi(double chi) { return inv_binary_entropy(std::clamp(1.0 - chi, 0.0, 1.0)); }

/// Forger bound for QDS-b: Eve's information on the sender's symbol.
inline PeResult pe_qds_b(AttackModel attack, const Alphabet& alph, double T, double xi, int n_max = 40) {
    const EveConditionalStates states =
        attack == AttackModel::Beamsplitter ? eve_states_beamsplitter(alph, T) : eve_states_cloner(alph, T, xi, n_max);
    PeResult r;
    r.chi = holevo_information(states);
    r.p_e = pe_from_chi(r.chi);
    r.truncation_deficit = states.truncation_deficit;
    return r;
}

struct QdsfHolevoDetail {
    std::array<double, 4> quadrant_prob{};            // P(q | accepted)
    std::vector<std::array<double, 4>> posterior;     // [q][k] = P(k | q, accepted)
    double N = 0.0;
    double quadrature_error = 0.0;
};

/// Forger bound for QDS-f. Bob's side information about the recipient's eliminated
/// pair is the tapped light |sqrt(1-T) alpha_k>; the recipient's quadrant mixes the
/// alphabet with postselected weights.
inline PeResult pe_qds_f(AttackModel attack, const Alphabet& alph, const NoiseModel& noise, const DetectorParams& det,
                         const PostselectionRegion& region, QdsfHolevoDetail* detail = nullptr) {
    if (attack != AttackModel::Beamsplitter)
        throw UnsupportedAttack("pe_qds_f: only the beamsplitter attack is modelled for QDS-f");
    noise.validate();
    det.validate();
    region.validate();
    const QuadrantTable t = quadrant_table(alph, noise, det, region);
    const std::size_t K = alph.size();
    std::vector<Complex> b(K);
    for (std::size_t k = 0; k < K; ++k) b[k] = std::sqrt(1.0 - noise.T) * alph.amplitudes[k];

    double N = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        for (int q = 0; q < 4; ++q) N += alph.weights[k] * t.p[k][static_cast<std::size_t>(q)];
    if (!(N > 0.0)) throw InsecureChannel("pe_qds_f: postselection accepts nothing");

    QdsfHolevoDetail d;
    d.N = N;
    d.quadrature_error = t.abs_error;
    std::vector<double> avg(K, 0.0);
    double cond = 0.0;
    for (int q = 0; q < 4; ++q) {
        std::vector<double> w(K);
        double pq = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            w[k] = alph.weights[k] * t.p[k][static_cast<std::size_t>(q)] / N;
            pq += w[k];
            avg[k] += w[k];
        }
        std::array<double, 4> post{};
        if (pq > 0.0) {
            for (std::size_t k = 0; k < K; ++k) w[k] /= pq;
            for (std::size_t k = 0; k < std::min<std::size_t>(K, 4); ++k) post[k] = w[k];
            cond += pq * gram_entropy(b.data(), w.data(), K);
        }
        d.quadrant_prob[static_cast<std::size_t>(q)] = pq;
        d.posterior.push_back(post);
    }
    PeResult r;
    r.chi = std::max(0.0, gram_entropy(b.data(), avg.data(), K) - cond);
    r.p_e = pe_from_chi(r.chi);
    if (detail) *detail = d;
    return r;
}

} // namespace qnic
