#pragma once

#include <string>
#include <vector>

#include "qnic/protostack/elimination.hpp"
#include "qnic/protostack/links.hpp"
#include "qnic/protostack/report.hpp"
#include "qnic/secanalysis/optimize.hpp"

namespace qnic {

struct Thresholds {
    double s_B = 0.0;
    double s_C = 0.0;

    static Thresholds from(const SecurityBudget& b) { return {b.s_B, b.s_C}; }

    void validate() const {
        if (!(s_B > 0.0 && s_B < s_C && s_C < 1.0)) throw DomainError("thresholds: need 0 < s_B < s_C < 1");
    }
};

enum class QdsAdversary { None, RandomGuessForger, BeamsplitterForger };

inline std::string to_string(QdsAdversary a) {
    switch (a) {
    case QdsAdversary::None: return "none";
    case QdsAdversary::RandomGuessForger: return "random-guess";
    default: return "beamsplitter-forger";
    }
}

struct QdsRunConfig {
    QdsDirection direction = QdsDirection::Backward;
    std::size_t L = 0;  // states per leg
    Alphabet alphabet = Alphabet::qpsk(0.64);
    NoiseModel noise{};
    DetectorParams det{};
    PostselectionRegion region{};
    Thresholds thresholds{};
    QdsAdversary adversary = QdsAdversary::None;
    std::size_t min_accepted_per_half = 100;
    int message_bit = 0;
};

/// Per-leg eliminations made by whoever measured the leg.
struct LegEliminations {
    LegRecord leg;
    std::vector<std::uint8_t> accepted;
    std::vector<EliminatedPair> pair;
};

inline LegEliminations eliminate_leg(LegRecord leg, const QdsRunConfig& cfg) {
    LegEliminations e;
    e.accepted.resize(leg.size());
    e.pair.resize(leg.size());
    for (std::size_t j = 0; j < leg.size(); ++j) {
        const bool acc = leg.usable[j] && region_accepts(leg.outcome[j], cfg.region);
        e.accepted[j] = acc ? 1 : 0;
        if (acc) e.pair[j] = eliminate_two(leg.outcome[j], cfg.alphabet, cfg.noise, cfg.det);
    }
    e.leg = std::move(leg);
    return e;
}

inline HalfCount count_half(const LegEliminations& e, const std::vector<std::size_t>& idx) {
    HalfCount c;
    for (std::size_t j : idx) {
        if (!e.accepted[j]) continue;
        ++c.accepted;
        if (pair_contains(e.pair[j], e.leg.sent[j])) ++c.mismatches;
    }
    return c;
}

/// Runs one signature round for a single message bit over two legs. leg_b and leg_c are the
/// quantum legs involving Bob and Charlie (towards the signer for QDS-b, from it for QDS-f).
inline ProtocolReport run_qds(const QdsRunConfig& cfg, SeededRandomSource& rng, QuantumLink& leg_b,
                              QuantumLink& leg_c) {
    if (cfg.L == 0 || cfg.L % 2 != 0) throw DomainError("run_qds: L must be even and positive");
    cfg.thresholds.validate();
    cfg.region.validate();
    const SeededRandomSource base(rng.next_u64());
    SeededRandomSource rb = base.child(1), rc = base.child(2), sb = base.child(3), sc = base.child(4),
                       adv = base.child(5);

    const LegEliminations B = eliminate_leg(leg_b.distribute(cfg.L, rb), cfg);
    const LegEliminations C = eliminate_leg(leg_c.distribute(cfg.L, rc), cfg);
    const SignatureHalves hb = swap_partition(B.leg.size(), sb);
    const SignatureHalves hc = swap_partition(C.leg.size(), sc);

    ProtocolReport rep;
    rep.protocol = to_string(cfg.direction);
    rep.seed = rng.seed();

    std::size_t mis = 0, acc = 0;
    for (const LegEliminations* e : {&B, &C})
        for (std::size_t j = 0; j < e->leg.size(); ++j)
            if (e->accepted[j]) {
                ++acc;
                mis += pair_contains(e->pair[j], e->leg.sent[j]) ? 1 : 0;
            }
    rep.p_err_empirical = acc ? static_cast<double>(mis) / static_cast<double>(acc) : 0.0;
    rep.N_empirical = static_cast<double>(acc) / static_cast<double>(B.leg.size() + C.leg.size());
    rep.s_B = cfg.thresholds.s_B;
    rep.s_C = cfg.thresholds.s_C;

    auto verdict = [&](const char* party, HalfCount own, HalfCount received, double s) {
        if (own.accepted < cfg.min_accepted_per_half || received.accepted < cfg.min_accepted_per_half)
            throw InsufficientAccepted("run_qds: postselection left too few elements in a half");
        PartyVerdict v{party, own, received, s, false};
        v.accept = static_cast<double>(own.mismatches) < s * static_cast<double>(own.accepted) &&
                   static_cast<double>(received.mismatches) < s * static_cast<double>(received.accepted);
        return v;
    };
    // Bob keeps hb.own_half of his leg and gets Charlie's hc.received_half, and vice versa.
    rep.verdicts.push_back(verdict("bob", count_half(B, hb.own_half), count_half(C, hc.received_half), cfg.thresholds.s_B));
    rep.verdicts.push_back(verdict("charlie", count_half(C, hc.own_half), count_half(B, hb.received_half), cfg.thresholds.s_C));
    rep.aborted = !rep.all_accept();

    if (cfg.adversary != QdsAdversary::None) {
        // Bob forges towards Charlie. Positions Bob handed over are consistent by construction;
        // Charlie's kept half must be guessed.
        HalfCount guessed;
        const NoiseModel tap_noise{1.0, 0.0, std::nullopt, cfg.noise.convention};
        for (std::size_t j : hc.own_half) {
            if (!C.accepted[j]) continue;
            ++guessed.accepted;
            const int truth = C.leg.sent[j];
            bool mismatch = false;
            if (cfg.direction == QdsDirection::Backward) {
                EliminatedPair p;
                if (cfg.adversary == QdsAdversary::RandomGuessForger) {
                    p = quadrant_pair(static_cast<int>(adv.uniform_int(4)));
                } else {
                    const CoherentSymbol tap{std::sqrt(1.0 - cfg.noise.T) * C.leg.sent_amplitude[j], truth};
                    p = eliminate_two(transmit_symbol(tap, tap_noise, {}, adv), cfg.alphabet, tap_noise);
                }
                mismatch = pair_contains(p, truth);
            } else {
                int declared;
                if (cfg.adversary == QdsAdversary::RandomGuessForger) {
                    declared = static_cast<int>(adv.uniform_int(cfg.alphabet.size()));
                } else {
                    const CoherentSymbol tap{std::sqrt(1.0 - cfg.noise.T) * C.leg.sent_amplitude[j], truth};
                    const ComplexSample y = transmit_symbol(tap, tap_noise, {}, adv);
                    double best = -1e300;
                    declared = 0;
                    for (std::size_t k = 0; k < cfg.alphabet.size(); ++k) {
                        const double l = heterodyne_pdf(y, cfg.alphabet.amplitudes[k], tap_noise);
                        if (l > best) {
                            best = l;
                            declared = static_cast<int>(k);
                        }
                    }
                }
                mismatch = pair_contains(C.pair[j], declared);
            }
            guessed.mismatches += mismatch ? 1 : 0;
        }
        HalfCount handed = count_half(B, hb.received_half);
        handed.mismatches = 0;
        PartyVerdict f{"charlie", guessed, handed, cfg.thresholds.s_C, false};
        f.accept = static_cast<double>(guessed.mismatches) < cfg.thresholds.s_C * static_cast<double>(guessed.accepted) &&
                   static_cast<double>(handed.mismatches) < cfg.thresholds.s_C * static_cast<double>(handed.accepted);
        rep.forgery = f;
    }
    rep.params = {{"L", cfg.L},
                  {"direction", to_string(cfg.direction)},
                  {"T", cfg.noise.T},
                  {"xi", cfg.noise.xi},
                  {"eta", cfg.det.eta},
                  {"v_el", cfg.det.v_el},
                  {"delta_r", cfg.region.delta_r},
                  {"delta_theta", cfg.region.delta_theta},
                  {"adversary", to_string(cfg.adversary)},
                  {"message_bit", cfg.message_bit},
                  {"convention", to_string(cfg.noise.convention)}};
    return rep;
}

inline ProtocolReport run_qds(const QdsRunConfig& cfg, SeededRandomSource& rng) {
    IdealLink b(cfg.alphabet, cfg.noise, cfg.det), c(cfg.alphabet, cfg.noise, cfg.det);
    return run_qds(cfg, rng, b, c);
}

} // namespace qnic
