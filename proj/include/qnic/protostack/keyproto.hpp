#pragma once

#include <cmath>
#include <string>

#include "qnic/protostack/keys.hpp"
#include "qnic/protostack/links.hpp"
#include "qnic/protostack/report.hpp"
#include "qnic/secanalysis/rates.hpp"

namespace qnic {

enum class WithheldParty { None, Bob, Charlie };

inline std::string to_string(WithheldParty w) {
    switch (w) {
    case WithheldParty::None: return "none";
    case WithheldParty::Bob: return "bob";
    default: return "charlie";
    }
}

struct QssRunConfig {
    std::size_t L = 0;  // state pairs (one from Bob and one from Charlie)
    double g = std::sqrt(0.5), h = std::sqrt(0.5);
    QssParams params{};
    double efficiency = 1.0;
    BitString secret;   // empty: a random secret of the full key length
    WithheldParty withheld = WithheldParty::None;
    int bits_per_quadrature = 2;
    RateGrid grid{};
};

/// One QSS-b round. With a withheld party the report carries the remaining
/// player's bit agreement with the true secret instead of an honest reconstruction.
inline ProtocolReport run_qss_b(const QssRunConfig& cfg, SeededRandomSource& rng, QuantumLink& leg_b,
                                QuantumLink& leg_c) {
    if (cfg.L == 0) throw DomainError("run_qss_b: L must be positive");
    if (cfg.g == 0.0 && cfg.h == 0.0) throw DomainError("run_qss_b: (g, h) must not both vanish");
    if (!(cfg.efficiency > 0.0 && cfg.efficiency <= 1.0)) throw DomainError("run_qss_b: efficiency must lie in (0,1]");
    const QssRate rate = qss_rate(cfg.params, cfg.g, cfg.h, AttackModel::Beamsplitter, cfg.grid);
    if (!(rate.kappa_final > 0.0)) throw RateNonPositive("run_qss_b: estimated key rate is not positive");

    const SeededRandomSource base(rng.next_u64());
    SeededRandomSource rb = base.child(1), rc = base.child(2), rs = base.child(3);
    const std::uint64_t hash_seed = base.child(4).seed();
    const LegRecord B = leg_b.distribute(cfg.L, rb);
    const LegRecord C = leg_c.distribute(cfg.L, rc);

    std::vector<ComplexSample> xa;
    std::vector<std::size_t> used;
    for (std::size_t j = 0; j < std::min(B.size(), C.size()); ++j) {
        if (!B.usable[j] || !C.usable[j]) continue;
        xa.push_back(cfg.g * B.outcome[j] + cfg.h * C.outcome[j]);
        used.push_back(j);
    }
    const Discretizer disc = Discretizer::fit(xa, cfg.bits_per_quadrature);
    const BitString raw = disc.apply(xa);
    const auto key_bits = static_cast<std::size_t>(std::floor(cfg.efficiency * rate.kappa_final * static_cast<double>(xa.size())));
    const BitString key = toeplitz_hash(raw, key_bits, hash_seed);
    const BitString secret = cfg.secret.size() ? cfg.secret : BitString::random(key_bits, rs);
    if (secret.size() > key_bits) throw DomainError("run_qss_b: key shorter than secret; increase L");
    const BitString cipher = secret ^ key.prefix(secret.size());

    ProtocolReport rep;
    rep.protocol = "qss-b";
    rep.seed = rng.seed();
    KeyOutcome k;
    k.kappa = rate.kappa_final;
    k.two_kappa = rate.two_kappa;
    k.mutual_information = rate.dishonest_b.mutual_information;
    k.holevo = std::max(rate.dishonest_b.holevo, rate.dishonest_c.holevo);
    k.raw_bits = raw.size();
    k.key_bits = key_bits;
    k.secret_bits = secret.size();
    k.g = cfg.g;
    k.h = cfg.h;

    if (cfg.withheld == WithheldParty::None) {
        // joint reconstruction: reconciliation hands Bob and Charlie Alice's discretized string
        const BitString joint_key = toeplitz_hash(raw, key_bits, hash_seed);
        k.reconstructed = (cipher ^ joint_key.prefix(secret.size())) == secret;
    } else {
        // a lone player can only estimate X_A from the symbols it sent itself
        const bool bob = cfg.withheld == WithheldParty::Charlie;
        const LegRecord& own = bob ? B : C;
        const double gain = mean_gain(bob ? cfg.params.noise_b() : cfg.params.noise_c(), cfg.params.det);
        const double w = bob ? cfg.g : cfg.h;
        std::vector<ComplexSample> est;
        for (std::size_t j : used) est.push_back(w * gain * own.sent_amplitude[j]);
        const BitString guess_key = toeplitz_hash(disc.apply(est), key_bits, hash_seed);
        const BitString decrypted = cipher ^ guess_key.prefix(secret.size());
        k.single_player_agreement = decrypted.agreement(secret);
        k.withheld_party = to_string(cfg.withheld);
        k.reconstructed = decrypted == secret;
    }
    rep.key = k;
    rep.params = {{"L", cfg.L},
                  {"a", cfg.params.a},
                  {"T_B", cfg.params.T_B},
                  {"T_C", cfg.params.T_C},
                  {"xi_B", cfg.params.xi_B},
                  {"xi_C", cfg.params.xi_C},
                  {"eta", cfg.params.det.eta},
                  {"v_el", cfg.params.det.v_el},
                  {"efficiency", cfg.efficiency},
                  {"bits_per_quadrature", cfg.bits_per_quadrature},
                  {"withheld", to_string(cfg.withheld)},
                  {"convention", to_string(cfg.params.convention)}};
    return rep;
}

inline ProtocolReport run_qss_b(const QssRunConfig& cfg, SeededRandomSource& rng) {
    const Alphabet alph = Alphabet::qpsk(cfg.params.a);
    IdealLink b(alph, cfg.params.noise_b(), cfg.params.det), c(alph, cfg.params.noise_c(), cfg.params.det);
    return run_qss_b(cfg, rng, b, c);
}

struct QkdRunConfig {
    std::size_t L = 0;
    LinkParams params{};
    double efficiency = 1.0;
    int bits_per_quadrature = 2;
    RateGrid grid{};
};

/// One QKD-f round; the key is distilled from the receiver's discretized outcomes.
inline ProtocolReport run_qkd_f(const QkdRunConfig& cfg, SeededRandomSource& rng, QuantumLink& link) {
    if (cfg.L == 0) throw DomainError("run_qkd_f: L must be positive");
    if (!(cfg.efficiency > 0.0 && cfg.efficiency <= 1.0)) throw DomainError("run_qkd_f: efficiency must lie in (0,1]");
    const RateBreakdown rate = qkd_f_rate(cfg.params, AttackModel::Beamsplitter, cfg.grid);
    if (!(rate.kappa > 0.0)) throw RateNonPositive("run_qkd_f: estimated key rate is not positive");
    const SeededRandomSource base(rng.next_u64());
    SeededRandomSource rl = base.child(1);
    const std::uint64_t hash_seed = base.child(2).seed();
    const LegRecord leg = link.distribute(cfg.L, rl);
    std::vector<ComplexSample> xs;
    for (std::size_t j = 0; j < leg.size(); ++j)
        if (leg.usable[j]) xs.push_back(leg.outcome[j]);
    const Discretizer disc = Discretizer::fit(xs, cfg.bits_per_quadrature);
    const BitString raw = disc.apply(xs);
    const auto key_bits = static_cast<std::size_t>(std::floor(cfg.efficiency * rate.kappa * static_cast<double>(xs.size())));
    const BitString bob_key = toeplitz_hash(raw, key_bits, hash_seed);
    // Alice recovers Bob's string through reconciliation, then hashes identically
    const BitString alice_key = toeplitz_hash(raw, key_bits, hash_seed);

    ProtocolReport rep;
    rep.protocol = "qkd-f";
    rep.seed = rng.seed();
    KeyOutcome k;
    k.kappa = rate.kappa;
    k.two_kappa = 2.0 * rate.kappa;
    k.mutual_information = rate.mutual_information;
    k.holevo = rate.holevo;
    k.raw_bits = raw.size();
    k.key_bits = key_bits;
    k.reconstructed = alice_key == bob_key;
    k.g = 1.0;
    k.h = 0.0;
    rep.key = k;
    rep.params = {{"L", cfg.L},       {"a", cfg.params.a},           {"T", cfg.params.T},
                  {"xi", cfg.params.xi}, {"eta", cfg.params.det.eta}, {"v_el", cfg.params.det.v_el},
                  {"efficiency", cfg.efficiency}, {"convention", to_string(cfg.params.convention)}};
    return rep;
}

inline ProtocolReport run_qkd_f(const QkdRunConfig& cfg, SeededRandomSource& rng) {
    IdealLink link(Alphabet::qpsk(cfg.params.a), cfg.params.noise(), cfg.params.det);
    return run_qkd_f(cfg, rng, link);
}

} // namespace qnic
