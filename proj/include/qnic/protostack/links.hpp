#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "qnic/channels/channels.hpp"
#include "qnic/hwsim/hwsim.hpp"

namespace qnic {

/// One quantum leg as seen by the protocol layer: what was sent and what the receiver measured.
struct LegRecord {
    std::vector<int> sent;
    std::vector<Complex> sent_amplitude;
    std::vector<ComplexSample> outcome;
    std::vector<std::uint8_t> usable;  // survived the receiver DSP

    std::size_t size() const { return sent.size(); }
};

/// Draws L symbols from the alphabet and carries them over one leg.
class QuantumLink {
public:
    virtual ~QuantumLink() = default;
    virtual LegRecord distribute(std::size_t L, SeededRandomSource& rng) = 0;
};

inline int draw_symbol(const Alphabet& alph, SeededRandomSource& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < alph.size(); ++k) {
        acc += alph.weights[k];
        if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(alph.size()) - 1;
}

/// Symbol-level link: transmit_symbol only, every sample usable.
class IdealLink : public QuantumLink {
public:
    IdealLink(Alphabet alph, NoiseModel noise, DetectorParams det)
        : alph_(std::move(alph)), noise_(noise), det_(det) {}

    LegRecord distribute(std::size_t L, SeededRandomSource& rng) override {
        LegRecord r;
        r.sent.reserve(L);
        r.sent_amplitude.reserve(L);
        r.outcome.reserve(L);
        for (std::size_t i = 0; i < L; ++i) {
            const int k = draw_symbol(alph_, rng);
            const CoherentSymbol s = alph_.symbol(k);
            r.sent.push_back(k);
            r.sent_amplitude.push_back(s.amplitude);
            r.outcome.push_back(transmit_symbol(s, noise_, det_, rng));
        }
        r.usable.assign(L, 1);
        return r;
    }

private:
    Alphabet alph_;
    NoiseModel noise_;
    DetectorParams det_;
};

/// Frame-level link through the hardware emulation; keeps the last Tx/Rx pair for persistence.
class HwsimLink : public QuantumLink {
public:
    HwsimLink(Alphabet alph, NoiseModel noise, DetectorParams det, FrameConfig cfg, RxImpairments imp,
              RecoveryConfig rc, double jitter_rel = 0.0)
        : alph_(std::move(alph)), noise_(noise), det_(det), cfg_(cfg), imp_(imp), rc_(rc), jitter_(jitter_rel) {}

    LegRecord distribute(std::size_t L, SeededRandomSource& rng) override {
        const SeededRandomSource base(rng.next_u64());
        SeededRandomSource txr = base.child(1);
        tx_ = generate_tx(L, alph_, cfg_, jitter_, txr);
        rx_ = recover_phase(simulate_rx(tx_, noise_, det_, imp_, base.child(2)), tx_, rc_);
        LegRecord r;
        for (std::size_t i = 0; i < tx_.size(); ++i) {
            if (tx_.is_ref[i]) continue;
            r.sent.push_back(tx_.symbols[i].index);
            r.sent_amplitude.push_back(tx_.symbols[i].amplitude);
            r.outcome.push_back(rx_.corrected[i]);
            r.usable.push_back(rx_.accepted[i]);
        }
        return r;
    }

    const TxRecord& last_tx() const { return tx_; }
    const RxRecord& last_rx() const { return rx_; }

private:
    Alphabet alph_;
    NoiseModel noise_;
    DetectorParams det_;
    FrameConfig cfg_;
    RxImpairments imp_;
    RecoveryConfig rc_;
    double jitter_;
    TxRecord tx_;
    RxRecord rx_;
};

/// Forwards to a link owned elsewhere, so the caller can inspect it after the protocol finishes.
class SharedLink : public QuantumLink {
public:
    explicit SharedLink(std::shared_ptr<QuantumLink> inner) : inner_(std::move(inner)) {}
    LegRecord distribute(std::size_t L, SeededRandomSource& rng) override { return inner_->distribute(L, rng); }

private:
    std::shared_ptr<QuantumLink> inner_;
};

} // namespace qnic
