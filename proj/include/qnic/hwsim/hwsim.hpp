#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qnic/channels/channels.hpp"
#include "qnic/core/errors.hpp"
#include "qnic/core/random.hpp"
#include "qnic/core/types.hpp"

namespace qnic {

struct FrameConfig {
    int frame_len = 64;
    int n_ref = 4;
    double ref_amplitude_scale = 8.0;

    int data_per_frame() const { return frame_len - n_ref; }

    void validate() const {
        if (frame_len < 1 || n_ref < 0 || n_ref >= frame_len) throw DomainError("frame: need 0 <= n_ref < frame_len");
        if (!(ref_amplitude_scale > 1.0)) throw DomainError("frame: ref_amplitude_scale must exceed 1");
    }
};

struct TxRecord {
    std::vector<CoherentSymbol> symbols;
    std::vector<std::uint8_t> is_ref;
    std::vector<std::uint32_t> frame;
    FrameConfig cfg;
    double jitter_rel = 0.0;
    std::uint64_t seed = 0;

    std::size_t size() const { return symbols.size(); }
    std::size_t frame_count() const { return frame.empty() ? 0 : frame.back() + 1; }
};

/// Frames of n_ref bright references (symbol 0 scaled up) followed by data symbols.
inline TxRecord generate_tx(std::size_t L, const Alphabet& alph, const FrameConfig& cfg, double jitter_rel,
                            SeededRandomSource& rng) {
    if (L < 1) throw DomainError("generate_tx: L must be >= 1");
    if (!(jitter_rel >= 0.0)) throw DomainError("generate_tx: jitter_rel must be >= 0");
    cfg.validate();
    alph.validate();
    TxRecord tx;
    tx.cfg = cfg;
    tx.jitter_rel = jitter_rel;
    tx.seed = rng.seed();
    const std::size_t per = static_cast<std::size_t>(cfg.data_per_frame());
    const std::size_t frames = (L + per - 1) / per;
    std::vector<double> cdf;
    double acc = 0.0;
    for (double w : alph.weights) cdf.push_back(acc += w);
    std::size_t emitted = 0;
    for (std::size_t f = 0; f < frames; ++f) {
        for (int r = 0; r < cfg.n_ref; ++r) {
            tx.symbols.push_back({alph.amplitudes[0] * cfg.ref_amplitude_scale, 0});
            tx.is_ref.push_back(1);
            tx.frame.push_back(static_cast<std::uint32_t>(f));
        }
        for (std::size_t d = 0; d < per && emitted < L; ++d, ++emitted) {
            const double u = rng.uniform();
            int k = 0;
            while (k + 1 < static_cast<int>(cdf.size()) && u >= cdf[static_cast<std::size_t>(k)]) ++k;
            double scale = 1.0;
            if (jitter_rel > 0.0) scale = std::exp(jitter_rel * rng.normal());
            tx.symbols.push_back({alph.amplitudes[static_cast<std::size_t>(k)] * scale, k});
            tx.is_ref.push_back(0);
            tx.frame.push_back(static_cast<std::uint32_t>(f));
        }
    }
    return tx;
}

/// Receiver impairments beyond the quantum channel.
struct RxImpairments {
    double phase_drift_rate = 0.0;  // rad per symbol, random-walk step
    double phase_offset = 0.0;      // constant carrier offset, rad
    double fade_mean = 0.0;         // per-frame amplitude fade exp(-E), E ~ Exp(fade_mean)
};

/// Default impairment profile used for survival calibration.
inline RxImpairments default_impairments() { return {0.002, 0.0, 0.08}; }

struct RxRecord {
    std::vector<ComplexSample> raw;
    std::vector<ComplexSample> corrected;
    std::vector<std::uint8_t> accepted;
    double survival_fraction = 1.0;
    std::vector<double> true_phase;           // simulation ground truth per symbol
    std::vector<double> frame_phase_estimate; // filled by recover_phase
    std::vector<double> frame_snr;            // filled by recover_phase

    std::size_t size() const { return raw.size(); }
};

inline RxRecord simulate_rx(const TxRecord& tx, const NoiseModel& noise, const DetectorParams& det,
                            const RxImpairments& imp, const SeededRandomSource& rng) {
    noise.validate();
    det.validate();
    RxRecord rx;
    rx.raw.resize(tx.size());
    rx.true_phase.resize(tx.size());
    const std::size_t frames = tx.frame_count();
    std::size_t i = 0;
    for (std::size_t f = 0; f < frames; ++f) {
        SeededRandomSource fr = rng.child(f);
        double theta = imp.phase_offset;
        if (imp.phase_drift_rate > 0.0)
            theta += imp.phase_drift_rate * std::sqrt(static_cast<double>(tx.cfg.frame_len)) * fr.normal();
        const double fade = imp.fade_mean > 0.0 ? std::exp(-fr.exponential(imp.fade_mean)) : 1.0;
        bool first = true;
        for (; i < tx.size() && tx.frame[i] == f; ++i) {
            if (!first && imp.phase_drift_rate > 0.0) theta += imp.phase_drift_rate * fr.normal();
            first = false;
            const CoherentSymbol s{tx.symbols[i].amplitude * fade * std::polar(1.0, theta), tx.symbols[i].index};
            rx.raw[i] = transmit_symbol(s, noise, det, fr);
            rx.true_phase[i] = theta;
        }
    }
    rx.corrected = rx.raw;
    rx.accepted.assign(tx.size(), 1);
    rx.survival_fraction = 1.0;
    return rx;
}

inline RxRecord simulate_rx(const TxRecord& tx, const NoiseModel& noise, const DetectorParams& det,
                            double phase_drift_rate, const SeededRandomSource& rng) {
    return simulate_rx(tx, noise, det, RxImpairments{phase_drift_rate, 0.0, 0.0}, rng);
}

struct RecoveryConfig {
    double snr_threshold = 3.6;    // linear reference SNR below which a frame is dropped
    double deadband_sigmas = 5.0;  // phase estimates within this many std devs of 0 are not applied
    double shot_noise_var = 0.5;   // calibrated per-quadrature vacuum variance (plus v_el/2)
};

/// Per-frame phase estimate from the references, removal from the frame, and SNR rejection.
inline RxRecord recover_phase(const RxRecord& in, const TxRecord& tx, const RecoveryConfig& rc = {}) {
    RxRecord rx = in;
    const std::size_t frames = tx.frame_count();
    rx.frame_phase_estimate.assign(frames, 0.0);
    rx.frame_snr.assign(frames, 0.0);
    std::size_t i = 0, kept = 0;
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t begin = i;
        Complex acc{0, 0};
        double ref_power = 0.0;
        int nref = 0;
        for (; i < tx.size() && tx.frame[i] == f; ++i) {
            if (!tx.is_ref[i]) continue;
            const Complex s = tx.symbols[i].amplitude;
            acc += in.raw[i] * std::conj(s) / std::abs(s);
            ref_power += std::norm(s);
            ++nref;
        }
        if (nref == 0) throw DegenerateFrame("recover_phase: frame without reference symbols");
        const Complex mean = acc / static_cast<double>(nref);
        const double phi = std::arg(mean);
        const double snr = std::norm(mean) / (2.0 * rc.shot_noise_var);
        const double sigma_phi = std::sqrt(rc.shot_noise_var / nref) / std::max(std::abs(mean), 1e-300);
        const bool apply = std::abs(phi) > rc.deadband_sigmas * sigma_phi;
        const bool ok = snr >= rc.snr_threshold;
        rx.frame_phase_estimate[f] = apply ? phi : 0.0;
        rx.frame_snr[f] = snr;
        const Complex rot = std::polar(1.0, -phi);
        for (std::size_t j = begin; j < i; ++j) {
            if (apply) rx.corrected[j] = in.raw[j] * rot;
            rx.accepted[j] = ok ? 1 : 0;
            kept += ok ? 1 : 0;
        }
    }
    rx.survival_fraction = tx.size() ? static_cast<double>(kept) / static_cast<double>(tx.size()) : 1.0;
    return rx;
}

struct EstimatedParams {
    double T_hat = 0.0;
    double xi_hat = 0.0;
    double xi_x_hat = 0.0;
    double xi_p_hat = 0.0;
    double alpha_bar = 0.0;
    std::size_t n_used = 0;
};

/// Gain by least squares of corrected outcomes on sent amplitudes; excess noise from residual variances.
inline EstimatedParams estimate_channel(const TxRecord& tx, const RxRecord& rx, const DetectorParams& det = {},
                                        HeterodyneConvention conv = HeterodyneConvention::SplitQuadrature) {
    double num = 0.0, den = 0.0, asum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        if (tx.is_ref[i] || !rx.accepted[i]) continue;
        const Complex s = tx.symbols[i].amplitude;
        num += (rx.corrected[i] * std::conj(s)).real();
        den += std::norm(s);
        asum += std::abs(s);
        ++n;
    }
    if (n < 10000) throw InsufficientData("estimate_channel: fewer than 1e4 accepted data symbols");
    const double gain = num / den;
    EstimatedParams e;
    e.n_used = n;
    e.alpha_bar = asum / static_cast<double>(n);
    e.T_hat = gain * gain / (det.eta * convention_scale(conv));
    double sx = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        if (tx.is_ref[i] || !rx.accepted[i]) continue;
        const Complex r = rx.corrected[i] - gain * tx.symbols[i].amplitude;
        sx += r.real() * r.real();
        sp += r.imag() * r.imag();
    }
    const double vx = sx / static_cast<double>(n - 1), vp = sp / static_cast<double>(n - 1);
    const double T = std::max(e.T_hat, 1e-12);
    e.xi_x_hat = std::max(0.0, (2.0 * vx - 1.0 - det.v_el) * 2.0 / T);
    e.xi_p_hat = std::max(0.0, (2.0 * vp - 1.0 - det.v_el) * 2.0 / T);
    e.xi_hat = std::max(e.xi_x_hat, e.xi_p_hat);
    return e;
}

} // namespace qnic
