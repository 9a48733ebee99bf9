#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qnic/hwsim/hwsim.hpp"
#include "qnic/hwsim/records_io.hpp"

using namespace qnic;

namespace {

TxRecord make_tx(std::size_t L, double a, std::uint64_t seed, FrameConfig cfg = {}, double jitter = 0.0) {
    SeededRandomSource rng(seed);
    return generate_tx(L, Alphabet::qpsk(a), cfg, jitter, rng);
}

std::size_t count_data(const TxRecord& tx) {
    std::size_t n = 0;
    for (auto r : tx.is_ref) n += r ? 0 : 1;
    return n;
}

} // namespace

TEST(GenerateTx, PartialFrame) {
    const TxRecord tx = make_tx(60, 0.64, 1);
    EXPECT_EQ(tx.size(), 64u);
    EXPECT_EQ(tx.frame_count(), 1u);
    EXPECT_EQ(count_data(tx), 60u);
    for (int i = 0; i < 4; ++i) EXPECT_TRUE(tx.is_ref[i]);
}

TEST(GenerateTx, ExperimentScaleFrameCount) {
    const TxRecord tx = make_tx(1'920'000, 0.64, 2);
    EXPECT_EQ(tx.frame_count(), 32'000u);
    EXPECT_EQ(count_data(tx), 1'920'000u);
}

TEST(GenerateTx, NoJitterMeansEqualAmplitudes) {
    const TxRecord tx = make_tx(5000, 0.64, 3);
    for (std::size_t i = 0; i < tx.size(); ++i)
        if (!tx.is_ref[i]) {
            EXPECT_EQ(std::abs(tx.symbols[i].amplitude), std::abs(Complex(0.64)));
        }
}

TEST(GenerateTx, JitterKeepsAmplitudesPositive) {
    const TxRecord tx = make_tx(5000, 0.64, 4, {}, 0.3);
    bool varied = false;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        if (tx.is_ref[i]) continue;
        EXPECT_GT(std::abs(tx.symbols[i].amplitude), 0.0);
        varied |= std::abs(std::abs(tx.symbols[i].amplitude) - 0.64) > 1e-3;
    }
    EXPECT_TRUE(varied);
}

TEST(GenerateTx, UniformSymbols) {
    const TxRecord tx = make_tx(400'000, 0.64, 5);
    std::array<double, 4> c{};
    for (std::size_t i = 0; i < tx.size(); ++i)
        if (!tx.is_ref[i]) c[tx.symbols[i].index] += 1;
    for (double x : c) EXPECT_NEAR(x / 400'000, 0.25, 0.004);
}

TEST(SimulateRx, NoDriftCloudCentredOnConstellation) {
    const TxRecord tx = make_tx(200'000, 0.64, 6);
    const NoiseModel n{1.0, 0.0};
    const RxRecord rx = simulate_rx(tx, n, {}, 0.0, SeededRandomSource(7));
    std::array<Complex, 4> mean{};
    std::array<double, 4> cnt{};
    for (std::size_t i = 0; i < tx.size(); ++i) {
        if (tx.is_ref[i]) continue;
        mean[tx.symbols[i].index] += rx.raw[i];
        cnt[tx.symbols[i].index] += 1;
    }
    for (int k = 0; k < 4; ++k) {
        const Complex expect = mean_gain(n) * Alphabet::qpsk(0.64).amplitudes[k];
        EXPECT_NEAR(std::abs(mean[k] / cnt[k] - expect), 0.0, 0.01);
    }
}

TEST(SimulateRx, DriftRandomWalkScale) {
    FrameConfig cfg;
    const TxRecord tx = make_tx(60 * 20'000, 0.64, 8, cfg);
    const RxRecord rx = simulate_rx(tx, {1.0, 0.0}, {}, 0.01, SeededRandomSource(9));
    double s2 = 0.0;
    const std::size_t frames = tx.frame_count();
    for (std::size_t f = 0; f < frames; ++f) {
        const double d = rx.true_phase[f * 64 + 63] - rx.true_phase[f * 64];
        s2 += d * d;
    }
    const double sd = std::sqrt(s2 / frames);
    EXPECT_NEAR(sd, 0.01 * std::sqrt(63.0), 0.08 * 0.05);
}

TEST(SimulateRx, Deterministic) {
    const TxRecord tx = make_tx(10'000, 0.64, 10);
    const RxImpairments imp = default_impairments();
    const RxRecord a = simulate_rx(tx, {0.8, 0.02}, {0.5, 0.0}, imp, SeededRandomSource(11));
    const RxRecord b = simulate_rx(tx, {0.8, 0.02}, {0.5, 0.0}, imp, SeededRandomSource(11));
    EXPECT_EQ(a.raw, b.raw);
    EXPECT_EQ(a.true_phase, b.true_phase);
}

TEST(RecoverPhase, NoDriftLeavesSamplesUntouched) {
    const TxRecord tx = make_tx(100'000, 0.64, 12);
    const RxRecord raw = simulate_rx(tx, {1.0, 0.0}, {}, 0.0, SeededRandomSource(13));
    const RxRecord rx = recover_phase(raw, tx);
    ASSERT_EQ(rx.corrected.size(), rx.raw.size());
    for (std::size_t i = 0; i < rx.size(); ++i) EXPECT_LE(std::abs(rx.corrected[i] - rx.raw[i]), 1e-12);
    EXPECT_EQ(rx.survival_fraction, 1.0);
}

TEST(RecoverPhase, ConstantOffsetRecovered) {
    FrameConfig cfg;
    cfg.ref_amplitude_scale = 10.0 / 0.64;  // reference amplitude 10
    const TxRecord tx = make_tx(60 * 2000, 0.64, 14, cfg);
    const double off = std::numbers::pi / 7.0;
    const RxRecord raw = simulate_rx(tx, {1.0, 0.0}, {}, RxImpairments{0.0, off, 0.0}, SeededRandomSource(15));
    const RxRecord rx = recover_phase(raw, tx);
    double mean = 0.0;
    for (double p : rx.frame_phase_estimate) mean += p;
    mean /= rx.frame_phase_estimate.size();
    EXPECT_NEAR(mean, off, 0.02);
    // a frame whose estimate falls inside the deadband is left uncorrected; that must stay rare
    std::size_t missed = 0;
    for (double p : rx.frame_phase_estimate) missed += std::abs(p - off) > 0.2 ? 1 : 0;
    EXPECT_LE(missed, rx.frame_phase_estimate.size() / 200);
}

TEST(RecoverPhase, PreservesMagnitudesProperty) {
    const TxRecord tx = make_tx(50'000, 0.64, 16);
    const RxRecord raw = simulate_rx(tx, {0.7, 0.02}, {0.5, 0.0}, default_impairments(), SeededRandomSource(17));
    const RxRecord rx = recover_phase(raw, tx);
    for (std::size_t i = 0; i < rx.size(); ++i) EXPECT_NEAR(std::abs(rx.corrected[i]), std::abs(rx.raw[i]), 1e-12);
    double m = 0.0;
    for (auto a : rx.accepted) m += a;
    EXPECT_DOUBLE_EQ(rx.survival_fraction, m / rx.size());
}

TEST(RecoverPhase, DefaultProfileSurvivalCalibrated) {
    const TxRecord tx = make_tx(1'920'000, 0.64, 18);
    const NoiseModel n{loss_db_to_T(0.65), 0.027};
    const RxRecord raw = simulate_rx(tx, n, {0.5, 0.0}, default_impairments(), SeededRandomSource(19));
    const RxRecord rx = recover_phase(raw, tx);
    EXPECT_NEAR(rx.survival_fraction, 0.80, 0.05);
}

TEST(RecoverPhase, DegenerateFrameWithoutReferences) {
    FrameConfig cfg;
    cfg.n_ref = 0;
    const TxRecord tx = make_tx(100, 0.64, 20, cfg);
    const RxRecord raw = simulate_rx(tx, {1.0, 0.0}, {}, 0.0, SeededRandomSource(21));
    EXPECT_THROW(recover_phase(raw, tx), DegenerateFrame);
}

namespace {

EstimatedParams synth_estimate(std::size_t L, const NoiseModel& n, std::uint64_t seed, const DetectorParams& d = {}) {
    const TxRecord tx = make_tx(L, 0.64, seed);
    const RxRecord rx = recover_phase(simulate_rx(tx, n, d, 0.0, SeededRandomSource(seed + 1)), tx);
    return estimate_channel(tx, rx, d);
}

// Standard error of one quadrature's excess-noise estimate: var(v)=2v^2/n and xi=4(v-1/2)/T.
double xi_se(const NoiseModel& n, std::size_t count) {
    const double v = (1.0 + n.T * n.xi / 2.0) / 2.0;
    return 4.0 * v * std::sqrt(2.0 / static_cast<double>(count)) / n.T;
}

} // namespace

TEST(EstimateChannel, NullChannel) {
    const EstimatedParams e = synth_estimate(1'000'000, {1.0, 0.0}, 30);
    EXPECT_NEAR(e.T_hat, 1.0, 0.01);
    EXPECT_LE(e.xi_hat, 0.005);
    EXPECT_NEAR(e.alpha_bar, 0.64, 1e-9);
}

TEST(EstimateChannel, LossyChannelConsistent) {
    const NoiseModel n{0.336, 0.019};
    const EstimatedParams e = synth_estimate(1'000'000, n, 32);
    EXPECT_NEAR(e.T_hat, 0.336, 0.05 * 0.336);
    EXPECT_NEAR(e.xi_x_hat, 0.019, 3.0 * xi_se(n, e.n_used) + 1e-12);
    EXPECT_GE(e.T_hat, 0.0);
    EXPECT_LE(e.T_hat, 1.05);
}

TEST(EstimateChannel, MaxRuleReportsNoisierQuadrature) {
    NoiseModel n{1.0, 0.017};
    n.xi_p = 0.027;
    const EstimatedParams e = synth_estimate(4'000'000, n, 34);
    EXPECT_EQ(e.xi_hat, std::max(e.xi_x_hat, e.xi_p_hat));
    EXPECT_EQ(e.xi_hat, e.xi_p_hat);
    EXPECT_NEAR(e.xi_p_hat, 0.027, 3.0 * xi_se({1.0, 0.027}, e.n_used));
}

TEST(EstimateChannel, UnbiasedOnRandomDrawsProperty) {
    SeededRandomSource prng(40);
    for (int t = 0; t < 20; ++t) {
        const NoiseModel n{0.2 + 0.8 * prng.uniform(), 0.05 * prng.uniform()};
        const DetectorParams d{0.5 + 0.5 * prng.uniform(), 0.0};
        const EstimatedParams e = synth_estimate(200'000, n, 100 + t, d);
        const double v = (1.0 + n.T * n.xi / 2.0) / 2.0;
        const double T_se = 2.0 * n.T * std::sqrt(v / (d.eta * n.T / 2.0 * 0.64 * 0.64 * e.n_used));
        EXPECT_NEAR(e.T_hat, n.T, 3.0 * T_se);
        EXPECT_NEAR(e.xi_x_hat, n.xi, 3.0 * xi_se(n, e.n_used) + 1e-12);
    }
}

TEST(EstimateChannel, InsufficientData) {
    const TxRecord tx = make_tx(5000, 0.64, 50);
    const RxRecord rx = recover_phase(simulate_rx(tx, {1.0, 0.0}, {}, 0.0, SeededRandomSource(51)), tx);
    EXPECT_THROW(estimate_channel(tx, rx), InsufficientData);
}

TEST(EstimateChannel, EndToEndDeterministic) {
    const EstimatedParams a = synth_estimate(20'000, {0.6, 0.03}, 60);
    const EstimatedParams b = synth_estimate(20'000, {0.6, 0.03}, 60);
    EXPECT_EQ(a.T_hat, b.T_hat);
    EXPECT_EQ(a.xi_hat, b.xi_hat);
}

TEST(Records, RoundTripIsBitExact) {
    const TxRecord tx = make_tx(3000, 0.64, 70, {}, 0.1);
    const RxRecord rx =
        recover_phase(simulate_rx(tx, {0.7, 0.02}, {0.5, 0.01}, default_impairments(), SeededRandomSource(71)), tx);
    std::ostringstream os;
    write_records(os, tx, rx, {{"seed", 70}});
    std::istringstream is(os.str());
    const RecordBundle b = read_records(is);
    ASSERT_EQ(b.tx.size(), tx.size());
    for (std::size_t i = 0; i < tx.size(); ++i) {
        EXPECT_EQ(b.tx.symbols[i].amplitude, tx.symbols[i].amplitude);
        EXPECT_EQ(b.tx.symbols[i].index, tx.symbols[i].index);
        EXPECT_EQ(b.tx.frame[i], tx.frame[i]);
        EXPECT_EQ(b.tx.is_ref[i], tx.is_ref[i]);
        EXPECT_EQ(b.rx.raw[i], rx.raw[i]);
        EXPECT_EQ(b.rx.corrected[i], rx.corrected[i]);
        EXPECT_EQ(b.rx.accepted[i], rx.accepted[i]);
    }
    EXPECT_EQ(b.rx.survival_fraction, rx.survival_fraction);
    EXPECT_EQ(b.header.at("seed").get<int>(), 70);
    std::ostringstream again;
    write_records(again, b.tx, b.rx, {{"seed", 70}});
    EXPECT_EQ(again.str(), os.str());
}

TEST(Records, GoldenColumnHeader) {
    EXPECT_STREQ(kRecordColumns, "index,frame,is_ref,sent_re,sent_im,rx_re,rx_im,accepted,symbol,raw_re,raw_im");
    std::istringstream bad("# {}\nindex,frame\n");
    EXPECT_THROW(read_records(bad), ConfigError);
}
