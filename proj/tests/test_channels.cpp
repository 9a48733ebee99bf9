#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qnic/channels/channels.hpp"
#include "qnic/core/heterodyne.hpp"

using namespace qnic;

namespace {

struct Moments {
    double mean_x = 0, mean_p = 0, var_x = 0, var_p = 0;
};

Moments sample_moments(const CoherentSymbol& s, const NoiseModel& n, const DetectorParams& d, std::size_t N,
                       std::uint64_t seed) {
    SeededRandomSource rng(seed);
    double sx = 0, sp = 0, sxx = 0, spp = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const ComplexSample x = transmit_symbol(s, n, d, rng);
        sx += x.real();
        sp += x.imag();
        sxx += x.real() * x.real();
        spp += x.imag() * x.imag();
    }
    Moments m;
    m.mean_x = sx / N;
    m.mean_p = sp / N;
    m.var_x = sxx / N - m.mean_x * m.mean_x;
    m.var_p = spp / N - m.mean_p * m.mean_p;
    return m;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Kolmogorov-Smirnov statistic of samples against N(mu, sd^2).
double ks_statistic(std::vector<double> v, double mu, double sd) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double F = normal_cdf((v[i] - mu) / sd);
        d = std::max({d, F - i / n, (i + 1) / n - F});
    }
    return d;
}

} // namespace

TEST(TransmitSymbol, VacuumMeanIsZero) {
    const Moments m = sample_moments({0.0, 0}, {1.0, 0.0}, {}, 1'000'000, 1);
    EXPECT_NEAR(m.mean_x, 0.0, 5e-3);
    EXPECT_NEAR(m.mean_p, 0.0, 5e-3);
}

TEST(TransmitSymbol, ShotNoiseFloor) {
    const Moments m = sample_moments({0.64, 0}, {1.0, 0.0}, {}, 1'000'000, 2);
    EXPECT_NEAR(m.var_x, 0.5, 0.005);
    EXPECT_NEAR(m.var_p, 0.5, 0.005);
}

TEST(TransmitSymbol, LossyMeanMatchesClosedForm) {
    const NoiseModel n{0.336, 0.019};
    const DetectorParams d{0.5, 0.0};
    const std::size_t N = 1'000'000;
    const Moments m = sample_moments({0.67, 0}, n, d, N, 3);
    const double expect = std::sqrt(0.5 * 0.336 / 2.0) * 0.67;
    const double se = std::sqrt(quadrature_variance_x(n, d) / N);
    EXPECT_NEAR(m.mean_x, expect, 4.0 * se);
    EXPECT_NEAR(m.mean_p, 0.0, 4.0 * se);
}

TEST(TransmitSymbol, KolmogorovSmirnovAgainstPdfProperty) {
    SeededRandomSource prng(77);
    // critical value of the KS statistic at significance 1e-3: sqrt(-ln(0.0005)/2)/sqrt(n)
    const std::size_t N = 100'000;
    const double crit = std::sqrt(-std::log(0.0005) / 2.0) / std::sqrt(static_cast<double>(N));
    for (int t = 0; t < 5; ++t) {
        const NoiseModel n{0.2 + 0.8 * prng.uniform(), 0.1 * prng.uniform()};
        const DetectorParams d{0.3 + 0.7 * prng.uniform(), 0.05 * prng.uniform()};
        const CoherentSymbol s{std::polar(0.3 + prng.uniform(), prng.uniform() * 6.28), 0};
        SeededRandomSource rng(1000 + t);
        std::vector<double> xs, ps;
        for (std::size_t i = 0; i < N; ++i) {
            const ComplexSample x = transmit_symbol(s, n, d, rng);
            xs.push_back(x.real());
            ps.push_back(x.imag());
        }
        const Complex mu = mean_gain(n, d) * s.amplitude;
        EXPECT_LT(ks_statistic(xs, mu.real(), std::sqrt(quadrature_variance_x(n, d))), crit);
        EXPECT_LT(ks_statistic(ps, mu.imag(), std::sqrt(quadrature_variance_p(n, d))), crit);
    }
}

TEST(TransmitSymbol, ReproduciblePerSeed) {
    SeededRandomSource a(5), b(5);
    for (int i = 0; i < 100; ++i) {
        const CoherentSymbol s{{0.64, 0}, 0};
        EXPECT_EQ(transmit_symbol(s, {0.8, 0.02}, {}, a), transmit_symbol(s, {0.8, 0.02}, {}, b));
    }
}

TEST(EveBeamsplitter, Limits) {
    const Alphabet alph = Alphabet::qpsk(0.64);
    const EveConditionalStates lossless = eve_states_beamsplitter(alph, 1.0);
    for (auto a : lossless.pure_amplitudes) EXPECT_EQ(std::abs(a), 0.0);
    const EveConditionalStates full = eve_states_beamsplitter(alph, 0.0);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(full.pure_amplitudes[k] - alph.amplitudes[k]), 0.0, 1e-15);
    const EveConditionalStates mid = eve_states_beamsplitter(alph, 0.86);
    EXPECT_NEAR(std::abs(mid.pure_amplitudes[1]), 0.23946607275353225, 1e-14);
    for (double w : mid.priors) EXPECT_DOUBLE_EQ(w, 0.25);
}

TEST(Holevo, IdenticalAndOrthogonalLimits) {
    Alphabet same;
    same.amplitudes = {Complex(0.4), Complex(0.4), Complex(0.4), Complex(0.4)};
    same.weights = {0.25, 0.25, 0.25, 0.25};
    EXPECT_NEAR(holevo_information(eve_states_beamsplitter(same, 0.5)), 0.0, 1e-12);
    EXPECT_NEAR(holevo_information(eve_states_beamsplitter(Alphabet::qpsk(15.0), 0.0)), 2.0, 1e-9);
}

TEST(Holevo, BeamsplitterGramMatchesFock) {
    const EveConditionalStates s = eve_states_beamsplitter(Alphabet::qpsk(0.64), 0.86);
    EXPECT_NEAR(holevo_information(s), holevo_information_fock(s, 40), 1e-6);
}

TEST(Holevo, NonIncreasingInTransmittanceProperty) {
    const Alphabet alph = Alphabet::qpsk(0.64);
    double prev = 3.0;
    for (int i = 0; i <= 10; ++i) {
        const double chi = holevo_information(eve_states_beamsplitter(alph, i / 10.0));
        EXPECT_LE(chi, prev + 1e-12);
        prev = chi;
    }
    EXPECT_NEAR(prev, 0.0, 1e-12);
}

TEST(EveCloner, ReducesToBeamsplitterAtZeroNoise) {
    const Alphabet alph = Alphabet::qpsk(0.64);
    const double bs = holevo_information(eve_states_beamsplitter(alph, 0.86));
    EXPECT_NEAR(holevo_information(eve_states_cloner(alph, 0.86, 0.0)), bs, 1e-6);
    EXPECT_NEAR(holevo_information(eve_states_cloner(alph, 0.86, 1e-9)), bs, 1e-6);
}

TEST(EveCloner, ExceedsBeamsplitterWithExcessNoise) {
    const Alphabet alph = Alphabet::qpsk(0.64);
    const double bs = holevo_information(eve_states_beamsplitter(alph, 0.86));
    const EveConditionalStates cl = eve_states_cloner(alph, 0.86, 0.027);
    EXPECT_FALSE(cl.is_pure());
    EXPECT_GT(holevo_information(cl), bs + 1e-3);
    EXPECT_LT(cl.truncation_deficit, 1e-9);
}

TEST(EveCloner, MonotoneInExcessNoiseProperty) {
    const Alphabet alph = Alphabet::qpsk(0.64);
    double prev = holevo_information(eve_states_beamsplitter(alph, 0.7));
    for (double xi : {0.01, 0.03, 0.06, 0.1}) {
        const double chi = holevo_information(eve_states_cloner(alph, 0.7, xi));
        EXPECT_GE(chi, prev - 1e-9);
        prev = chi;
    }
}

TEST(EveCloner, LosslessLimitAndDomain) {
    const Alphabet alph = Alphabet::qpsk(0.64);
    EXPECT_NEAR(holevo_information(eve_states_cloner(alph, 1.0, 0.0)), 0.0, 1e-12);
    EXPECT_NEAR(holevo_information(eve_states_cloner(alph, 0.999, 0.0)),
                holevo_information(eve_states_beamsplitter(alph, 0.999)), 1e-8);
    EXPECT_THROW(eve_states_cloner(alph, 1.0, 0.02), DomainError);
    EXPECT_NEAR(cloner_variance(0.5, 0.02), 1.02, 1e-15);
}
