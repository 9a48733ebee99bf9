#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qnic {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic child seed for stream `index` under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x51ed2701f3a5c7b9ULL));
}

/// Seeded source with library-independent distributions (mt19937_64 is fully specified;
/// the std:: distributions are not, so the mappings are done here).
class SeededRandomSource {
public:
    explicit SeededRandomSource(std::uint64_t seed) : seed_(seed), eng_(seed) {}

    std::uint64_t seed() const { return seed_; }

    SeededRandomSource child(std::uint64_t index) const { return SeededRandomSource(derive_seed(seed_, index)); }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do v = eng_();
        while (v >= limit);
        return v % n;
    }

    bool bit() { return (eng_() >> 63) != 0; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do u1 = uniform();
        while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double mean) {
        double u;
        do u = uniform();
        while (u <= 0.0);
        return -mean * std::log(u);
    }

    template <class It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) std::swap(first[i - 1], first[uniform_int(i)]);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qnic
