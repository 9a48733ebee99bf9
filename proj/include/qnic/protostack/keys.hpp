#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "qnic/core/random.hpp"
#include "qnic/core/types.hpp"

namespace qnic {

class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1u; }

    void set(std::size_t i, bool v) {
        const std::uint64_t m = std::uint64_t{1} << (i % 64);
        if (v) w_[i / 64] |= m;
        else w_[i / 64] &= ~m;
    }

    void push_back(bool v) {
        if (n_ % 64 == 0) w_.push_back(0);
        ++n_;
        set(n_ - 1, v);
    }

    const std::vector<std::uint64_t>& words() const { return w_; }

    bool operator==(const BitString& o) const { return n_ == o.n_ && w_ == o.w_; }

    static BitString random(std::size_t n, SeededRandomSource& rng) {
        BitString b(n);
        for (auto& w : b.w_) w = rng.next_u64();
        b.trim();
        return b;
    }

    BitString prefix(std::size_t n) const {
        BitString b(n);
        for (std::size_t i = 0; i < b.w_.size(); ++i) b.w_[i] = w_[i];
        b.trim();
        return b;
    }

    BitString operator^(const BitString& o) const {
        if (o.n_ != n_) throw DomainError("bitstring: length mismatch");
        BitString b(n_);
        for (std::size_t i = 0; i < w_.size(); ++i) b.w_[i] = w_[i] ^ o.w_[i];
        return b;
    }

    /// Fraction of equal bits.
    double agreement(const BitString& o) const {
        if (o.n_ != n_) throw DomainError("bitstring: length mismatch");
        if (n_ == 0) return 1.0;
        std::size_t diff = 0;
        for (std::size_t i = 0; i < w_.size(); ++i) diff += static_cast<std::size_t>(std::popcount(w_[i] ^ o.w_[i]));
        return 1.0 - static_cast<double>(diff) / static_cast<double>(n_);
    }

    std::uint64_t word_at(std::size_t bit) const {
        const std::size_t q = bit / 64, r = bit % 64;
        const std::uint64_t lo = q < w_.size() ? w_[q] : 0;
        if (r == 0) return lo;
        const std::uint64_t hi = q + 1 < w_.size() ? w_[q + 1] : 0;
        return (lo >> r) | (hi << (64 - r));
    }

private:
    void trim() {
        if (n_ % 64 != 0 && !w_.empty()) w_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

/// nbins - 1 interior edges splitting the sample into equally populated bins.
inline std::vector<double> quantile_edges(std::vector<double> v, int nbins) {
    if (nbins < 1 || v.empty()) throw DomainError("quantile_edges: need samples and nbins >= 1");
    std::sort(v.begin(), v.end());
    std::vector<double> e;
    for (int b = 1; b < nbins; ++b) e.push_back(v[v.size() * static_cast<std::size_t>(b) / static_cast<std::size_t>(nbins)]);
    return e;
}

inline int bin_of(double x, const std::vector<double>& edges) {
    return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

struct Discretizer {
    std::vector<double> edges_re, edges_im;
    int bits_per_quadrature = 2;

    static Discretizer fit(const std::vector<ComplexSample>& xs, int bits) {
        std::vector<double> re, im;
        for (auto x : xs) {
            re.push_back(x.real());
            im.push_back(x.imag());
        }
        return {quantile_edges(re, 1 << bits), quantile_edges(im, 1 << bits), bits};
    }

    BitString apply(const std::vector<ComplexSample>& xs) const {
        BitString out;
        for (auto x : xs) {
            const int a = bin_of(x.real(), edges_re), b = bin_of(x.imag(), edges_im);
            for (int i = 0; i < bits_per_quadrature; ++i) out.push_back((a >> i) & 1);
            for (int i = 0; i < bits_per_quadrature; ++i) out.push_back((b >> i) & 1);
        }
        return out;
    }
};

/// Seeded Toeplitz universal hash {0,1}^n -> {0,1}^m.
inline BitString toeplitz_hash(const BitString& in, std::size_t m, std::uint64_t seed) {
    const std::size_t n = in.size();
    SeededRandomSource rng(seed);
    const BitString t = BitString::random(n + m, rng);
    BitString rev(n);
    for (std::size_t j = 0; j < n; ++j) rev.set(j, in.get(n - 1 - j));
    BitString out(m);
    const auto& rw = rev.words();
    for (std::size_t i = 0; i < m; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < rw.size(); ++w) acc ^= t.word_at(i + 64 * w) & rw[w];
        out.set(i, std::popcount(acc) & 1);
    }
    return out;
}

} // namespace qnic
