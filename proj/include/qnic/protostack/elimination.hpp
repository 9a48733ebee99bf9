#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "qnic/core/heterodyne.hpp"
#include "qnic/core/random.hpp"
#include "qnic/secanalysis/region.hpp"

namespace qnic {

using EliminatedPair = std::pair<int, int>;

/// The two alphabet indices with the smallest heterodyne likelihood given x;
/// ties go to the smaller index. Returned in ascending order.
inline EliminatedPair eliminate_two(ComplexSample x, const Alphabet& alph, const NoiseModel& noise,
                                    const DetectorParams& det = {}) {
    require_finite(x);
    if (alph.size() < 3) throw DomainError("eliminate_two: alphabet needs at least 3 symbols");
    const double g = mean_gain(noise, det);
    const double vx = quadrature_variance_x(noise, det), vp = quadrature_variance_p(noise, det);
    std::vector<std::pair<double, int>> ll;
    for (std::size_t k = 0; k < alph.size(); ++k) {
        const Complex mu = g * alph.amplitudes[k];
        const double dx = x.real() - mu.real(), dp = x.imag() - mu.imag();
        ll.push_back({-dx * dx / (2 * vx) - dp * dp / (2 * vp), static_cast<int>(k)});
    }
    std::stable_sort(ll.begin(), ll.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return std::minmax(ll[0].second, ll[1].second);
}

inline bool pair_contains(const EliminatedPair& p, int k) { return p.first == k || p.second == k; }

/// Adjacent pair eliminated by an outcome in quadrant q.
inline EliminatedPair quadrant_pair(int q) { return std::minmax((q + 2) % 4, (q + 3) % 4); }

struct PostselectionMask {
    std::vector<std::uint8_t> accepted;
    double acceptance_fraction = 1.0;
};

inline PostselectionMask postselect_mask(const std::vector<ComplexSample>& xs, const PostselectionRegion& reg) {
    reg.validate();
    PostselectionMask m;
    m.accepted.reserve(xs.size());
    std::size_t n = 0;
    for (auto x : xs) {
        const bool a = region_accepts(x, reg);
        m.accepted.push_back(a ? 1 : 0);
        n += a ? 1 : 0;
    }
    m.acceptance_fraction = xs.empty() ? 1.0 : static_cast<double>(n) / static_cast<double>(xs.size());
    return m;
}

/// Partition of one leg's positions after the swap: the kept half and the half handed to the other recipient.
struct SignatureHalves {
    std::vector<std::size_t> own_half;
    std::vector<std::size_t> received_half;
};

inline SignatureHalves swap_partition(std::size_t L, SeededRandomSource& rng) {
    if (L % 2 != 0) throw DomainError("swap_partition: L must be even");
    std::vector<std::size_t> perm(L);
    for (std::size_t i = 0; i < L; ++i) perm[i] = i;
    rng.shuffle(perm.begin(), perm.end());
    SignatureHalves h;
    h.received_half.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(L / 2));
    h.own_half.assign(perm.begin() + static_cast<std::ptrdiff_t>(L / 2), perm.end());
    std::sort(h.own_half.begin(), h.own_half.end());
    std::sort(h.received_half.begin(), h.received_half.end());
    return h;
}

} // namespace qnic
