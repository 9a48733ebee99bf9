#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qnic/core/errors.hpp"
#include "qnic/core/special.hpp"
#include "qnic/core/types.hpp"

namespace qnic {

/// <a|b> for coherent states.
inline Complex coherent_overlap(Complex a, Complex b) {
    return std::exp(-(std::norm(a) + std::norm(b)) / 2.0 + std::conj(a) * b);
}

struct EnsembleEntry {
    Complex amplitude;
    double weight;
};

class StateEnsemble {
public:
    StateEnsemble() = default;

    explicit StateEnsemble(std::vector<EnsembleEntry> entries) : entries_(std::move(entries)) { validate(); }

    StateEnsemble(const std::vector<Complex>& amps, const std::vector<double>& weights) {
        if (amps.size() != weights.size()) throw DomainError("ensemble: size mismatch");
        for (std::size_t i = 0; i < amps.size(); ++i) entries_.push_back({amps[i], weights[i]});
        validate();
    }

    static StateEnsemble pure(Complex a) { return StateEnsemble({{a, 1.0}}); }

    static StateEnsemble from_alphabet(const Alphabet& alph, double scale = 1.0) {
        std::vector<Complex> amps;
        for (auto a : alph.amplitudes) amps.push_back(a * scale);
        return StateEnsemble(amps, alph.weights);
    }

    const std::vector<EnsembleEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    void validate() const {
        if (entries_.empty()) throw DomainError("ensemble: empty");
        double s = 0.0;
        for (const auto& e : entries_) {
            if (!(e.weight >= 0.0)) throw DomainError("ensemble: negative weight");
            if (!is_finite(e.amplitude)) throw DomainError("ensemble: non-finite amplitude");
            s += e.weight;
        }
        if (std::abs(s - 1.0) > 1e-12) throw DomainError("ensemble: weights do not sum to 1");
    }

    std::vector<EnsembleEntry> entries_;
};

/// Entropy (bits) of sum_k w_k |a_k><a_k| from the spectrum of the weighted Gram matrix.
/// Weights need not be normalized here; callers in hot loops pass posteriors directly.
inline double gram_entropy(const Complex* amps, const double* weights, std::size_t n) {
    if (n == 1) return 0.0;
    Eigen::MatrixXcd G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> sw(n);
    for (std::size_t j = 0; j < n; ++j) sw[j] = std::sqrt(std::max(weights[j], 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = sw[j] * sw[j];
        for (std::size_t k = j + 1; k < n; ++k) {
            const Complex v = sw[j] * sw[k] * coherent_overlap(amps[j], amps[k]);
            G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
            G(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::conj(v);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    return entropy_from_eigenvalues(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

inline double gram_spectrum_entropy(const StateEnsemble& e) {
    if (e.size() > 64) throw DomainError("gram_spectrum_entropy: at most 64 components");
    std::vector<Complex> a;
    std::vector<double> w;
    for (const auto& x : e.entries()) {
        a.push_back(x.amplitude);
        w.push_back(x.weight);
    }
    return gram_entropy(a.data(), w.data(), a.size());
}

} // namespace qnic
