#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qnic/core/coherent.hpp"
#include "qnic/core/errors.hpp"
#include "qnic/core/special.hpp"

namespace qnic {

constexpr double kTruncationTolerance = 1e-6;

/// Number-basis amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..dim-1.
inline Eigen::VectorXcd fock_coefficients(Complex a, int dim) {
    Eigen::VectorXcd c(dim);
    c(0) = std::exp(-std::norm(a) / 2.0);
    for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * a / std::sqrt(static_cast<double>(n));
    return c;
}

/// Poisson mass of |a|^2 above photon number n_max.
inline double poisson_tail(double mean, int n_max) {
    if (mean <= 0.0) return 0.0;
    // log of the first omitted term, then sum forward until negligible
    double log_term = -mean + (n_max + 1) * std::log(mean) - std::lgamma(n_max + 2.0);
    double term = std::exp(log_term);
    double s = 0.0;
    for (int n = n_max + 1; n < n_max + 10000; ++n) {
        s += term;
        term *= mean / (n + 1.0);
        if (term < 1e-18 * s && n > mean) break;
    }
    return s;
}

/// Smallest n_max whose Poisson tail is below tol.
inline int required_n_max(double mean, double tol = 1e-10) {
    int n = 1;
    while (poisson_tail(mean, n) > tol) ++n;
    return n;
}

class FockDensityMatrix {
public:
    FockDensityMatrix() = default;

    explicit FockDensityMatrix(Eigen::MatrixXcd m, double truncation_deficit = 0.0)
        : m_(std::move(m)), deficit_(truncation_deficit) {
        validate();
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    double truncation_deficit() const { return deficit_; }
    double trace() const { return m_.trace().real(); }

    void validate() const {
        if (m_.rows() != m_.cols() || m_.rows() == 0) throw DomainError("fock: matrix must be square and non-empty");
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw DomainError("fock: matrix not Hermitian");
        if (std::abs(trace() - 1.0) > 1e-8) throw DomainError("fock: trace differs from 1");
    }

private:
    Eigen::MatrixXcd m_;
    double deficit_ = 0.0;
};

/// rho = sum_k w_k |a_k><a_k| truncated at n_max and renormalized.
inline FockDensityMatrix ensemble_to_fock(const StateEnsemble& e, int n_max) {
    if (n_max < 1) throw DomainError("ensemble_to_fock: n_max must be >= 1");
    const int dim = n_max + 1;
    double worst = 0.0;
    for (const auto& x : e.entries()) worst = std::max(worst, poisson_tail(std::norm(x.amplitude), n_max));
    if (worst > kTruncationTolerance) throw TruncationError("ensemble_to_fock: Poisson tail exceeds tolerance at n_max");
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& x : e.entries()) {
        const Eigen::VectorXcd c = fock_coefficients(x.amplitude, dim);
        rho.noalias() += x.weight * c * c.adjoint();
    }
    const double tr = rho.trace().real();
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return FockDensityMatrix(std::move(rho), 1.0 - tr);
}

inline double hermitian_entropy(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    return entropy_from_eigenvalues(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

inline double von_neumann_entropy(const FockDensityMatrix& rho) { return hermitian_entropy(rho.matrix()); }

/// Truncated matrix elements <m|D(a)|n>, exact for every retained (m, n).
inline Eigen::MatrixXcd displacement_matrix(Complex a, int dim) {
    Eigen::MatrixXcd D(dim, dim);
    const double x = std::norm(a);
    const double pref = std::exp(-x / 2.0);
    for (int m = 0; m < dim; ++m) {
        for (int n = 0; n < dim; ++n) {
            const int lo = std::min(m, n), k = std::abs(m - n);
            // generalized Laguerre L_lo^{(k)}(x)
            double l0 = 1.0, l1 = 1.0 + k - x;
            double lag = lo == 0 ? l0 : l1;
            for (int j = 1; j < lo; ++j) {
                const double l2 = ((2.0 * j + 1.0 + k - x) * l1 - (j + k) * l0) / (j + 1.0);
                l0 = l1;
                l1 = l2;
                lag = l2;
            }
            const double ratio = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)));
            const Complex base = m >= n ? a : -std::conj(a);
            Complex pw = 1.0;
            for (int j = 0; j < k; ++j) pw *= base;
            D(m, n) = pref * ratio * pw * lag;
        }
    }
    return D;
}

} // namespace qnic
