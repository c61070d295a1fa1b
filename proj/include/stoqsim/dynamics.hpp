// Time-dependent Schrodinger integration for Hamiltonian paths (midpoint
// exponential stepping with exact small-dimension or Lanczos-Krylov
// exponentials), fidelity, seeded measurement, and the adiabatic-schedule
// time heuristic.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "operators.hpp"
#include "paths.hpp"
#include "spectral.hpp"

namespace stoqsim {

using Complex = std::complex<double>;
using VectorXcd = Eigen::VectorXcd;

struct EvolutionSpec {
    HamiltonianPath path;
    double T = 1.0;   // total-time multiplier: i d/dt psi = T H(t) psi
    int steps = 100;
    VectorXcd initial;

    void validate() const {
        if (steps < 10) throw std::invalid_argument("steps must be >= 10");
        if (std::abs(initial.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("initial state must be unit norm");
    }
};

namespace detail {

// psi <- exp(-i tau H) psi via dense eigendecomposition (small dimensions).
inline void expm_dense(const Eigen::MatrixXd& H, double tau, VectorXcd& psi) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const VectorXcd w = es.eigenvectors().transpose() * psi;
    VectorXcd scaled(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k)
        scaled[k] = std::polar(1.0, -tau * es.eigenvalues()[k]) * w[k];
    psi = es.eigenvectors() * scaled;
}

// Lanczos-Krylov approximation of exp(-i tau H) psi to relative tolerance
// tol; splits the step recursively if the Krylov space saturates.
inline void expm_krylov(const SparseSymmetricOperator& H, double tau, VectorXcd& psi,
                        double tol, int depth = 0) {
    constexpr int kMaxDim = 64;
    if (depth > 30) throw std::runtime_error("krylov exponential failed to converge");
    const double beta0 = psi.norm();
    if (beta0 == 0.0) return;

    std::vector<VectorXcd> V;
    V.push_back(psi / beta0);
    std::vector<double> alpha, beta;
    Eigen::VectorXd re(H.dim()), imr(H.dim());
    auto apply_H = [&](const VectorXcd& v, VectorXcd& out) {
        Eigen::VectorXd tmp;
        H.apply(v.real(), tmp);
        out = tmp.cast<Complex>();
        H.apply(v.imag(), tmp);
        out += Complex(0, 1) * tmp.cast<Complex>();
    };

    for (int m = 1; m <= kMaxDim; ++m) {
        VectorXcd wv;
        apply_H(V.back(), wv);
        const double a = std::real(V.back().dot(wv));
        alpha.push_back(a);
        wv -= a * V.back();
        if (V.size() >= 2) wv -= beta.back() * V[V.size() - 2];
        // Full re-orthogonalization for stability at tight tolerances.
        for (const auto& v : V) wv -= v.dot(wv) * v;
        const double b = wv.norm();

        // Evaluate exp(-i tau T_m) e1 on the current tridiagonal.
        Eigen::VectorXd ad = Eigen::Map<Eigen::VectorXd>(alpha.data(), alpha.size());
        Eigen::VectorXd bd(std::max<int>(m - 1, 0));
        for (int i = 0; i + 1 < m; ++i) bd[i] = beta[i];
        const EigenSolution tri = tridiag_full(ad, bd);
        VectorXcd small(m);
        for (int i = 0; i < m; ++i) {
            Complex acc = 0.0;
            for (int k = 0; k < m; ++k)
                acc += tri.vectors(i, k) * std::polar(1.0, -tau * tri.values[k]) *
                       tri.vectors(0, k);
            small[i] = acc;
        }
        const double err = (m >= 2) ? std::abs(tau) * b * std::abs(small[m - 1]) : b;
        if (err <= tol || b < 1e-14) {
            VectorXcd out = VectorXcd::Zero(psi.size());
            for (int i = 0; i < m; ++i) out += small[i] * V[i];
            psi = beta0 * out;
            return;
        }
        beta.push_back(b);
        V.push_back(wv / b);
    }
    // Krylov space saturated: halve the step.
    expm_krylov(H, tau / 2, psi, tol / 2, depth + 1);
    expm_krylov(H, tau / 2, psi, tol / 2, depth + 1);
}

}  // namespace detail

struct EvolutionObserver {
    int stride = 0;  // 0 disables
    std::function<void(int step, double t, const VectorXcd& psi)> callback;
};

// Midpoint-exponential stepping of i d/dt psi = T H(t) psi over the path
// domain. Aborts when the norm drifts beyond 1e-6.
inline VectorXcd evolve(const EvolutionSpec& spec, const EvolutionObserver& obs = {}) {
    spec.validate();
    const double t0 = spec.path.t_min(), t1 = spec.path.t_max();
    const double dt = (t1 - t0) / spec.steps;
    VectorXcd psi = spec.initial;
    {
        const SparseSymmetricOperator probe = eval_path(spec.path, t0);
        if (probe.dim() != psi.size()) throw std::invalid_argument("state dimension mismatch");
    }
    for (int k = 0; k < spec.steps; ++k) {
        const double tm = t0 + (k + 0.5) * dt;
        const SparseSymmetricOperator H = eval_path(spec.path, tm);
        const double tau = spec.T * dt;
        if (H.dim() <= 64) {
            detail::expm_dense(H.to_dense(), tau, psi);
        } else {
            detail::expm_krylov(H, tau, psi, 1e-10);
        }
        if (std::abs(psi.norm() - 1.0) > 1e-6)
            throw std::runtime_error("norm drift exceeded 1e-6: step count too low");
        if (obs.stride > 0 && obs.callback && ((k + 1) % obs.stride == 0))
            obs.callback(k + 1, t0 + (k + 1) * dt, psi);
    }
    return psi;
}

inline double fidelity(const VectorXcd& psi, const VectorXcd& target) {
    if (psi.size() != target.size()) throw std::invalid_argument("dimension mismatch");
    return std::norm(target.dot(psi));
}

// i.i.d. basis-index samples from |psi_k|^2, deterministic in the seed.
inline std::vector<std::int64_t> measure(const VectorXcd& psi, int shots, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    std::vector<double> cdf(psi.size());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < psi.size(); ++k) {
        acc += std::norm(psi[k]);
        cdf[k] = acc;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, acc);
    std::vector<std::int64_t> hist(psi.size(), 0);
    for (int s = 0; s < shots; ++s) {
        const double u = uni(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        hist[std::min<std::ptrdiff_t>(it - cdf.begin(), psi.size() - 1)]++;
    }
    return hist;
}

// Adiabatic-schedule heuristic T = C M^2 / (delta^3 eps), C = 10.
inline double required_time(double M, double delta, double eps) {
    if (!(M > 0 && delta > 0 && eps > 0)) throw std::invalid_argument("all inputs positive");
    return 10.0 * M * M / (delta * delta * delta * eps);
}

}  // namespace stoqsim
