// Eigensolvers and spectral verification: dense solves up to dimension 4096,
// a preconditioned LOBPCG block solver above that, LAPACK tridiagonal solves,
// gap scans, the simulation-certificate checker, and subspace distances.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "operators.hpp"
#include "paths.hpp"

namespace stoqsim {

struct EigenSolution {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns matching values
};

// Generic symmetric linear operator for the iterative solver.
struct LinearOperatorRef {
    Index dim = 0;
    // Y = A X, applied column-blockwise.
    std::function<void(const Eigen::MatrixXd&, Eigen::MatrixXd&)> apply;
    // Optional preconditioner: R <- approx (A - sigma I)^{-1} R, in place.
    std::function<void(Eigen::MatrixXd&, double)> precondition;
    double norm_scale = 1.0;  // scale used for relative residual tolerances
};

inline LinearOperatorRef as_linear_operator(const SparseSymmetricOperator& H) {
    LinearOperatorRef op;
    op.dim = H.dim();
    op.apply = [&H](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
        Y.setZero(X.rows(), X.cols());
        for (const auto& [ij, v] : H.entries()) {
            const auto [i, j] = ij;
            Y.row(i) += v * X.row(j);
            if (i != j) Y.row(j) += v * X.row(i);
        }
    };
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(H.dim());
    for (const auto& [ij, v] : H.entries())
        if (ij.first == ij.second) diag[ij.first] = v;
    const double scale = validate_structure(H).induced_one_norm;
    op.norm_scale = std::max(scale, 1e-300);
    op.precondition = [diag = std::move(diag), scale](Eigen::MatrixXd& R, double sigma) {
        const double floor = std::max(1e-8 * std::max(scale, 1.0), 1e-12);
        for (Index i = 0; i < R.rows(); ++i) {
            double d = diag[i] - sigma;
            if (std::abs(d) < floor) d = (d >= 0 ? floor : -floor);
            R.row(i) /= d;
        }
    };
    return op;
}

namespace detail {

// Rayleigh-Ritz on the (possibly ill-conditioned) subspace S with A S given;
// returns the coefficient matrix of the `want` lowest Ritz vectors.
inline bool rayleigh_ritz(const Eigen::MatrixXd& S, const Eigen::MatrixXd& AS, int want,
                          Eigen::MatrixXd& coeffs, Eigen::VectorXd& theta) {
    const Eigen::MatrixXd G = S.transpose() * S;
    const Eigen::MatrixXd M = S.transpose() * AS;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(G);
    const double gmax = gs.eigenvalues().maxCoeff();
    if (!(gmax > 0)) return false;
    std::vector<int> keep;
    for (int i = 0; i < gs.eigenvalues().size(); ++i)
        if (gs.eigenvalues()[i] > 1e-12 * gmax) keep.push_back(i);
    if (static_cast<int>(keep.size()) < want) return false;
    Eigen::MatrixXd B(S.cols(), keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c)
        B.col(c) = gs.eigenvectors().col(keep[c]) / std::sqrt(gs.eigenvalues()[keep[c]]);
    const Eigen::MatrixXd Mt = B.transpose() * (0.5 * (M + M.transpose())) * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ms(Mt);
    coeffs = B * ms.eigenvectors().leftCols(want);
    theta = ms.eigenvalues().head(want);
    return true;
}

}  // namespace detail

namespace detail {

// Orthonormalizes the columns of V (rank-revealing; drops near-dependent
// columns) and applies the same column transform to AV.
inline void orthonormalize_pair(Eigen::MatrixXd& V, Eigen::MatrixXd& AV) {
    if (V.cols() == 0) return;
    const Eigen::MatrixXd G = V.transpose() * V;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(G);
    const double gmax = gs.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < gs.eigenvalues().size(); ++i)
        if (gs.eigenvalues()[i] > 1e-14 * std::max(gmax, 1e-300)) keep.push_back(i);
    Eigen::MatrixXd B(V.cols(), keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c)
        B.col(c) = gs.eigenvectors().col(keep[c]) / std::sqrt(gs.eigenvalues()[keep[c]]);
    V = V * B;
    AV = AV * B;
}

inline void orthonormalize(Eigen::MatrixXd& V) {
    Eigen::MatrixXd ignored = Eigen::MatrixXd::Zero(V.rows(), V.cols());
    orthonormalize_pair(V, ignored);
}

}  // namespace detail

// Locally optimal block preconditioned conjugate gradient for the k lowest
// eigenpairs, in the basis-orthonormalized ("ortho") variant: the residual
// and conjugate blocks are kept orthonormal against the Ritz block so the
// trial subspace stays well conditioned down to tight tolerances. Residual
// tolerance is relative to op.norm_scale; throws when the matvec budget
// (50 * dim, at least 20000) is exhausted before convergence.
inline EigenSolution lobpcg_lowest(const LinearOperatorRef& op, int k,
                                   double tol_rel = 1e-10,
                                   std::uint64_t seed = 12345) {
    const Index n = op.dim;
    const int b = static_cast<int>(std::min<Index>(k + 2, n));  // guard vectors
    const double tol_abs = tol_rel * op.norm_scale;
    const long long budget = std::max(50LL * n, 20000LL);
    long long used = 0;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd X(n, b);
    for (Index i = 0; i < n; ++i)
        for (int j = 0; j < b; ++j) X(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    X = qr.householderQ() * Eigen::MatrixXd::Identity(n, b);

    Eigen::MatrixXd AX(n, b), P, AP;
    op.apply(X, AX);
    used += b;

    for (;;) {
        // Rotate X to A-diagonal form (X is orthonormal by construction).
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                0.5 * (X.transpose() * AX + AX.transpose() * X));
            X = X * es.eigenvectors();
            AX = AX * es.eigenvectors();
        }
        Eigen::VectorXd theta(b);
        for (int j = 0; j < b; ++j) theta[j] = X.col(j).dot(AX.col(j));
        Eigen::MatrixXd R = AX - X * theta.asDiagonal();
        bool done = true;
        for (int j = 0; j < k; ++j)
            if (R.col(j).norm() > tol_abs) done = false;
        if (done || n <= b) {
            EigenSolution sol;
            sol.values = theta.head(std::min(k, b));
            sol.vectors = X.leftCols(std::min(k, b));
            return sol;
        }
        if (used + 2 * b > budget)
            throw std::runtime_error("lobpcg: matvec budget exhausted without convergence");

        Eigen::MatrixXd W = R;
        if (op.precondition) op.precondition(W, theta[0]);
        // Two-pass block Gram-Schmidt against X (and P), then internal QR.
        for (int pass = 0; pass < 2; ++pass) {
            W -= X * (X.transpose() * W);
            if (P.cols() > 0) W -= P * (P.transpose() * W);
        }
        detail::orthonormalize(W);
        if (W.cols() == 0) {  // preconditioned residuals collapsed; restart P
            P.resize(n, 0);
            AP.resize(n, 0);
            continue;
        }
        Eigen::MatrixXd AW(n, W.cols());
        op.apply(W, AW);
        used += W.cols();

        Eigen::MatrixXd S(n, b + W.cols() + P.cols());
        Eigen::MatrixXd AS(n, S.cols());
        S.leftCols(b) = X;
        AS.leftCols(b) = AX;
        S.middleCols(b, W.cols()) = W;
        AS.middleCols(b, W.cols()) = AW;
        if (P.cols() > 0) {
            S.rightCols(P.cols()) = P;
            AS.rightCols(P.cols()) = AP;
        }

        Eigen::MatrixXd C;
        Eigen::VectorXd th;
        if (!detail::rayleigh_ritz(S, AS, b, C, th)) {
            P.resize(n, 0);
            AP.resize(n, 0);
            continue;
        }
        Eigen::MatrixXd Xn = S * C;
        Eigen::MatrixXd AXn = AS * C;
        // New conjugate directions: the W/P part of the update, kept
        // orthonormal against the new Ritz block.
        Eigen::MatrixXd Cwp = C;
        Cwp.topRows(b).setZero();
        P = S * Cwp;
        AP = AS * Cwp;
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::MatrixXd proj = Xn.transpose() * P;
            P -= Xn * proj;
            AP -= AXn * proj;
        }
        detail::orthonormalize_pair(P, AP);
        X = std::move(Xn);
        AX = std::move(AXn);
    }
}

// The k smallest eigenpairs: dense below/at dimension 4096, LOBPCG above.
inline EigenSolution lowest_eigenpairs(const SparseSymmetricOperator& H, int k) {
    if (k < 1 || k > H.dim()) throw std::invalid_argument("k out of range");
    if (H.dim() <= 4096) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.to_dense());
        EigenSolution sol;
        sol.values = es.eigenvalues().head(k);
        sol.vectors = es.eigenvectors().leftCols(k);
        return sol;
    }
    return lobpcg_lowest(as_linear_operator(H), k);
}

// k lowest eigenpairs of a symmetric tridiagonal matrix via LAPACK dstevr.
inline EigenSolution tridiag_lowest(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                    int k) {
    const int n = static_cast<int>(diag.size());
    if (off.size() != n - 1) throw std::invalid_argument("off-diagonal size mismatch");
    if (k < 1 || k > n) throw std::invalid_argument("k out of range");
    std::vector<double> d(diag.data(), diag.data() + n);
    std::vector<double> e(n > 1 ? off.data() : nullptr, n > 1 ? off.data() + (n - 1) : nullptr);
    e.resize(std::max(n - 1, 1));
    std::vector<double> w(n), z(static_cast<std::size_t>(n) * k);
    std::vector<lapack_int> isuppz(2 * std::max(k, 1));
    lapack_int m = 0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(),
                                           0.0, 0.0, 1, k, 0.0, &m, w.data(), z.data(), n,
                                           isuppz.data());
    if (info != 0 || m < k) throw std::runtime_error("dstevr failed");
    EigenSolution sol;
    sol.values = Eigen::Map<Eigen::VectorXd>(w.data(), k);
    sol.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), n, k);
    return sol;
}

// Full eigendecomposition of a symmetric tridiagonal matrix (dstev).
inline EigenSolution tridiag_full(const Eigen::VectorXd& diag, const Eigen::VectorXd& off) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> d(diag.data(), diag.data() + n);
    std::vector<double> e(n > 1 ? off.data() : nullptr, n > 1 ? off.data() + (n - 1) : nullptr);
    e.resize(std::max(n - 1, 1));
    std::vector<double> z(static_cast<std::size_t>(n) * n);
    const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, d.data(), e.data(), z.data(), n);
    if (info != 0) throw std::runtime_error("dstev failed");
    EigenSolution sol;
    sol.values = Eigen::Map<Eigen::VectorXd>(d.data(), n);
    sol.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), n, n);
    return sol;
}

struct GapScanEntry {
    double t;
    double mu0;
    double gap;
};

struct GapScanResult {
    std::vector<GapScanEntry> entries;
    double min_gap = 0.0;
    double argmin_t = 0.0;
};

inline GapScanResult gap_scan(const HamiltonianPath& path, int samples) {
    if (samples < 2) throw std::invalid_argument("samples must be >= 2");
    GapScanResult res;
    res.min_gap = std::numeric_limits<double>::infinity();
    const double t0 = path.t_min(), t1 = path.t_max();
    for (int i = 0; i < samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (samples - 1);
        EigenSolution es;
        try {
            es = lowest_eigenpairs(eval_path(path, t), 2);
        } catch (const std::exception& e) {
            throw std::runtime_error("gap_scan solver failure at t=" + std::to_string(t) + ": " +
                                     e.what());
        }
        const double gap = es.values[1] - es.values[0];
        res.entries.push_back({t, es.values[0], gap});
        if (gap < res.min_gap) {
            res.min_gap = gap;
            res.argmin_t = t;
        }
    }
    return res;
}

inline GapScanResult gap_scan(const PiecewiseLinearPath& p, int samples) {
    return gap_scan(HamiltonianPath::from_piecewise(p), samples);
}

// Spectral norm of a (small or thin) matrix via the Gram matrix.
inline double spectral_norm(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return 0.0;
    const Eigen::MatrixXd G =
        A.rows() >= A.cols() ? Eigen::MatrixXd(A.transpose() * A) : Eigen::MatrixXd(A * A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

struct SimulationCertificate {
    double eps_enc_measured = 0.0;  // ||E - Etilde||
    double eps_measured = 0.0;      // ||H - Etilde^T H_sim Etilde||
    double gap_target = 0.0;
    double gap_sim = 0.0;
    bool passed = false;
    bool gap_ok = false;  // gap_sim >= gap_target - 2 * eps_measured
    double eps_enc_requested = 0.0;
    double eps_requested = 0.0;
};

// Checks that (H_sim, E) simulates H with error (eps_enc, eps): aligns E onto
// the N lowest eigenvectors of H_sim by orthogonal Procrustes and reports the
// encoding and low-block residuals plus the gap comparison. Refuses when the
// N/(N+1) eigenvalue split of H_sim is degenerate (relative tolerance 1e-8).
inline SimulationCertificate verify_simulation(const SparseSymmetricOperator& H,
                                               const SparseSymmetricOperator& H_sim,
                                               const Eigen::MatrixXd& E, double eps_enc,
                                               double eps,
                                               const std::optional<EigenSolution>& precomputed = {}) {
    const Index N = H.dim();
    if (E.cols() != N || E.rows() != H_sim.dim())
        throw std::invalid_argument("encoding isometry has wrong shape");
    const Eigen::MatrixXd gram = E.transpose() * E - Eigen::MatrixXd::Identity(N, N);
    if (spectral_norm(gram) > 1e-10) throw std::invalid_argument("E is not an isometry");

    const int k = static_cast<int>(std::min<Index>(N + 1, H_sim.dim()));
    const EigenSolution es = precomputed ? *precomputed : lowest_eigenpairs(H_sim, k);
    const double hsim_scale = validate_structure(H_sim).induced_one_norm;
    if (k == N + 1 && es.values[N] - es.values[N - 1] <= 1e-8 * std::max(hsim_scale, 1.0))
        throw std::runtime_error("low-energy subspace ill-defined: N/(N+1) eigenvalues degenerate");

    const Eigen::MatrixXd V = es.vectors.leftCols(N);
    // Etilde = V * polar(V^T E): the ||E - Etilde||-minimizing isometry with image L_N.
    const Eigen::MatrixXd VtE = V.transpose() * E;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(VtE, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
    const Eigen::MatrixXd Etilde = V * polar;

    SimulationCertificate cert;
    cert.eps_enc_requested = eps_enc;
    cert.eps_requested = eps;
    cert.eps_enc_measured = spectral_norm(E - Etilde);
    const Eigen::MatrixXd low =
        polar.transpose() * es.values.head(N).asDiagonal().toDenseMatrix() * polar;
    cert.eps_measured = spectral_norm(H.to_dense() - low);

    if (N >= 2) {
        const EigenSolution ht = lowest_eigenpairs(H, 2);
        cert.gap_target = ht.values[1] - ht.values[0];
    }
    cert.gap_sim = es.values[1] - es.values[0];
    cert.gap_ok = cert.gap_sim >= cert.gap_target - 2.0 * cert.eps_measured;
    cert.passed = cert.eps_enc_measured <= eps_enc && cert.eps_measured <= eps;
    return cert;
}

// V^T H_sim V on the N lowest eigenvectors: a basis-dependent representative
// of the block-diagonalized low block (compare spectra, not entries).
inline Eigen::MatrixXd effective_low_block(const SparseSymmetricOperator& H_sim, int N) {
    const int k = static_cast<int>(std::min<Index>(N + 1, H_sim.dim()));
    const EigenSolution es = lowest_eigenpairs(H_sim, k);
    const double scale = validate_structure(H_sim).induced_one_norm;
    if (k == N + 1 && es.values[N] - es.values[N - 1] <= 1e-8 * std::max(scale, 1.0))
        throw std::runtime_error("effective_low_block: degenerate split");
    const Eigen::MatrixXd V = es.vectors.leftCols(N);
    return V.transpose() * (H_sim.to_dense() * V);
}

// Min-over-unitary Frobenius distance between equal-dimension subspaces,
// computed from principal angles: sqrt(2d - 2 * sum of singular values).
inline double subspace_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.cols() != B.cols()) throw std::invalid_argument("column count mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.transpose() * B);
    const double d = static_cast<double>(A.cols());
    const double s = svd.singularValues().sum();
    return std::sqrt(std::max(0.0, 2.0 * d - 2.0 * s));
}

}  // namespace stoqsim
