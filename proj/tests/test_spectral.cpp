#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stoqsim/clock.hpp"
#include "stoqsim/reductions.hpp"
#include "stoqsim/spectral.hpp"

using namespace stoqsim;

namespace {

SparseSymmetricOperator pauli_x(int n, int q, double c) {
    PauliTermList p;
    p.num_qubits = n;
    p.terms.push_back({c, {{q, PauliAxis::X}}});
    return build_from_pauli(p);
}

SparseSymmetricOperator pauli_z(int n, int q, double c) {
    PauliTermList p;
    p.num_qubits = n;
    p.terms.push_back({c, {{q, PauliAxis::Z}}});
    return build_from_pauli(p);
}

}  // namespace

TEST_CASE("lowest_eigenpairs on small operators") {
    SECTION("-X has values (-1, +1)") {
        const auto es = lowest_eigenpairs(pauli_x(1, 0, -1.0), 2);
        REQUIRE(es.values[0] == Catch::Approx(-1.0).margin(1e-12));
        REQUIRE(es.values[1] == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("lambda X + (1 - lambda) Z at lambda = 1/2 has gap sqrt(2)") {
        const auto H = 0.5 * pauli_x(1, 0, 1.0) + 0.5 * pauli_z(1, 0, 1.0);
        const auto es = lowest_eigenpairs(H, 2);
        REQUIRE(es.values[1] - es.values[0] ==
                Catch::Approx(std::numbers::sqrt2).margin(1e-12));
    }
    SECTION("eigenvectors satisfy the residual bound") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        SparseSymmetricOperator H(3);
        for (Index i = 0; i < 8; ++i)
            for (Index j = i; j < 8; ++j) H.set(i, j, u(rng));
        const auto es = lowest_eigenpairs(H, 3);
        for (int k = 0; k < 3; ++k) {
            Eigen::VectorXd r;
            H.apply(es.vectors.col(k), r);
            REQUIRE((r - es.values[k] * es.vectors.col(k)).norm() < 1e-10);
        }
    }
}

TEST_CASE("lobpcg matches the dense solver above the crossover shape") {
    // 2^8-dim stoquastic operator solved both ways.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    SparseSymmetricOperator H(8);
    for (Index i = 0; i < 256; ++i) {
        H.set(i, i, u(rng));
        for (int b = 0; b < 8; ++b) {
            const Index j = i ^ (Index{1} << b);
            if (i < j) H.set(i, j, -u(rng));
        }
    }
    const auto dense = lowest_eigenpairs(H, 3);
    const auto iter = lobpcg_lowest(as_linear_operator(H), 3);
    for (int k = 0; k < 3; ++k)
        REQUIRE(iter.values[k] == Catch::Approx(dense.values[k]).margin(1e-7));
}

TEST_CASE("tridiagonal solvers agree with the dense path") {
    Eigen::VectorXd d(5), e(4);
    d << 1, -2, 0.5, 3, -1;
    e << -1, -0.5, -2, -0.25;
    const auto full = tridiag_full(d, e);
    const auto low = tridiag_lowest(d, e, 2);
    TridiagonalMatrix T{d, e};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.to_dense());
    for (int k = 0; k < 5; ++k)
        REQUIRE(full.values[k] == Catch::Approx(es.eigenvalues()[k]).margin(1e-12));
    REQUIRE(low.values[0] == Catch::Approx(es.eigenvalues()[0]).margin(1e-12));
    REQUIRE(low.values[1] == Catch::Approx(es.eigenvalues()[1]).margin(1e-12));
}

TEST_CASE("gap_scan on (1-t)(-X) + t(-Z)") {
    PiecewiseLinearPath p;
    p.breakpoints.emplace_back(0.0, pauli_x(1, 0, -1.0));
    p.breakpoints.emplace_back(1.0, pauli_z(1, 0, -1.0));
    const auto res = gap_scan(p, 101);
    REQUIRE(res.entries.size() == 101);
    REQUIRE(res.min_gap == Catch::Approx(std::numbers::sqrt2).margin(1e-9));
    REQUIRE(res.argmin_t == Catch::Approx(0.5).margin(1e-12));

    SECTION("constant path has a constant gap") {
        PiecewiseLinearPath c;
        c.breakpoints.emplace_back(0.0, pauli_x(1, 0, -1.0));
        c.breakpoints.emplace_back(1.0, pauli_x(1, 0, -1.0));
        const auto r = gap_scan(c, 11);
        for (const auto& e2 : r.entries) REQUIRE(e2.gap == Catch::Approx(2.0).margin(1e-12));
    }
}

TEST_CASE("two-qubit X plus ZZ closed-form spectrum") {
    // -d (X (x) I + I (x) X) - c Z (x) Z has eigenvalues
    // {+-c, +-sqrt(c^2 + 4 d^2)}  (Bell-basis diagonalization).
    const double dB = 0.7, c = 0.3;
    PauliTermList p;
    p.num_qubits = 2;
    p.terms.push_back({-dB, {{0, PauliAxis::X}}});
    p.terms.push_back({-dB, {{1, PauliAxis::X}}});
    p.terms.push_back({-c, {{0, PauliAxis::Z}, {1, PauliAxis::Z}}});
    const auto es = lowest_eigenpairs(build_from_pauli(p), 4);
    std::vector<double> expect{-std::sqrt(c * c + 4 * dB * dB), -c, c,
                               std::sqrt(c * c + 4 * dB * dB)};
    for (int k = 0; k < 4; ++k)
        REQUIRE(es.values[k] == Catch::Approx(expect[k]).margin(1e-12));
}

TEST_CASE("verify_simulation on an exact embedding") {
    SparseSymmetricOperator H(1);
    H.set(0, 0, -0.3);
    H.set(0, 1, -0.7);
    H.set(1, 1, 0.1);
    // H_sim = H (+) large positive block.
    SparseSymmetricOperator Hsim(2);
    for (const auto& [ij, v] : H.entries()) Hsim.set(ij.first, ij.second, v);
    Hsim.set(2, 2, 50.0);
    Hsim.set(3, 3, 60.0);
    const auto E = encoding_matrix({0, 1}, 4);
    const auto cert = verify_simulation(H, Hsim, E, 1e-9, 1e-9);
    REQUIRE(cert.passed);
    REQUIRE(cert.eps_measured < 1e-10);
    REQUIRE(cert.eps_enc_measured < 1e-10);
    REQUIRE(cert.gap_ok);
    REQUIRE(cert.gap_sim == Catch::Approx(cert.gap_target).margin(1e-10));

    SECTION("orthogonal encoding yields eps_enc near sqrt(2)") {
        const auto Ebad = encoding_matrix({2, 3}, 4);
        const auto bad = verify_simulation(H, Hsim, Ebad, 0.5, 100.0);
        REQUIRE(bad.eps_enc_measured == Catch::Approx(std::numbers::sqrt2).margin(1e-6));
        REQUIRE_FALSE(bad.passed);
    }
    SECTION("degenerate split is refused") {
        SparseSymmetricOperator deg(2);
        deg.set(0, 0, -1.0);
        deg.set(1, 1, 1.0);
        deg.set(2, 2, 1.0);  // eigenvalues 2 and 3 tie at the N/N+1 boundary
        deg.set(3, 3, 5.0);
        REQUIRE_THROWS_AS(verify_simulation(H, deg, E, 0.5, 0.5), std::runtime_error);
    }
    SECTION("non-isometry is rejected") {
        Eigen::MatrixXd Enon = Eigen::MatrixXd::Zero(4, 2);
        Enon(0, 0) = 1.0;
        Enon(0, 1) = 1.0;
        REQUIRE_THROWS_AS(verify_simulation(H, Hsim, Enon, 0.5, 0.5), std::invalid_argument);
    }
}

TEST_CASE("verify_simulation is monotone in the requested tolerances") {
    SparseSymmetricOperator H(1);
    H.set(0, 1, -0.5);
    SparseSymmetricOperator Hsim(2);
    Hsim.set(0, 1, -0.5);
    Hsim.set(0, 0, 0.01);  // small perturbation
    Hsim.set(2, 2, 30.0);
    Hsim.set(3, 3, 40.0);
    const auto E = encoding_matrix({0, 1}, 4);
    const auto tight = verify_simulation(H, Hsim, E, 0.2, 0.2);
    const auto loose = verify_simulation(H, Hsim, E, 0.5, 0.5);
    if (tight.passed) REQUIRE(loose.passed);
    REQUIRE(tight.eps_measured == loose.eps_measured);
}

TEST_CASE("effective_low_block spectrum equals the low eigenvalues") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SparseSymmetricOperator H(3);
    for (Index i = 0; i < 8; ++i)
        for (Index j = i; j < 8; ++j) H.set(i, j, u(rng));
    const auto block = effective_low_block(H, 3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(block);
    const auto es = lowest_eigenpairs(H, 3);
    for (int k = 0; k < 3; ++k)
        REQUIRE(bs.eigenvalues()[k] == Catch::Approx(es.values[k]).margin(1e-10));
}

TEST_CASE("subspace_distance principal-angle formula") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 1), B = Eigen::MatrixXd::Zero(3, 1);
    A(0, 0) = 1.0;
    SECTION("identical subspaces") {
        REQUIRE(subspace_distance(A, A) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("orthogonal one-dimensional subspaces") {
        B(1, 0) = 1.0;
        REQUIRE(subspace_distance(A, B) == Catch::Approx(std::numbers::sqrt2).margin(1e-12));
    }
}

TEST_CASE("Weyl perturbation bound on random instances") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        SparseSymmetricOperator H(4), B(4);
        for (Index i = 0; i < 16; ++i)
            for (Index j = i; j < 16; ++j) {
                H.set(i, j, u(rng));
                B.set(i, j, 0.1 * u(rng));
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(H.to_dense());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ehb((H + B).to_dense());
        const double bnorm = spectral_norm(B.to_dense());
        for (int k = 0; k < 16; ++k)
            REQUIRE(std::abs(eh.eigenvalues()[k] - ehb.eigenvalues()[k]) <= bnorm + 1e-10);
    }
}

TEST_CASE("Kronecker-sum spectrum is the Minkowski sum of the parts") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd A(4, 4), B(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            A(i, j) = A(j, i) = u(rng);
            B(i, j) = B(j, i) = u(rng);
        }
    const Eigen::MatrixXd I4 = Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd K(16, 16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            K.block(4 * i, 4 * j, 4, 4) = A(i, j) * I4 + (i == j ? B : Eigen::MatrixXd::Zero(4, 4));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A), eb(B), ek(K);
    std::vector<double> mink;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) mink.push_back(ea.eigenvalues()[i] + eb.eigenvalues()[j]);
    std::sort(mink.begin(), mink.end());
    for (int k = 0; k < 16; ++k)
        REQUIRE(ek.eigenvalues()[k] == Catch::Approx(mink[k]).margin(1e-9));
}
