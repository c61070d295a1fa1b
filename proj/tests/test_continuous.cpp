#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stoqsim/continuous.hpp"

using namespace stoqsim;

TEST_CASE("f_dw polynomial values") {
    REQUIRE(f_dw(0.5) == 0.0);
    REQUIRE(f_dw(-0.5) == 0.0);
    REQUIRE(f_dw(0.0) == Catch::Approx(1.0 / 16.0).margin(1e-15));
}

TEST_CASE("discretize_double_well") {
    Grid1D g{128};
    const auto T = discretize_double_well(10.0, g);
    const double h2 = g.h() * g.h();
    REQUIRE(T.off[0] == Catch::Approx(-1.0 / h2).margin(1e-9));
    REQUIRE(T.diag[0] == Catch::Approx(2.0 / h2 + 100.0 * f_dw(g.xi(0))).margin(1e-9));

    SECTION("lambda -> 0 limit approaches the particle in a box") {
        const auto Tsmall = discretize_double_well(1e-8, Grid1D{512});
        const auto es = tridiag_lowest(Tsmall.diag, Tsmall.off, 3);
        for (int k = 1; k <= 3; ++k) {
            const double want = (k * std::numbers::pi / 2.0) * (k * std::numbers::pi / 2.0);
            REQUIRE(es.values[k - 1] == Catch::Approx(want).epsilon(1e-3));
        }
    }
    SECTION("grid guard") { REQUIRE_THROWS_AS(discretize_double_well(1.0, Grid1D{10}), std::invalid_argument); }
}

TEST_CASE("double_well_basis parity, signs, and Lambda") {
    Grid1D g{1024};
    const auto b = double_well_basis(30.0, g);
    REQUIRE(b.mu1 > b.mu0);
    REQUIRE(b.Lambda == Catch::Approx(2.0 / (b.mu1 - b.mu0)).margin(1e-12));

    SECTION("chi0 even, chi1 odd, unit L2 norm") {
        double n0 = 0.0, n1 = 0.0, sym0 = 0.0, sym1 = 0.0;
        for (int k = 0; k < g.m; ++k) {
            n0 += b.chi0[k] * b.chi0[k] * g.h();
            n1 += b.chi1[k] * b.chi1[k] * g.h();
            sym0 += b.chi0[k] * b.chi0[g.m - 1 - k] * g.h();
            sym1 += b.chi1[k] * b.chi1[g.m - 1 - k] * g.h();
        }
        REQUIRE(n0 == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(n1 == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(sym0 >= 1.0 - 1e-8);
        REQUIRE(sym1 <= -(1.0 - 1e-8));
    }
    SECTION("hat0 concentrated on the right well") {
        REQUIRE(restricted_inner(b.hat0, b.hat0, g, 0.0, 1.0) > 0.9);
        REQUIRE(restricted_inner(b.hat1, b.hat1, g, -1.0, 0.0) > 0.9);
    }
    SECTION("reflection symmetry maps hat0 to hat1") {
        Eigen::VectorXd reflected(g.m);
        for (int k = 0; k < g.m; ++k) reflected[k] = b.hat0[g.m - 1 - k];
        REQUIRE((reflected - b.hat1).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("restricted_inner quadrature") {
    Grid1D g{512};
    Eigen::VectorXd u(g.m);
    for (int k = 0; k < g.m; ++k) u[k] = std::sin(std::numbers::pi * (g.xi(k) + 1.0) / 2.0);
    const double nrm = std::sqrt(restricted_inner(u, u, g, -1.0, 1.0));
    u /= nrm;
    REQUIRE(restricted_inner(u, u, g, -1.0, 1.0) == Catch::Approx(1.0).margin(1e-10));
    // Symmetric integrand: the halves match.
    REQUIRE(restricted_inner(u, u, g, -1.0, 0.0) ==
            Catch::Approx(restricted_inner(u, u, g, 0.0, 1.0)).margin(1e-10));
    REQUIRE_THROWS_AS(restricted_inner(u, u, g, 0.5, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(restricted_inner(u, u, g, -2.0, 0.0), std::invalid_argument);
}

TEST_CASE("hat_diag_value orthant ramp") {
    DiagonalOperator D(2);
    D.values = {-0.1, -0.4, -0.7, -0.9};
    SECTION("zero on coordinate hyperplanes") {
        REQUIRE(hat_diag_value(D, {0.0, 0.5}, 0.25) == 0.0);
    }
    SECTION("full orthant value outside the ramp") {
        REQUIRE(hat_diag_value(D, {0.5, -0.5}, 0.25) == -0.4);  // theta = (0, 1)
        REQUIRE(hat_diag_value(D, {-0.3, -0.9}, 0.25) == -0.9);
    }
    SECTION("linear ramp inside width w") {
        REQUIRE(hat_diag_value(D, {0.125, 0.5}, 0.25) == Catch::Approx(-0.05).margin(1e-12));
    }
    SECTION("continuity across an orthant boundary") {
        const double left = hat_diag_value(D, {-1e-9, 0.5}, 0.25);
        const double right = hat_diag_value(D, {1e-9, 0.5}, 0.25);
        REQUIRE(std::abs(left - right) < 1e-7);
    }
    SECTION("Lipschitz bound within an orthant") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.01, 0.99);
        const double lip = D.max_abs() / 0.25;
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> p{u(rng), u(rng)}, q{u(rng), u(rng)};
            const double dv = std::abs(hat_diag_value(D, p, 0.25) - hat_diag_value(D, q, 0.25));
            const double l1 = std::abs(p[0] - q[0]) + std::abs(p[1] - q[1]);
            REQUIRE(dv <= lip * l1 + 1e-12);
        }
    }
    SECTION("global minimum is min(mu0(D), 0)") {
        double best = 0.0;
        for (double x = -0.975; x < 1.0; x += 0.05)
            for (double y = -0.975; y < 1.0; y += 0.05)
                best = std::min(best, hat_diag_value(D, {x, y}, 0.25));
        REQUIRE(best == Catch::Approx(-0.9).margin(1e-9));
    }
}

TEST_CASE("tensor grid operator: Kronecker-sum spectrum at D = 0") {
    std::vector<Grid1D> grids{Grid1D{64}, Grid1D{64}};
    DiagonalOperator D(2);  // zero diagonal
    const auto op = build_hat_hamiltonian({1.0, 1.5}, D, 8.0, grids);
    const auto e0 = tridiag_full(op.axis[0].diag, op.axis[0].off);
    const auto e1 = tridiag_full(op.axis[1].diag, op.axis[1].off);
    std::vector<double> mink;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) mink.push_back(e0.values[i] + e1.values[j]);
    std::sort(mink.begin(), mink.end());
    const auto es = grid_lowest_eigenpairs(op, 4);
    for (int k = 0; k < 4; ++k)
        REQUIRE(es.values[k] == Catch::Approx(mink[k]).margin(1e-6 * std::abs(mink[k]) + 1e-8));
}

TEST_CASE("grid_lowest_eigenpairs single-axis exact path") {
    std::vector<Grid1D> grids{Grid1D{256}};
    DiagonalOperator D(1);
    D.values = {-0.8, -0.2};
    const auto op = build_hat_hamiltonian({1.0}, D, 15.0, grids);
    const auto fast = grid_lowest_eigenpairs(op, 2);
    // Cross-check against a dense solve of the same tridiagonal + diagonal.
    TridiagonalMatrix T = op.axis[0];
    T.diag += op.extra_diag;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(T.to_dense());
    REQUIRE(fast.values[0] == Catch::Approx(dense.eigenvalues()[0]).margin(1e-9));
    REQUIRE(fast.values[1] == Catch::Approx(dense.eigenvalues()[1]).margin(1e-9));
}

TEST_CASE("verify_tosdg on a 1-axis instance") {
    DiagonalOperator D(1);
    D.values = {-0.8, -0.2};
    const auto r = verify_tosdg({1.0}, D, 25.0, {Grid1D{1024}});
    REQUIRE(r.Lambda > 0.0);
    REQUIRE(r.overlap > 0.9);
    REQUIRE(std::abs(r.energy_mismatch) < 0.1);
    REQUIRE(r.gap_hat > 0.0);
    SECTION("overlap deficit shrinks as lambda grows") {
        const auto r2 = verify_tosdg({1.0}, D, 32.0, {Grid1D{1024}});
        REQUIRE(1.0 - r2.overlap <= 1.0 - r.overlap + 1e-9);
    }
}

TEST_CASE("QHD schedule") {
    DiagonalOperator hp(1);
    hp.values = {-1.0, -0.3};
    ScheduleParams p;
    p.lambda0 = 15.0;
    p.w = 0.25;
    p.a = {1.0};
    p.D_TFI = hp;
    const QhdPath path(hp, p, {Grid1D{256}}, 25.0);

    SECTION("schedule origin") {
        const auto s = path.point_at_lambda(15.0);
        REQUIRE(s.nu == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(s.phi == Catch::Approx(0.0).margin(1e-9));
    }
    SECTION("nu decreases and phi increases in lambda") {
        const auto s1 = path.point_at_lambda(18.0);
        const auto s2 = path.point_at_lambda(24.0);
        REQUIRE(s2.nu < s1.nu);
        REQUIRE(s2.phi > s1.phi);
    }
    SECTION("t -> lambda inversion round trips") {
        const auto s = path.point_at_lambda(20.0);
        const auto back = path.point_at_t(s.t);
        REQUIRE(back.lambda == Catch::Approx(20.0).margin(1e-6));
    }
    SECTION("objective at the well corners matches H_prob entries") {
        const Eigen::VectorXd f = path.objective_diag();
        const Grid1D g{256};
        // Nearest grid point to xi = +1/2 (orthant theta = 0) and -1/2 (theta = 1).
        int kp = 0, kn = 0;
        for (int k = 0; k < g.m; ++k) {
            if (std::abs(g.xi(k) - 0.5) < std::abs(g.xi(kp) - 0.5)) kp = k;
            if (std::abs(g.xi(k) + 0.5) < std::abs(g.xi(kn) + 0.5)) kn = k;
        }
        REQUIRE(f[kp] == Catch::Approx(hp.values[0]).margin(1e-3));
        REQUIRE(f[kn] == Catch::Approx(hp.values[1]).margin(1e-3));
    }
    SECTION("Rayleigh positivity: phi <phi_t|f|phi_t> <= <phi_t|H|phi_t>") {
        const auto s = path.point_at_lambda(22.0);
        const auto op = path.at_lambda(22.0);
        const auto es = grid_lowest_eigenpairs(op, 1);
        const Eigen::VectorXd g0 = es.vectors.col(0);
        const Eigen::VectorXd f = path.objective_diag();
        const double fexp = g0.dot(f.asDiagonal() * g0);
        REQUIRE(s.phi * fexp <= es.values[0] + 1e-9);
    }
    SECTION("H_prob entries must lie in [-1, 0)") {
        DiagonalOperator bad(1);
        bad.values = {-0.5, 0.0};
        REQUIRE_THROWS_AS(QhdPath(bad, p, {Grid1D{256}}, 25.0), std::invalid_argument);
    }
}
