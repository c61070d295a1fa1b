// The ground-state-shifting TFI clock H_L, its (ell+1)-dimensional unary
// reduction, the linearization operator H_C, the tilt/extension H_C', and the
// final two-breakpoint TFI -> diagonal path assembly.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "json_io.hpp"
#include "operators.hpp"
#include "paths.hpp"
#include "spectral.hpp"

namespace stoqsim {

struct ClockParams {
    int ell = 1;
    double eps_L = 0.05;
    double delta_L = 0.0;  // default filled by default_delta_L
    double lambda = 1.0;

    void validate() const {
        if (ell < 0) throw std::invalid_argument("ell must be >= 0");
        if (!(eps_L > 0.0 && eps_L <= 0.1))
            throw std::invalid_argument("eps_L must lie in (0, 1/10]");
        if (lambda < 0.0 || lambda > 2.0) throw std::invalid_argument("lambda must lie in [0, 2]");
        if (delta_L < 100.0 * std::pow(static_cast<double>(ell), 4) / eps_L - 1e-9)
            throw std::invalid_argument("delta_L must be >= 100 ell^4 / eps_L");
    }
};

inline double default_delta_L(int ell, double eps_L) {
    return 100.0 * std::pow(static_cast<double>(ell), 4) / eps_L;
}

// Unary clock state |j> = |1^j 0^(ell-j)>, big-endian basis index.
inline Index unary_index(int j, int ell) {
    if (j < 0 || j > ell) throw std::out_of_range("unary label out of range");
    return (Index{1} << ell) - (Index{1} << (ell - j));
}

// H_L(lambda, t) = Q_L + lambda X_L + Z_L(t) on ell qubits, where
// Q_L = delta_L((ell-1)I + Z_1 - Z_ell - sum Z_i Z_{i+1}),
// X_L = -sum X_i, Z_L(t) = (1/eps_L) sum (i - t)(I - Z_i).
inline SparseSymmetricOperator build_clock(const ClockParams& p, double t) {
    p.validate();
    if (p.ell < 1) throw std::invalid_argument("build_clock requires ell >= 1");
    const int ell = p.ell;
    SparseSymmetricOperator H(ell);
    const Index d = H.dim();
    auto sgn = [ell](Index x, int i) {  // (-1)^{x_i}, bits 1-based from the left
        return ((x >> (ell - i)) & 1) ? -1.0 : 1.0;
    };
    for (Index x = 0; x < d; ++x) {
        double alpha = ell - 1.0 + sgn(x, 1) - sgn(x, ell);
        for (int i = 1; i < ell; ++i) alpha -= sgn(x, i) * sgn(x, i + 1);
        double beta = 0.0;
        for (int i = 1; i <= ell; ++i) beta += (i - t) * (1.0 - sgn(x, i));
        H.set(x, x, p.delta_L * alpha + beta / p.eps_L);
    }
    if (p.lambda != 0.0)
        for (Index x = 0; x < d; ++x)
            for (int b = 0; b < ell; ++b) {
                const Index y = x ^ (Index{1} << b);
                if (x < y) H.set(x, y, -p.lambda);
            }
    return H;
}

struct TridiagonalMatrix {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;

    Eigen::MatrixXd to_dense() const {
        const auto n = diag.size();
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            M(i, i) = diag[i];
            if (i + 1 < n) M(i, i + 1) = M(i + 1, i) = off[i];
        }
        return M;
    }
};

// The unary-sector reduction of H_L: diagonal p_j = j(j+1-2t)/eps_L and
// uniform off-diagonal -lambda, on ell+1 states.
inline TridiagonalMatrix reduced_clock(const ClockParams& p, double t) {
    p.validate();
    TridiagonalMatrix T;
    T.diag.resize(p.ell + 1);
    T.off = Eigen::VectorXd::Constant(std::max(p.ell, 1), -p.lambda);
    if (p.ell == 0) T.off.resize(0);
    for (int j = 0; j <= p.ell; ++j) T.diag[j] = j * (j + 1.0 - 2.0 * t) / p.eps_L;
    return T;
}

// ------------------------------------------------------------- assembly

struct LinearAssembly {
    std::vector<DiagonalOperator> D_list;  // ell + 1 operators on n_B qubits
    PauliTermList X_B;
    double delta_C = 0.0;
    ClockParams clock;
    double eta = 0.0;

    int n_B() const { return D_list.empty() ? 0 : D_list.front().num_qubits; }

    // ||D_C|| is exact for diagonal D_C: the largest |entry| over all D_i.
    double d_c_norm() const {
        double m = 0.0;
        for (const auto& D : D_list) m = std::max(m, D.max_abs());
        return m;
    }

    void validate() const {
        clock.validate();
        if (static_cast<int>(D_list.size()) != clock.ell + 1)
            throw std::invalid_argument("D_list must have ell + 1 operators");
        for (const auto& D : D_list)
            if (D.num_qubits != n_B()) throw std::invalid_argument("D_list qubit mismatch");
        X_B.validate();
        if (X_B.num_qubits != n_B()) throw std::invalid_argument("X_B qubit mismatch");
        const double norm = d_c_norm();
        if (delta_C < 10.0 * norm) throw std::invalid_argument("delta_C must be >= 10 ||D_C||");
        if (!(eta > 0.0) || eta > 1.0 / (10.0 * norm + clock.ell) + 1e-15)
            throw std::invalid_argument("eta must lie in (0, 1/(10||D_C|| + ell)]");
    }
};

inline double default_delta_C(const LinearAssembly& a) { return 10.0 * a.d_c_norm() + 1.0; }
inline double default_eta(const LinearAssembly& a) {
    return 1.0 / (10.0 * a.d_c_norm() + a.clock.ell);
}

namespace detail {

// Core of H_C / H_C': xb_scale * X_B (x) I + dc_scale * D_C
//                     + delta_C * I (x) (Q_L + lambda_eff * X_L + Z_L(t)),
// on n_B + ell qubits with the clock register last.
inline SparseSymmetricOperator assemble_core(const LinearAssembly& a, double t,
                                             double lambda_eff, double xb_scale,
                                             double dc_scale) {
    const int nb = a.n_B(), ell = a.clock.ell;
    SparseSymmetricOperator H(nb + ell);
    const Index dc = Index{1} << ell;
    const Index db = Index{1} << nb;

    if (ell >= 1) {
        ClockParams cp = a.clock;
        cp.lambda = lambda_eff;
        const SparseSymmetricOperator HL = build_clock(cp, t);
        for (const auto& [ij, v] : HL.entries())
            for (Index x = 0; x < db; ++x)
                H.set((x << ell) | ij.first, (x << ell) | ij.second, a.delta_C * v);
    }
    if (xb_scale != 0.0) {
        const SparseSymmetricOperator XB = build_from_pauli(a.X_B);
        for (const auto& [ij, v] : XB.entries())
            for (Index c = 0; c < dc; ++c)
                H.add((ij.first << ell) | c, (ij.second << ell) | c, xb_scale * v);
    }
    if (dc_scale != 0.0)
        for (int j = 0; j <= ell; ++j) {
            const Index c = ell >= 1 ? unary_index(j, ell) : 0;
            for (Index x = 0; x < db; ++x) {
                const Index idx = (x << ell) | c;
                H.add(idx, idx, dc_scale * a.D_list[j].values[x]);
            }
        }
    return H;
}

}  // namespace detail

// H_C(t) = delta_C * I (x) H_L(t) + X_B (x) I + D_C, clock at its lambda.
inline SparseSymmetricOperator linearize(const LinearAssembly& a, double t) {
    a.validate();
    if (a.clock.ell == 0) return detail::assemble_core(a, t, 0.0, 1.0, 1.0);  // X_B + D_0
    return detail::assemble_core(a, t, a.clock.lambda, 1.0, 1.0);
}

// H_C'(t) with the tilt: clock coupling 1 - t*eta, X_B scaled by 1 - t*eta,
// D_C scaled by 1 + t*eta; domain t in [-1/eta, 1/eta].
inline SparseSymmetricOperator tilt_extend(const LinearAssembly& a, double t) {
    a.validate();
    const double bound = 1.0 / a.eta;
    if (t < -bound - 1e-9 || t > bound + 1e-9)
        throw std::out_of_range("t outside [-1/eta, 1/eta]");
    const double tilt = t * a.eta;
    return detail::assemble_core(a, t, (1.0 - tilt) * a.clock.lambda, 1.0 - tilt, 1.0 + tilt);
}

struct FinalAssembly {
    PauliTermList h_tfi;         // tilt_extend at t = -1/eta, exact TFI form
    DiagonalOperator d_final;    // tilt_extend at t = +1/eta
    PiecewiseLinearPath path;    // two breakpoints on [0, 1] (exact: affine in t)
    Index ground_index = 0;      // |u, 1^ell>
    double product_state_distance = 0.0;  // ||ground(H_TFI) - |+>^nB |0^ell>||
};

// The final TFI -> diagonal linear path per the tilt construction. Requires a
// unique diagonal minimizer u of D_ell; the ground basis state of d_final is
// |u, 1^ell>.
inline FinalAssembly assemble_final(const LinearAssembly& a) {
    a.validate();
    const int nb = a.n_B(), ell = a.clock.ell;
    if (ell < 1) throw std::invalid_argument("assemble_final requires ell >= 1");
    const double inv_eta = 1.0 / a.eta;

    FinalAssembly out;
    const SparseSymmetricOperator h_tfi_op = tilt_extend(a, -inv_eta);
    const SparseSymmetricOperator d_op = tilt_extend(a, inv_eta);

    // Exact Pauli form of the TFI endpoint: 2*X_B on the system register plus
    // the lambda = 2 clock at t = -1/eta, expanded into Z / ZZ / X terms.
    PauliTermList& p = out.h_tfi;
    p.num_qubits = nb + ell;
    for (const auto& term : a.X_B.terms) {
        PauliTermList::Term t2 = term;
        t2.coeff *= 2.0;
        p.terms.push_back(std::move(t2));
    }
    p.constant += 2.0 * a.X_B.constant;
    const double dl = a.clock.delta_L, dc = a.delta_C, epsl = a.clock.eps_L;
    p.constant += dc * dl * (ell - 1.0);
    if (ell >= 2) {
        p.terms.push_back({dc * dl, {{nb, PauliAxis::Z}}});
        p.terms.push_back({-dc * dl, {{nb + ell - 1, PauliAxis::Z}}});
        for (int i = 0; i < ell - 1; ++i)
            p.terms.push_back({-dc * dl, {{nb + i, PauliAxis::Z}, {nb + i + 1, PauliAxis::Z}}});
    }
    for (int i = 0; i < ell; ++i)
        p.terms.push_back({-2.0 * dc * a.clock.lambda, {{nb + i, PauliAxis::X}}});
    for (int i = 1; i <= ell; ++i) {
        const double w = (i + inv_eta) / epsl;  // (i - t) at t = -1/eta
        p.constant += dc * w;
        p.terms.push_back({-dc * w, {{nb + i - 1, PauliAxis::Z}}});
    }
    p.validate();
    if ((build_from_pauli(p) - h_tfi_op).max_abs_entry() > 1e-6 * std::max(1.0, h_tfi_op.max_abs_entry()))
        throw std::logic_error("TFI term list does not match the assembled endpoint");

    out.d_final = DiagonalOperator(nb + ell);
    for (const auto& [ij, v] : d_op.entries()) {
        if (ij.first != ij.second) throw std::logic_error("diagonal endpoint has off-diagonals");
        out.d_final.values[ij.first] = v;
    }

    // Unique minimizer of D_ell.
    const auto& dl_vals = a.D_list[ell].values;
    const Index u = a.D_list[ell].argmin();
    for (Index x = 0; x < static_cast<Index>(dl_vals.size()); ++x)
        if (x != u && dl_vals[x] == dl_vals[u])
            throw std::invalid_argument("D_ell minimizer is not unique");
    out.ground_index = (u << ell) | unary_index(ell, ell);

    out.path.breakpoints.emplace_back(0.0, h_tfi_op);
    out.path.breakpoints.emplace_back(1.0, d_op);
    out.path.validate();

    // Distance of the TFI ground state to |+>^{nB} |0^ell>.
    const EigenSolution es = lowest_eigenpairs(h_tfi_op, 1);
    Eigen::VectorXd prod = Eigen::VectorXd::Zero(h_tfi_op.dim());
    const double amp = std::pow(2.0, -0.5 * nb);
    for (Index x = 0; x < (Index{1} << nb); ++x) prod[x << ell] = amp;
    Eigen::VectorXd g = es.vectors.col(0);
    if (g.dot(prod) < 0) g = -g;
    out.product_state_distance = (g - prod).norm();
    return out;
}

// ------------------------------------------------------------ JSON format

inline json to_json(const LinearAssembly& a) {
    json ds = json::array();
    for (const auto& D : a.D_list) ds.push_back(to_json(D));
    return json{{"D_list", std::move(ds)},
                {"X_B", to_json(a.X_B)},
                {"delta_C", a.delta_C},
                {"clock", {{"ell", a.clock.ell},
                           {"eps_L", a.clock.eps_L},
                           {"delta_L", a.clock.delta_L},
                           {"lambda", a.clock.lambda}}},
                {"eta", a.eta}};
}

inline LinearAssembly assembly_from_json(const json& j) {
    LinearAssembly a;
    for (const auto& d : j.at("D_list")) a.D_list.push_back(diagonal_from_json(d));
    a.X_B = pauli_from_json(j.at("X_B"));
    a.delta_C = j.at("delta_C").get<double>();
    const auto& c = j.at("clock");
    a.clock.ell = c.at("ell").get<int>();
    a.clock.eps_L = c.at("eps_L").get<double>();
    a.clock.delta_L = c.at("delta_L").get<double>();
    a.clock.lambda = c.value("lambda", 1.0);
    a.eta = j.at("eta").get<double>();
    a.validate();
    return a;
}

}  // namespace stoqsim
