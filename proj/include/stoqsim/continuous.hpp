// Finite-difference embedding of TFD Hamiltonians into Schrodinger operators:
// the 1-d double-well operator, the two-level well basis and its splitting
// scale Lambda, the orthant diagonal extension D-hat, tensor-grid assembly,
// the tosdg verification report, and the QHD objective/schedule.
#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "clock.hpp"  // TridiagonalMatrix
#include "operators.hpp"
#include "spectral.hpp"

namespace stoqsim {

struct Grid1D {
    int m = 64;  // interior points; domain [-1, 1], Dirichlet ends

    void validate() const {
        if (m < 64) throw std::invalid_argument("grid needs m >= 64");
    }
    double h() const { return 2.0 / (m + 1); }
    double xi(int k) const { return -1.0 + (k + 1) * h(); }  // k in [0, m)
};

inline double f_dw(double z) {
    const double q = z * z - 0.25;
    return q * q;
}

// X-hat(lambda) = -d^2/dxi^2 + lambda^2 f_dw(xi), central differences.
inline TridiagonalMatrix discretize_double_well(double lambda, const Grid1D& g) {
    g.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    TridiagonalMatrix T;
    const double h2 = g.h() * g.h();
    T.diag.resize(g.m);
    T.off = Eigen::VectorXd::Constant(g.m - 1, -1.0 / h2);
    for (int k = 0; k < g.m; ++k) T.diag[k] = 2.0 / h2 + lambda * lambda * f_dw(g.xi(k));
    return T;
}

struct DoubleWellBasis {
    double lambda = 0.0;
    Eigen::VectorXd chi0, chi1;  // unit L2 norm, nonnegative on xi >= 0
    double mu0 = 0.0, mu1 = 0.0, mu2 = 0.0;
    double Lambda = 0.0;  // 2 / (mu1 - mu0)
    Eigen::VectorXd hat0, hat1;  // (chi0 +/- chi1) / sqrt(2)
};

// Three lowest eigenpairs of X-hat with parity checks and sign conventions.
inline DoubleWellBasis double_well_basis(double lambda, const Grid1D& g) {
    const TridiagonalMatrix T = discretize_double_well(lambda, g);
    const EigenSolution es = tridiag_lowest(T.diag, T.off, 3);
    DoubleWellBasis b;
    b.lambda = lambda;
    b.mu0 = es.values[0];
    b.mu1 = es.values[1];
    b.mu2 = es.values[2];
    if (!(b.mu1 > b.mu0)) throw std::runtime_error("double well mu0/mu1 degenerate on this grid");
    b.Lambda = 2.0 / (b.mu1 - b.mu0);

    const double sqh = std::sqrt(g.h());
    b.chi0 = es.vectors.col(0) / sqh;  // L2-normalized
    b.chi1 = es.vectors.col(1) / sqh;
    // Parity under grid reflection: chi0 even, chi1 odd.
    auto parity = [&](const Eigen::VectorXd& v) {
        double acc = 0.0;
        for (int k = 0; k < g.m; ++k) acc += v[k] * v[g.m - 1 - k];
        return acc * g.h();
    };
    if (parity(b.chi0) < 1.0 - 1e-6)
        throw std::runtime_error("chi0 is not even: grid under-resolves the well");
    if (parity(b.chi1) > -(1.0 - 1e-6))
        throw std::runtime_error("chi1 is not odd: grid under-resolves the well");
    // Sign fix: nonnegative mass on xi >= 0.
    auto right_mass = [&](const Eigen::VectorXd& v) {
        double acc = 0.0;
        for (int k = 0; k < g.m; ++k)
            if (g.xi(k) >= 0.0) acc += v[k];
        return acc;
    };
    if (right_mass(b.chi0) < 0.0) b.chi0 = -b.chi0;
    if (right_mass(b.chi1) < 0.0) b.chi1 = -b.chi1;
    b.hat0 = (b.chi0 + b.chi1) / std::numbers::sqrt2;
    b.hat1 = (b.chi0 - b.chi1) / std::numbers::sqrt2;
    return b;
}

// Trapezoidal quadrature of the pointwise product over [a, b], with the
// piecewise-linear interpolant split at the interval ends. Boundary values
// at xi = +/-1 are zero (Dirichlet).
inline double restricted_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                               const Grid1D& g, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("empty interval");
    if (a < -1.0 - 1e-12 || b > 1.0 + 1e-12) throw std::invalid_argument("interval outside domain");
    const int m = g.m;
    if (u.size() != m || v.size() != m) throw std::invalid_argument("vector/grid size mismatch");
    const double h = g.h();
    auto node = [&](int k) { return -1.0 + k * h; };                  // k in [0, m+1]
    auto w = [&](int k) { return (k >= 1 && k <= m) ? u[k - 1] * v[k - 1] : 0.0; };
    double acc = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double lo = std::max(node(k), a), hi = std::min(node(k + 1), b);
        if (hi <= lo) continue;
        // Linear interpolant of the product on [node(k), node(k+1)].
        auto val = [&](double x) {
            const double s = (x - node(k)) / h;
            return (1.0 - s) * w(k) + s * w(k + 1);
        };
        acc += 0.5 * (val(lo) + val(hi)) * (hi - lo);
    }
    return acc;
}

// D-hat(xi) = min{1, xi_min / w} * <theta(xi)| D |theta(xi)>, theta = 1_{xi<0}.
inline double hat_diag_value(const DiagonalOperator& D, const std::vector<double>& xi, double w) {
    const int n = D.num_qubits;
    if (static_cast<int>(xi.size()) != n) throw std::invalid_argument("dimension mismatch");
    if (!(w > 0.0 && w < 0.5)) throw std::invalid_argument("w must lie in (0, 1/2)");
    Index idx = 0;
    double xi_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (xi[i] < -1.0 - 1e-12 || xi[i] > 1.0 + 1e-12)
            throw std::out_of_range("point outside the box");
        if (xi[i] < 0.0) idx |= Index{1} << (n - 1 - i);
        xi_min = std::min(xi_min, std::abs(xi[i]));
    }
    return std::min(1.0, xi_min / w) * D.values[idx];
}

// -------------------------------------------------- tensor-grid operators

// sum_i (a_i X-hat_i) as a Kronecker sum over axis tridiagonals, plus a dense
// sampled diagonal. Axis 0 is the outermost (slowest-varying) index.
struct TensorGridOperator {
    std::vector<Grid1D> grids;
    std::vector<TridiagonalMatrix> axis;  // already scaled by a_i
    Eigen::VectorXd extra_diag;           // sampled diagonal (D-hat etc.)

    Index dim() const {
        Index d = 1;
        for (const auto& g : grids) d *= g.m;
        return d;
    }

    void apply(const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) const {
        Y = extra_diag.asDiagonal() * X;
        const Index d = dim();
        Index stride = d;
        for (std::size_t ax = 0; ax < axis.size(); ++ax) {
            const int m = grids[ax].m;
            stride /= m;
            const auto& T = axis[ax];
            // Apply the tridiagonal along axis `ax` for every (outer, inner) pair.
            const Index outer_count = d / (m * stride);
            for (Index o = 0; o < outer_count; ++o)
                for (Index in = 0; in < stride; ++in) {
                    const Index base = o * m * stride + in;
                    for (int k = 0; k < m; ++k) {
                        const Index row = base + Index{k} * stride;
                        Y.row(row) += T.diag[k] * X.row(row);
                        if (k + 1 < m) {
                            Y.row(row) += T.off[k] * X.row(base + Index{k + 1} * stride);
                            Y.row(base + Index{k + 1} * stride) += T.off[k] * X.row(row);
                        }
                    }
                }
        }
    }
};

// k lowest eigenpairs of a tensor-grid operator. One axis: exact tridiagonal
// solve. Several axes: LOBPCG with a separable spectral preconditioner built
// from the per-axis eigendecompositions (the Kronecker-sum inverse).
inline EigenSolution grid_lowest_eigenpairs(const TensorGridOperator& op, int k) {
    if (op.axis.size() == 1) {
        TridiagonalMatrix T = op.axis[0];
        T.diag += op.extra_diag;
        return tridiag_lowest(T.diag, T.off, k);
    }
    if (op.axis.size() != 2) throw std::invalid_argument("1 or 2 axes supported");
    const int m0 = op.grids[0].m, m1 = op.grids[1].m;
    const EigenSolution e0 = tridiag_full(op.axis[0].diag, op.axis[0].off);
    const EigenSolution e1 = tridiag_full(op.axis[1].diag, op.axis[1].off);

    LinearOperatorRef lin;
    lin.dim = op.dim();
    lin.apply = [&op](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) { op.apply(X, Y); };
    double scale = op.extra_diag.cwiseAbs().maxCoeff();
    scale += op.axis[0].diag.cwiseAbs().maxCoeff() + 2.0 * op.axis[0].off.cwiseAbs().maxCoeff();
    scale += op.axis[1].diag.cwiseAbs().maxCoeff() + 2.0 * op.axis[1].off.cwiseAbs().maxCoeff();
    lin.norm_scale = scale;
    lin.precondition = [&, m0, m1](Eigen::MatrixXd& R, double sigma) {
        for (int c = 0; c < R.cols(); ++c) {
            Eigen::Map<Eigen::MatrixXd> r(R.col(c).data(), m1, m0);  // col-major: axis1 fast
            Eigen::MatrixXd W = e1.vectors.transpose() * r * e0.vectors;
            for (int j = 0; j < m0; ++j)
                for (int i = 0; i < m1; ++i) {
                    double d = e0.values[j] + e1.values[i] - sigma;
                    if (std::abs(d) < 1e-8) d = (d >= 0 ? 1e-8 : -1e-8);
                    W(i, j) /= d;
                }
            r = e1.vectors * W * e0.vectors.transpose();
        }
    };
    return lobpcg_lowest(lin, k, 1e-10);
}

// H-hat(lambda) = sum_i a_i X-hat_i + D-hat on the tensor grid.
inline TensorGridOperator build_hat_hamiltonian(const std::vector<double>& a,
                                                const DiagonalOperator& D, double lambda,
                                                const std::vector<Grid1D>& grids,
                                                double w = 0.25) {
    const int n = D.num_qubits;
    if (static_cast<int>(a.size()) != n || static_cast<int>(grids.size()) != n)
        throw std::invalid_argument("axis count mismatch");
    if (n > 3) throw std::invalid_argument("n <= 3 supported");
    TensorGridOperator op;
    op.grids = grids;
    Index d = 1;
    for (const auto& g : grids) {
        g.validate();
        d *= g.m;
    }
    if (d > (Index{1} << 22)) throw std::invalid_argument("tensor grid too large");
    for (int i = 0; i < n; ++i) {
        TridiagonalMatrix T = discretize_double_well(lambda, grids[i]);
        T.diag *= a[i];
        T.off *= a[i];
        op.axis.push_back(std::move(T));
    }
    op.extra_diag.resize(d);
    std::vector<double> xi(n);
    for (Index idx = 0; idx < d; ++idx) {
        Index rem = idx;
        for (int i = n - 1; i >= 0; --i) {
            xi[i] = grids[i].xi(static_cast<int>(rem % grids[i].m));
            rem /= grids[i].m;
        }
        op.extra_diag[idx] = hat_diag_value(D, xi, w);
    }
    return op;
}

// Tensor product of per-axis grid vectors (axis 0 outermost), ell2 convention.
inline Eigen::VectorXd tensor_product(const std::vector<Eigen::VectorXd>& factors) {
    Eigen::VectorXd v = factors.at(0);
    for (std::size_t i = 1; i < factors.size(); ++i) {
        Eigen::VectorXd next(v.size() * factors[i].size());
        for (Eigen::Index a = 0; a < v.size(); ++a)
            next.segment(a * factors[i].size(), factors[i].size()) = v[a] * factors[i];
        v = std::move(next);
    }
    return v;
}

// ----------------------------------------------------------------- tosdg

struct TosdgReport {
    double lambda = 0.0;
    double Lambda = 0.0;
    double mu0_hat = 0.0, mu1_hat = 0.0;    // continuous side
    double mu0_qubit = 0.0, mu1_qubit = 0.0;  // qubit side H = -sum (a_i/Lambda) X_i + D
    double shift_sum = 0.0;                 // sum_i a_i (mu0(X-hat) + 1/Lambda)
    double energy_mismatch = 0.0;           // mu0_hat - (mu0_qubit + shift_sum)
    double gap_hat = 0.0;
    double gap_bound = 0.0;  // min{mu1(H), min a_i Theta + mu0(D)} - mu0(H) - eps_hat
    double eps_hat = 0.0;    // ||H-hat (E psi0) - (mu0_qubit + shift_sum)(E psi0)||
    double overlap = 0.0;    // |<g-hat | E psi0>|
};

inline TosdgReport verify_tosdg(const std::vector<double>& a, const DiagonalOperator& D,
                                double lambda, const std::vector<Grid1D>& grids,
                                double w = 0.25) {
    const int n = D.num_qubits;
    const TensorGridOperator Hhat = build_hat_hamiltonian(a, D, lambda, grids, w);
    const EigenSolution hat = grid_lowest_eigenpairs(Hhat, 2);

    TosdgReport r;
    r.lambda = lambda;
    r.mu0_hat = hat.values[0];
    r.mu1_hat = hat.values[1];
    r.gap_hat = hat.values[1] - hat.values[0];

    std::vector<DoubleWellBasis> basis;
    for (int i = 0; i < n; ++i) basis.push_back(double_well_basis(lambda, grids[i]));
    r.Lambda = basis[0].Lambda;

    // Qubit side.
    PauliTermList xt{n, {}};
    for (int i = 0; i < n; ++i) xt.terms.push_back({-a[i] / basis[i].Lambda, {{i, PauliAxis::X}}});
    const SparseSymmetricOperator Hq = build_from_pauli(xt) + D.to_sparse();
    const EigenSolution q = lowest_eigenpairs(Hq, std::min<Index>(2, Hq.dim()));
    r.mu0_qubit = q.values[0];
    r.mu1_qubit = q.values.size() > 1 ? q.values[1] : q.values[0];

    for (int i = 0; i < n; ++i) r.shift_sum += a[i] * (basis[i].mu0 + 1.0 / basis[i].Lambda);
    r.energy_mismatch = r.mu0_hat - (r.mu0_qubit + r.shift_sum);

    // Encode psi0 into the grid: |x> -> tensor of hat_{x_i}, ell2-normalized.
    Eigen::VectorXd embedded = Eigen::VectorXd::Zero(Hhat.dim());
    for (Index x = 0; x < Hq.dim(); ++x) {
        std::vector<Eigen::VectorXd> factors;
        for (int i = 0; i < n; ++i) {
            const bool one = (x >> (n - 1 - i)) & 1;
            factors.push_back((one ? basis[i].hat1 : basis[i].hat0) *
                              std::sqrt(grids[i].h()));
        }
        embedded += q.vectors(x, 0) * tensor_product(factors);
    }
    embedded.normalize();
    r.overlap = std::abs(hat.vectors.col(0).dot(embedded));

    Eigen::MatrixXd He;
    Hhat.apply(embedded, He);
    r.eps_hat = (He.col(0) - (r.mu0_qubit + r.shift_sum) * embedded).norm();

    double min_axis_theta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        min_axis_theta = std::min(min_axis_theta, a[i] * (basis[i].mu2 - basis[i].mu1));
    const double mu0_D = *std::min_element(D.values.begin(), D.values.end());
    r.gap_bound = std::min(r.mu1_qubit, min_axis_theta + mu0_D) - r.mu0_qubit - r.eps_hat;
    return r;
}

// ------------------------------------------------------------------- QHD

struct ScheduleParams {
    double lambda0 = 15.0;
    double Lambda0 = 0.0;  // computed: Lambda(lambda0)
    double w = 0.25;
    std::vector<double> a;    // per-axis coefficients, each >= 1
    DiagonalOperator D_TFI;   // the TFD diagonal entering g via D-hat

    void validate() const {
        if (lambda0 < 1.0) throw std::invalid_argument("lambda0 must be >= 1");
        if (!(w > 0.0 && w < 0.5)) throw std::invalid_argument("w must lie in (0, 1/2)");
        if (static_cast<int>(a.size()) != D_TFI.num_qubits)
            throw std::invalid_argument("coefficient count mismatch");
        for (double ai : a)
            if (ai < 1.0) throw std::invalid_argument("a_i must be >= 1");
    }
};

struct SchedulePoint {
    double lambda = 0.0;
    double nu = 0.0;   // Lambda0 / Lambda(lambda)
    double phi = 0.0;  // lambda^2 - nu * lambda0^2
    double t = 0.0;    // t = phi(lambda)
};

// QHD path H(t) = sum_i a_i (-d^2/dxi_i^2) + nu(t) g + t f over the tensor
// grid, with g = (1/Lambda0) D-hat_TFI + lambda0^2 sum a_i f_dw and
// f = H-hat_prob + sum a_i f_dw. Equivalent regrouping:
// H(t) = sum_i a_i X-hat_i(lambda) + (1/Lambda) D-hat_TFI + phi * H-hat_prob.
class QhdPath {
public:
    QhdPath(DiagonalOperator H_prob, ScheduleParams p, std::vector<Grid1D> grids,
            double lambda_max)
        : H_prob_(std::move(H_prob)), p_(std::move(p)), grids_(std::move(grids)),
          lambda_max_(lambda_max) {
        for (double v : H_prob_.values)
            if (v < -1.0 || v >= 0.0)
                throw std::invalid_argument("H_prob diagonal must lie in [-1, 0)");
        p_.Lambda0 = lambda_of(p_.lambda0);
        p_.validate();
        if (lambda_max_ < p_.lambda0) throw std::invalid_argument("lambda_max < lambda0");
        t_max_ = point_at_lambda(lambda_max_).phi;
    }

    double t_max() const { return t_max_; }
    const ScheduleParams& params() const { return p_; }

    SchedulePoint point_at_lambda(double lambda) const {
        if (lambda < p_.lambda0 - 1e-12) throw std::invalid_argument("lambda below lambda0");
        SchedulePoint s;
        s.lambda = lambda;
        s.nu = p_.Lambda0 / lambda_of(lambda);
        s.phi = lambda * lambda - s.nu * p_.lambda0 * p_.lambda0;
        s.t = s.phi;
        return s;
    }

    // Inverts t = phi(lambda) by bisection on the monotone phi.
    SchedulePoint point_at_t(double t) const {
        if (t < -1e-12 || t > t_max_ + 1e-9) throw std::out_of_range("t beyond schedule");
        double lo = p_.lambda0, hi = lambda_max_;
        while (hi - lo > 1e-12 * std::max(1.0, hi)) {
            const double mid = 0.5 * (lo + hi);
            (point_at_lambda(mid).phi < t ? lo : hi) = mid;
        }
        return point_at_lambda(0.5 * (lo + hi));
    }

    TensorGridOperator at_lambda(double lambda) const {
        const SchedulePoint s = point_at_lambda(lambda);
        TensorGridOperator op =
            build_hat_hamiltonian(p_.a, p_.D_TFI, lambda, grids_, p_.w);
        // Rescale the D-hat_TFI sample by 1/Lambda and add phi * H-hat_prob.
        const double inv_lambda_cap = 1.0 / lambda_of(lambda);
        op.extra_diag *= inv_lambda_cap;
        op.extra_diag += s.phi * sample_hat_diag(H_prob_);
        return op;
    }

    TensorGridOperator at_t(double t) const { return at_lambda(point_at_t(t).lambda); }

    // f(xi) = H-hat_prob(xi) + sum_i a_i f_dw(xi_i), sampled on the grid.
    Eigen::VectorXd objective_diag() const {
        Eigen::VectorXd f = sample_hat_diag(H_prob_);
        const Index d = f.size();
        std::vector<double> xi(grids_.size());
        for (Index idx = 0; idx < d; ++idx) {
            Index rem = idx;
            for (int i = static_cast<int>(grids_.size()) - 1; i >= 0; --i) {
                xi[i] = grids_[i].xi(static_cast<int>(rem % grids_[i].m));
                rem /= grids_[i].m;
            }
            for (std::size_t i = 0; i < grids_.size(); ++i) f[idx] += p_.a[i] * f_dw(xi[i]);
        }
        return f;
    }

    double lambda_of(double lambda) const {  // Lambda(lambda), memoized
        auto it = lambda_cache_.find(lambda);
        if (it != lambda_cache_.end()) return it->second;
        const double L = double_well_basis(lambda, grids_.front()).Lambda;
        lambda_cache_.emplace(lambda, L);
        return L;
    }

private:
    Eigen::VectorXd sample_hat_diag(const DiagonalOperator& D) const {
        TensorGridOperator tmp = build_hat_hamiltonian(p_.a, D, p_.lambda0, grids_, p_.w);
        return tmp.extra_diag;
    }

    DiagonalOperator H_prob_;
    ScheduleParams p_;
    std::vector<Grid1D> grids_;
    double lambda_max_ = 0.0;
    double t_max_ = 0.0;
    mutable std::map<double, double> lambda_cache_;
};

}  // namespace stoqsim
