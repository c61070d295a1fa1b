// Sparse symmetric operators over n-qubit computational bases, together with
// structural validation (stoquastic / hypercube / TFD flags) and the Pauli
// term materializer. Bit order is big-endian: qubit 0 is the most significant
// bit of the basis index, so A (x) B indexes as i_A * 2^nB + i_B.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace stoqsim {

using Index = std::int64_t;

inline int popcount64(Index v) { return std::popcount(static_cast<std::uint64_t>(v)); }

// Real symmetric matrix stored as upper-triangular sparse entries (i <= j).
// Entry (i, j) also defines (j, i). Zero values are never stored.
class SparseSymmetricOperator {
public:
    SparseSymmetricOperator() = default;
    explicit SparseSymmetricOperator(int num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1) throw std::invalid_argument("num_qubits must be >= 1");
    }

    int num_qubits() const { return num_qubits_; }
    Index dim() const { return Index{1} << num_qubits_; }

    const std::map<std::pair<Index, Index>, double>& entries() const { return entries_; }

    // Sets the symmetric entry (i, j); removes it when v == 0.
    void set(Index i, Index j, double v) {
        check_index(i);
        check_index(j);
        if (i > j) std::swap(i, j);
        if (v == 0.0) {
            entries_.erase({i, j});
        } else {
            entries_[{i, j}] = v;
        }
    }

    // Adds v to the symmetric entry (i, j).
    void add(Index i, Index j, double v) {
        if (i > j) std::swap(i, j);
        set(i, j, at(i, j) + v);
    }

    double at(Index i, Index j) const {
        if (i > j) std::swap(i, j);
        auto it = entries_.find({i, j});
        return it == entries_.end() ? 0.0 : it->second;
    }

    // y = H x. Works on any dimension that fits in memory.
    void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
        y.setZero(dim());
        for (const auto& [ij, v] : entries_) {
            const auto [i, j] = ij;
            y[i] += v * x[j];
            if (i != j) y[j] += v * x[i];
        }
    }

    Eigen::MatrixXd to_dense() const {
        if (num_qubits_ > 12)
            throw std::runtime_error("refusing dense materialization above 4096 dimensions");
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim(), dim());
        for (const auto& [ij, v] : entries_) {
            const auto [i, j] = ij;
            M(i, j) = v;
            M(j, i) = v;
        }
        return M;
    }

    SparseSymmetricOperator& operator+=(const SparseSymmetricOperator& o) {
        require_same_qubits(o);
        for (const auto& [ij, v] : o.entries_) add(ij.first, ij.second, v);
        return *this;
    }

    SparseSymmetricOperator& operator*=(double c) {
        if (c == 0.0) {
            entries_.clear();
            return *this;
        }
        for (auto& [ij, v] : entries_) v *= c;
        return *this;
    }

    friend SparseSymmetricOperator operator+(SparseSymmetricOperator a, const SparseSymmetricOperator& b) {
        a += b;
        return a;
    }
    friend SparseSymmetricOperator operator-(SparseSymmetricOperator a, const SparseSymmetricOperator& b) {
        SparseSymmetricOperator nb = b;
        nb *= -1.0;
        a += nb;
        return a;
    }
    friend SparseSymmetricOperator operator*(double c, SparseSymmetricOperator a) {
        a *= c;
        return a;
    }

    // Convex combination (1 - w) * A + w * B, tolerating w outside [0,1].
    static SparseSymmetricOperator lerp(const SparseSymmetricOperator& a,
                                        const SparseSymmetricOperator& b, double w) {
        SparseSymmetricOperator r = (1.0 - w) * a;
        r += w * b;
        return r;
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (const auto& [ij, v] : entries_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void check_index(Index i) const {
        if (i < 0 || i >= dim()) throw std::out_of_range("basis index out of range");
    }
    void require_same_qubits(const SparseSymmetricOperator& o) const {
        if (o.num_qubits_ != num_qubits_) throw std::invalid_argument("qubit count mismatch");
    }

    int num_qubits_ = 1;
    std::map<std::pair<Index, Index>, double> entries_;
};

// Diagonal operator stored densely (allowed for num_qubits <= 14).
struct DiagonalOperator {
    int num_qubits = 1;
    std::vector<double> values;  // length 2^num_qubits

    DiagonalOperator() = default;
    explicit DiagonalOperator(int n) : num_qubits(n), values(std::size_t{1} << n, 0.0) {
        if (n < 1 || n > 14) throw std::invalid_argument("DiagonalOperator supports 1..14 qubits");
    }

    Index dim() const { return Index{1} << num_qubits; }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }

    Index argmin() const {
        return static_cast<Index>(std::min_element(values.begin(), values.end()) - values.begin());
    }

    SparseSymmetricOperator to_sparse() const {
        SparseSymmetricOperator H(num_qubits);
        for (Index i = 0; i < dim(); ++i) H.set(i, i, values[i]);
        return H;
    }
};

enum class PauliAxis { X, Z };

// TFI-representable term list: single-qubit X, single-qubit Z, two-qubit ZZ.
struct PauliTermList {
    struct Factor {
        int qubit;
        PauliAxis axis;
    };
    struct Term {
        double coeff;
        std::vector<Factor> factors;  // size 1 or 2
    };

    int num_qubits = 1;
    std::vector<Term> terms;
    double constant = 0.0;  // identity offset (energy shift)

    void validate() const {
        for (const auto& t : terms) {
            if (t.factors.empty() || t.factors.size() > 2)
                throw std::invalid_argument("Pauli term must touch 1 or 2 qubits");
            for (const auto& f : t.factors)
                if (f.qubit < 0 || f.qubit >= num_qubits)
                    throw std::out_of_range("Pauli factor qubit index out of range");
            if (t.factors.size() == 2) {
                if (t.factors[0].axis != PauliAxis::Z || t.factors[1].axis != PauliAxis::Z)
                    throw std::invalid_argument("two-qubit terms must be ZZ (mixed-axis forbidden)");
                if (t.factors[0].qubit == t.factors[1].qubit)
                    throw std::invalid_argument("two-qubit term repeats a qubit");
            }
        }
    }
};

// Materializes a TFI term list in the computational basis (qubit 0 = MSB).
inline SparseSymmetricOperator build_from_pauli(const PauliTermList& p) {
    p.validate();
    SparseSymmetricOperator H(p.num_qubits);
    const int n = p.num_qubits;
    const Index d = Index{1} << n;
    auto bit_sign = [n](Index idx, int q) { return ((idx >> (n - 1 - q)) & 1) ? -1.0 : 1.0; };
    if (p.constant != 0.0)
        for (Index i = 0; i < d; ++i) H.add(i, i, p.constant);
    for (const auto& t : p.terms) {
        if (t.factors.size() == 1 && t.factors[0].axis == PauliAxis::X) {
            const Index mask = Index{1} << (n - 1 - t.factors[0].qubit);
            for (Index i = 0; i < d; ++i) {
                const Index j = i ^ mask;
                if (i < j) H.add(i, j, t.coeff);
            }
        } else if (t.factors.size() == 1) {  // single Z
            for (Index i = 0; i < d; ++i) H.add(i, i, t.coeff * bit_sign(i, t.factors[0].qubit));
        } else {  // ZZ
            for (Index i = 0; i < d; ++i)
                H.add(i, i, t.coeff * bit_sign(i, t.factors[0].qubit) * bit_sign(i, t.factors[1].qubit));
        }
    }
    return H;
}

struct StructureReport {
    bool stoquastic = true;
    bool hypercube = true;
    bool tfd = true;
    int max_row_sparsity = 0;
    double induced_one_norm = 0.0;  // operator-norm upper bound for symmetric matrices
};

// Structural flags plus the induced-1-norm surrogate. tfd requires all
// off-diagonal support at Hamming distance exactly 1 with a uniform value per
// axis (the -a_i X_i shape); diagonal entries are unconstrained.
inline StructureReport validate_structure(const SparseSymmetricOperator& H) {
    StructureReport r;
    const int n = H.num_qubits();
    std::vector<int> row_count(H.dim(), 0);
    std::vector<double> row_sum(H.dim(), 0.0);
    // Per-axis off-diagonal uniformity bookkeeping for the TFD flag.
    std::vector<double> axis_value(n, 0.0);
    std::vector<Index> axis_count(n, 0);
    for (const auto& [ij, v] : H.entries()) {
        const auto [i, j] = ij;
        row_count[i]++;
        row_sum[i] += std::abs(v);
        if (i != j) {
            row_count[j]++;
            row_sum[j] += std::abs(v);
            if (v > 0.0) r.stoquastic = false;
            const int dist = popcount64(i ^ j);
            if (dist > 1) {
                r.hypercube = false;
                r.tfd = false;
            } else {
                const int axis = n - 1 - std::countr_zero(static_cast<std::uint64_t>(i ^ j));
                if (axis_count[axis] == 0) {
                    axis_value[axis] = v;
                } else if (axis_value[axis] != v) {
                    r.tfd = false;
                }
                axis_count[axis]++;
            }
        }
    }
    // Uniformity also requires every pair along a touched axis to be present.
    for (int q = 0; q < n; ++q)
        if (axis_count[q] != 0 && axis_count[q] != H.dim() / 2) r.tfd = false;
    for (Index i = 0; i < H.dim(); ++i) {
        r.max_row_sparsity = std::max(r.max_row_sparsity, row_count[i]);
        r.induced_one_norm = std::max(r.induced_one_norm, row_sum[i]);
    }
    return r;
}

}  // namespace stoqsim
