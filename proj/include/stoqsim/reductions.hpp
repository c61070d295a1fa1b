// The two pointwise reductions (sparse stoquastic -> hypercube -> TFD),
// their endpoint decoration paths P1-P5, path resampling, and empirical
// delta calibration against the simulation certificate.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "generators.hpp"
#include "operators.hpp"
#include "paths.hpp"
#include "spectral.hpp"

namespace stoqsim {

// Dense isometry from an encoded-basis-index map (column x has a single 1).
inline Eigen::MatrixXd encoding_matrix(const std::vector<Index>& enc, Index dim_sim) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(dim_sim, enc.size());
    for (std::size_t x = 0; x < enc.size(); ++x) {
        if (enc[x] < 0 || enc[x] >= dim_sim) throw std::out_of_range("encoding index");
        E(enc[x], x) = 1.0;
    }
    return E;
}

// ------------------------------------------------------------ edge plumbing

// Edge set used by Reduction I: the supplied interaction constraint, or the
// off-diagonal support of K when none is given. Self-loops are implicit on
// every vertex and not listed.
inline std::vector<std::pair<Index, Index>> edges_for_reduction(
    const SparseSymmetricOperator& K, const std::optional<InteractionConstraint>& constraint) {
    if (constraint) {
        if (constraint->num_qubits != K.num_qubits())
            throw std::invalid_argument("constraint qubit count mismatch");
        return constraint->edges;
    }
    std::vector<std::pair<Index, Index>> edges;
    for (const auto& [ij, v] : K.entries())
        if (ij.first != ij.second) edges.emplace_back(ij.first, ij.second);
    return edges;
}

// Rank of y among x's neighbours: increasing order above x, decreasing below.
inline int rank_of(const std::vector<std::pair<Index, Index>>& edges, Index x, Index y) {
    if (x == y) throw std::invalid_argument("rank undefined for self-loops");
    std::vector<Index> nbrs;
    for (const auto& [a, b] : edges) {
        if (a == x) nbrs.push_back(b);
        if (b == x) nbrs.push_back(a);
    }
    int rank = 0;
    bool found = false;
    if (y > x) {
        std::sort(nbrs.begin(), nbrs.end());
        for (Index v : nbrs)
            if (v > x) {
                ++rank;
                if (v == y) { found = true; break; }
            }
    } else {
        std::sort(nbrs.begin(), nbrs.end(), std::greater<>());
        for (Index v : nbrs)
            if (v < x) {
                ++rank;
                if (v == y) { found = true; break; }
            }
    }
    if (!found) throw std::invalid_argument("(x, y) is not an edge");
    return rank;
}

// Lexicographically smallest bit-flip sequence x = z_0, ..., z_l = y: at each
// step flip the differing bit that minimizes the next string (greedy is
// optimal for sequence-lexicographic order).
inline std::vector<Index> lex_smallest_walk(Index x, Index y, int n) {
    std::vector<Index> walk{x};
    Index cur = x;
    while (cur != y) {
        Index best = -1;
        for (int b = 0; b < n; ++b) {
            const Index mask = Index{1} << (n - 1 - b);
            if ((cur ^ y) & mask) {
                const Index cand = cur ^ mask;
                if (best < 0 || cand < best) best = cand;
            }
        }
        cur = best;
        walk.push_back(cur);
    }
    return walk;
}

// ------------------------------------------------------------- Reduction I

struct ReductionIOutput {
    int n = 0;  // logical qubits
    int s = 0;
    int n_A = 0;  // 3n + 2s
    double delta = 0.0;
    SparseSymmetricOperator H0, Vmain, Vextra;
    std::vector<Index> encoding;  // |x> -> |x, x, 0^s, 0^s, 0^n>

    SparseSymmetricOperator combined() const {
        return delta * H0 + std::sqrt(delta) * Vmain + Vextra;
    }
};

namespace detail {

// Register layout (x: n, y: n, e1: s, e2: s, tail: n), big-endian.
inline Index pack_node(Index x, Index y, Index e1, Index e2, Index tail, int n, int s) {
    return ((((x << n | y) << s | e1) << s | e2) << n) | tail;
}

inline Index unit_bit(int rank, int s) { return Index{1} << (s - rank); }  // e_r, 1-based

inline Index trailing_ones(int k) { return (Index{1} << k) - 1; }

}  // namespace detail

// The fixed-length (2n+3)-node hypercube path linking the encoded copies of
// edge (x, y): five phases through the rank registers and the tail counter.
inline std::vector<Index> subdivision_path(Index x, Index y, int r1, int r2, int n, int s) {
    if (!(x < y)) throw std::invalid_argument("subdivision_path requires x < y");
    if (r1 < 1 || r1 > s || r2 < 1 || r2 > s) throw std::invalid_argument("rank out of [1, s]");
    const Index e1 = detail::unit_bit(r1, s), e2 = detail::unit_bit(r2, s);
    const std::vector<Index> z = lex_smallest_walk(x, y, n);
    const int ell = static_cast<int>(z.size()) - 1;
    std::vector<Index> nodes;
    nodes.reserve(2 * n + 3);
    for (int i = 0; i <= ell; ++i)
        nodes.push_back(detail::pack_node(x, z[i], e1, 0, 0, n, s));
    for (int k = 1; k <= n - ell; ++k)
        nodes.push_back(detail::pack_node(x, y, e1, 0, detail::trailing_ones(k), n, s));
    nodes.push_back(detail::pack_node(x, y, e1, e2, detail::trailing_ones(n - ell), n, s));
    for (int k = n - ell; k >= 1; --k)
        nodes.push_back(detail::pack_node(x, y, 0, e2, detail::trailing_ones(k), n, s));
    for (int i = 0; i <= ell; ++i)
        nodes.push_back(detail::pack_node(z[i], y, 0, e2, 0, n, s));
    if (static_cast<int>(nodes.size()) != 2 * n + 3)
        throw std::logic_error("subdivision path has wrong length");
    return nodes;
}

inline double reduction_i_alpha(int n, double M) {
    const double s = std::sin(std::numbers::pi / (4.0 * n + 8.0));
    return (M + 1.0) / (4.0 * s * s);
}

inline ReductionIOutput reduce_sparse_to_hypercube(
    const SparseSymmetricOperator& K, int s, double M, double eps, double delta,
    const std::optional<InteractionConstraint>& constraint = std::nullopt) {
    const StructureReport rep = validate_structure(K);
    if (!rep.stoquastic) throw std::invalid_argument("K must be stoquastic");
    if (rep.max_row_sparsity > s) throw std::invalid_argument("K exceeds sparsity s");
    if (rep.induced_one_norm > M + 1e-12) throw std::invalid_argument("||K|| exceeds M");
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("eps must lie in (0, 1]");
    if (delta <= 0.0) throw std::invalid_argument("delta must be positive");

    ReductionIOutput out;
    out.n = K.num_qubits();
    out.s = s;
    out.n_A = 3 * out.n + 2 * s;
    out.delta = delta;
    const int n = out.n;
    const Index d = K.dim();
    const auto edges = edges_for_reduction(K, constraint);
    const double alpha = reduction_i_alpha(n, M);
    const double vmain_entry = -std::sqrt(alpha * (2 * n + 4));
    auto a_of = [&](Index x, Index y) { return K.at(x, y) - eps / (2.0 * s); };

    out.H0 = SparseSymmetricOperator(out.n_A);
    out.Vmain = SparseSymmetricOperator(out.n_A);
    out.Vextra = SparseSymmetricOperator(out.n_A);
    out.encoding.resize(d);
    for (Index x = 0; x < d; ++x)
        out.encoding[x] = detail::pack_node(x, x, 0, 0, 0, n, s);

    // (H0)_{++} starts as the identity off the gadget chains; encoded states
    // carry diagonal 0.
    for (Index v = 0; v < out.H0.dim(); ++v) out.H0.set(v, v, 1.0);
    for (Index x = 0; x < d; ++x) out.H0.set(out.encoding[x], out.encoding[x], 0.0);

    for (const auto& [x, y] : edges) {
        const double a = a_of(x, y);
        if (!(a < 0.0)) throw std::logic_error("a_{x,y} must be negative for stoquastic K");
        const int r1 = rank_of(edges, x, y), r2 = rank_of(edges, y, x);
        const auto nodes = subdivision_path(x, y, r1, r2, n, s);
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            if (popcount64(nodes[i] ^ nodes[i + 1]) != 1)
                throw std::logic_error("chain nodes not hypercube-adjacent");
            out.H0.set(nodes[i], nodes[i + 1], alpha / a);
        }
        for (Index v : nodes) out.H0.set(v, v, -2.0 * alpha / a);
        out.Vmain.set(out.encoding[x], nodes.front(), vmain_entry);
        out.Vmain.set(out.encoding[y], nodes.back(), vmain_entry);
    }
    for (Index x = 0; x < d; ++x) {
        double off_sum = 0.0;
        for (const auto& [u, v] : edges) {
            if (u == x) off_sum += a_of(u, v);
            if (v == x) off_sum += a_of(u, v);
        }
        out.Vextra.set(out.encoding[x], out.encoding[x],
                       a_of(x, x) - (2.0 * n + 3.0) * off_sum);
    }
    return out;
}

// ------------------------------------------------------------ Reduction II

struct ReductionIIOutput {
    int n = 0;    // input qubits (hypercube side)
    int n_B = 0;  // 2n
    double delta = 0.0;
    double delta_B = 0.0;
    PauliTermList X_part;      // -delta_B * sum_i X_i
    DiagonalOperator D_part;   // delta * H0 + Vextra
    std::vector<Index> encoding;  // |x> -> |x, x>

    SparseSymmetricOperator combined() const {
        return build_from_pauli(X_part) + D_part.to_sparse();
    }
};

// m_scale is the spectral scale of the target ground problem (the paper's
// gadget uses it only in the distance-penalty diagonal for dist > 1).
inline ReductionIIOutput reduce_hypercube_to_tfd(const SparseSymmetricOperator& K, double M,
                                                 double eps, double delta, double m_scale) {
    const StructureReport rep = validate_structure(K);
    if (!rep.stoquastic) throw std::invalid_argument("K must be stoquastic");
    if (!rep.hypercube) throw std::invalid_argument("K must be a hypercube Hamiltonian");
    if (rep.induced_one_norm > M + 1e-12) throw std::invalid_argument("||K|| exceeds M");
    if (delta <= 0.0 || m_scale <= 0.0) throw std::invalid_argument("delta, m_scale > 0 required");

    ReductionIIOutput out;
    out.n = K.num_qubits();
    out.n_B = 2 * out.n;
    out.delta = delta;
    out.delta_B = std::sqrt(delta * (M + 1.0) / 2.0);
    const int n = out.n;
    const Index d = K.dim();
    const double offset = eps / (2.0 * (n + 1.0));
    auto a_of = [&](Index x, Index y) { return K.at(x, y) - offset; };
    const double far_scale = (M + 1.0) / (m_scale + offset);

    out.X_part.num_qubits = out.n_B;
    for (int i = 0; i < out.n_B; ++i)
        out.X_part.terms.push_back({-out.delta_B, {{i, PauliAxis::X}}});

    out.D_part = DiagonalOperator(out.n_B);
    out.encoding.resize(d);
    for (Index x = 0; x < d; ++x) out.encoding[x] = (x << n) | x;
    for (Index x = 0; x < d; ++x) {
        for (Index y = 0; y < d; ++y) {
            const Index idx = (x << n) | y;
            const int dist = popcount64(x ^ y);
            if (dist == 0) {
                double nbr_sum = 0.0;
                for (int b = 0; b < n; ++b) nbr_sum += a_of(x, x ^ (Index{1} << (n - 1 - b)));
                out.D_part.values[idx] = a_of(x, x) - nbr_sum;  // Vextra on |x,x>
            } else if (dist == 1) {
                out.D_part.values[idx] = delta * (-(M + 1.0) / a_of(x, y));
            } else {
                out.D_part.values[idx] = delta * far_scale * dist;
            }
        }
    }
    return out;
}

// --------------------------------------------------- endpoint decorations

// P1: H'(1) -> delta*H0 + Vextra -> -m |u><u|   (appended after Reduction I).
inline PiecewiseLinearPath path_p1(const ReductionIOutput& r1, double m, Index w_logical) {
    PiecewiseLinearPath p;
    SparseSymmetricOperator proj(r1.n_A);
    proj.set(r1.encoding.at(w_logical), r1.encoding.at(w_logical), -m);
    p.breakpoints.emplace_back(0.0, r1.combined());
    p.breakpoints.emplace_back(1.0, r1.delta * r1.H0 + r1.Vextra);
    p.breakpoints.emplace_back(2.0, std::move(proj));
    p.validate();
    return p;
}

// P2: -m |0^nA><0^nA| -> delta*H0~ + Vextra~ -> H'(0)   (prepended).
inline PiecewiseLinearPath path_p2(const ReductionIOutput& r0, double m) {
    PiecewiseLinearPath p;
    SparseSymmetricOperator proj(r0.n_A);
    proj.set(0, 0, -m);  // encoded |0^n| is the all-zero string
    p.breakpoints.emplace_back(0.0, std::move(proj));
    p.breakpoints.emplace_back(1.0, r0.delta * r0.H0 + r0.Vextra);
    p.breakpoints.emplace_back(2.0, r0.combined());
    p.validate();
    return p;
}

// P3: -m sum X_i -> -m sum Z_i -> -m |0^nA><0^nA|   (prepended before P2).
inline PiecewiseLinearPath path_p3(int n_A, double m) {
    PauliTermList xs{n_A, {}}, zs{n_A, {}};
    for (int i = 0; i < n_A; ++i) {
        xs.terms.push_back({-m, {{i, PauliAxis::X}}});
        zs.terms.push_back({-m, {{i, PauliAxis::Z}}});
    }
    SparseSymmetricOperator proj(n_A);
    proj.set(0, 0, -m);
    PiecewiseLinearPath p;
    p.breakpoints.emplace_back(0.0, build_from_pauli(xs));
    p.breakpoints.emplace_back(1.0, build_from_pauli(zs));
    p.breakpoints.emplace_back(2.0, std::move(proj));
    p.validate();
    return p;
}

// P4: H'(1) -> H'(1) - 3 delta_B n_B |u><u| -> X_B - 3 delta_B n_B |u><u|.
inline PiecewiseLinearPath path_p4(const ReductionIIOutput& r1, Index w_logical) {
    const double c = 3.0 * r1.delta_B * r1.n_B;
    SparseSymmetricOperator proj(r1.n_B);
    proj.set(r1.encoding.at(w_logical), r1.encoding.at(w_logical), -c);
    const SparseSymmetricOperator xb = build_from_pauli(r1.X_part);
    PiecewiseLinearPath p;
    p.breakpoints.emplace_back(0.0, r1.combined());
    p.breakpoints.emplace_back(1.0, r1.combined() + proj);
    p.breakpoints.emplace_back(2.0, xb + proj);
    p.validate();
    return p;
}

// P5: X_B -> X_B + (1/2) delta*alpha (nI - sum Z_i Z_{n+i}) -> H'(0), where
// H'(0) adds beta on the encoded diagonal (K(0) = -m sum X_i assumed).
inline PiecewiseLinearPath path_p5(const ReductionIIOutput& r0, double M, double eps,
                                   double m) {
    const int n = r0.n;
    const double offset = eps / (2.0 * (n + 1.0));
    const double alpha = (M + 1.0) / (m + offset);
    const double beta = n * m + (n - 1.0) * offset;
    const SparseSymmetricOperator xb = build_from_pauli(r0.X_part);

    PauliTermList zz{r0.n_B, {}};
    for (int i = 0; i < n; ++i)
        zz.terms.push_back({-0.5 * r0.delta * alpha, {{i, PauliAxis::Z}, {n + i, PauliAxis::Z}}});
    SparseSymmetricOperator ladder = build_from_pauli(zz);
    for (Index v = 0; v < ladder.dim(); ++v)
        ladder.add(v, v, 0.5 * r0.delta * alpha * n);

    SparseSymmetricOperator hp0 = xb + ladder;
    for (Index e : r0.encoding) hp0.add(e, e, beta);

    PiecewiseLinearPath p;
    p.breakpoints.emplace_back(0.0, xb);
    p.breakpoints.emplace_back(1.0, xb + ladder);
    p.breakpoints.emplace_back(2.0, std::move(hp0));
    p.validate();
    return p;
}

// Joins segments end-to-start with uniform lengths and rescales to [0, 1].
// Consecutive pieces must agree at the junction (within a small tolerance).
inline PiecewiseLinearPath concatenate_paths(const std::vector<PiecewiseLinearPath>& parts) {
    if (parts.empty()) throw std::invalid_argument("nothing to concatenate");
    PiecewiseLinearPath out;
    const double piece = 1.0 / parts.size();
    double offset = 0.0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto& p = parts[k];
        p.validate();
        const double span = p.t_max() - p.t_min();
        if (!(span > 0)) throw std::invalid_argument("degenerate segment");
        for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
            const auto& [t, H] = p.breakpoints[i];
            if (k > 0 && i == 0) {
                const auto& prevH = out.breakpoints.back().second;
                if ((H - prevH).max_abs_entry() > 1e-9 * std::max(1.0, prevH.max_abs_entry()))
                    throw std::invalid_argument("junction mismatch between segments");
                continue;  // keep the left copy
            }
            out.breakpoints.emplace_back(offset + piece * (t - p.t_min()) / span, H);
        }
        offset += piece;
    }
    out.breakpoints.back().first = 1.0;
    out.validate();
    return out;
}

// ------------------------------------------------------------- resampling

struct SampledPath {
    PiecewiseLinearPath path;  // breakpoints D_0 ... D_ell at uniform times
    double max_segment_deviation = 0.0;  // max_k ||D_{k-1} - D_k||_1
};

inline SampledPath sample_path(const HamiltonianPath& path, int ell) {
    if (ell < 1) throw std::invalid_argument("ell must be >= 1");
    SampledPath out;
    const double t0 = path.t_min(), t1 = path.t_max();
    for (int k = 0; k <= ell; ++k) {
        const double t = t0 + (t1 - t0) * k / ell;
        out.path.breakpoints.emplace_back(t, eval_path(path, t));
        if (k > 0) {
            const auto& prev = out.path.breakpoints[k - 1].second;
            const auto& cur = out.path.breakpoints[k].second;
            out.max_segment_deviation = std::max(
                out.max_segment_deviation, validate_structure(cur - prev).induced_one_norm);
        }
    }
    out.path.validate();
    return out;
}

// -------------------------------------------------------- delta calibration

struct CalibrationResult {
    double delta = 0.0;
    SimulationCertificate certificate;
    bool success = false;
};

// Doubling-then-bisection search for the smallest passing delta. builder maps
// delta to (H_target, H_sim); E is the fixed encoding isometry.
inline CalibrationResult calibrate_delta(
    const std::function<std::pair<SparseSymmetricOperator, SparseSymmetricOperator>(double)>&
        builder,
    double eps_enc, double eps, const Eigen::MatrixXd& E, double delta_start) {
    constexpr double kCap = 1099511627776.0;  // 2^40
    auto passes = [&](double delta) {
        const auto [H, Hsim] = builder(delta);
        return verify_simulation(H, Hsim, E, eps_enc, eps);
    };
    double delta = delta_start;
    SimulationCertificate cert = passes(delta);
    if (cert.passed) return {delta, cert, true};
    double lo = delta;
    while (delta < kCap) {
        delta *= 2.0;
        cert = passes(delta);
        if (cert.passed) break;
        lo = delta;
    }
    if (!cert.passed) return {delta, cert, false};
    // Bisect down to 5% relative width, keeping the smallest passing delta.
    double hi = delta;
    SimulationCertificate hi_cert = cert;
    while ((hi - lo) > 0.05 * hi) {
        const double mid = 0.5 * (lo + hi);
        const SimulationCertificate c = passes(mid);
        if (c.passed) {
            hi = mid;
            hi_cert = c;
        } else {
            lo = mid;
        }
    }
    return {hi, hi_cert, true};
}

// ------------------------------------------------- transformed-path wiring

inline HamiltonianPath make_reduction_i_path(
    HamiltonianPath base, int s, double M, double eps, double delta,
    std::optional<InteractionConstraint> constraint = std::nullopt) {
    HamiltonianPath h;
    h.kind = HamiltonianPath::Kind::Transformed;
    const SparseSymmetricOperator probe = eval_path(base, base.t_min());
    h.descriptor = ReductionDescriptor{"I", probe.num_qubits(), s, M, eps, delta};
    h.base = std::make_shared<HamiltonianPath>(std::move(base));
    h.transform = [s, M, eps, delta, constraint](const SparseSymmetricOperator& K) {
        return reduce_sparse_to_hypercube(K, s, M, eps, delta, constraint).combined();
    };
    return h;
}

inline HamiltonianPath make_reduction_ii_path(HamiltonianPath base, double M, double eps,
                                              double delta, double m_scale) {
    HamiltonianPath h;
    h.kind = HamiltonianPath::Kind::Transformed;
    const SparseSymmetricOperator probe = eval_path(base, base.t_min());
    h.descriptor = ReductionDescriptor{"II", probe.num_qubits(), 0, M, eps, delta};
    h.base = std::make_shared<HamiltonianPath>(std::move(base));
    h.transform = [M, eps, delta, m_scale](const SparseSymmetricOperator& K) {
        return reduce_hypercube_to_tfd(K, M, eps, delta, m_scale).combined();
    };
    return h;
}

// Wires transforms into a deserialized path from its descriptors. Stage II
// uses M as the m_scale (a valid penalty scale whenever m <= M).
inline void install_transforms(HamiltonianPath& path) {
    if (path.kind != HamiltonianPath::Kind::Transformed) return;
    if (!path.base) throw std::runtime_error("transformed path without base");
    install_transforms(*path.base);
    if (path.transform) return;
    const ReductionDescriptor d = path.descriptor.value();
    if (d.stage == "I") {
        path.transform = [d](const SparseSymmetricOperator& K) {
            return reduce_sparse_to_hypercube(K, d.s, d.M, d.eps, d.delta).combined();
        };
    } else {
        path.transform = [d](const SparseSymmetricOperator& K) {
            return reduce_hypercube_to_tfd(K, d.M, d.eps, d.delta, d.M).combined();
        };
    }
}

}  // namespace stoqsim
