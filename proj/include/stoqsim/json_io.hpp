// JSON (de)serialization for operators, paths, descriptors and certificates,
// plus small text-output helpers shared by the CLI (17-significant-digit
// floats, CSV rows, FNV-1a content digests).
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "operators.hpp"
#include "paths.hpp"
#include "spectral.hpp"

namespace stoqsim {

using nlohmann::json;

// ---------------------------------------------------------------- operators

inline json to_json(const SparseSymmetricOperator& H) {
    json entries = json::array();
    for (const auto& [ij, v] : H.entries()) entries.push_back({ij.first, ij.second, v});
    return json{{"n", H.num_qubits()}, {"entries", std::move(entries)}};
}

inline SparseSymmetricOperator operator_from_json(const json& j) {
    SparseSymmetricOperator H(j.at("n").get<int>());
    for (const auto& e : j.at("entries")) {
        if (!e.is_array() || e.size() != 3) throw std::invalid_argument("bad operator entry");
        const Index i = e[0].get<Index>(), k = e[1].get<Index>();
        if (i > k) throw std::invalid_argument("operator entries must satisfy i <= j");
        const double v = e[2].get<double>();
        if (v == 0.0) throw std::invalid_argument("zero entries must not be stored");
        if (H.at(i, k) != 0.0) throw std::invalid_argument("duplicate operator entry");
        H.set(i, k, v);
    }
    return H;
}

inline json to_json(const DiagonalOperator& D) {
    return json{{"n", D.num_qubits}, {"values", D.values}};
}

inline DiagonalOperator diagonal_from_json(const json& j) {
    DiagonalOperator D(j.at("n").get<int>());
    const auto& vals = j.at("values");
    if (static_cast<Index>(vals.size()) != D.dim())
        throw std::invalid_argument("diagonal length != 2^n");
    for (std::size_t i = 0; i < vals.size(); ++i) D.values[i] = vals[i].get<double>();
    return D;
}

inline json to_json(const PauliTermList& p) {
    json terms = json::array();
    for (const auto& t : p.terms) {
        json factors = json::array();
        for (const auto& f : t.factors)
            factors.push_back({f.qubit, f.axis == PauliAxis::X ? "X" : "Z"});
        terms.push_back({t.coeff, std::move(factors)});
    }
    json out{{"n", p.num_qubits}, {"terms", std::move(terms)}};
    if (p.constant != 0.0) out["constant"] = p.constant;
    return out;
}

inline PauliTermList pauli_from_json(const json& j) {
    PauliTermList p;
    p.num_qubits = j.at("n").get<int>();
    p.constant = j.value("constant", 0.0);
    for (const auto& t : j.at("terms")) {
        PauliTermList::Term term;
        term.coeff = t.at(0).get<double>();
        for (const auto& f : t.at(1)) {
            const std::string ax = f.at(1).get<std::string>();
            if (ax != "X" && ax != "Z") throw std::invalid_argument("axis must be X or Z");
            term.factors.push_back({f.at(0).get<int>(), ax == "X" ? PauliAxis::X : PauliAxis::Z});
        }
        p.terms.push_back(std::move(term));
    }
    p.validate();
    return p;
}

// -------------------------------------------------------------------- paths

inline json to_json(const ReductionDescriptor& d) {
    return json{{"stage", d.stage}, {"n", d.n}, {"s", d.s},
                {"M", d.M},         {"eps", d.eps}, {"delta", d.delta}};
}

inline ReductionDescriptor descriptor_from_json(const json& j) {
    ReductionDescriptor d;
    d.stage = j.at("stage").get<std::string>();
    if (d.stage != "I" && d.stage != "II") throw std::invalid_argument("stage must be I or II");
    d.n = j.at("n").get<int>();
    d.s = j.at("s").get<int>();
    d.M = j.at("M").get<double>();
    d.eps = j.at("eps").get<double>();
    d.delta = j.at("delta").get<double>();
    return d;
}

inline json to_json(const HamiltonianPath& p) {
    if (p.kind == HamiltonianPath::Kind::Piecewise) {
        json bps = json::array();
        for (const auto& [t, H] : p.piecewise.breakpoints) bps.push_back({t, to_json(H)});
        return json{{"kind", "piecewise"}, {"breakpoints", std::move(bps)}};
    }
    if (!p.descriptor || !p.base) throw std::runtime_error("transformed path missing parts");
    return json{{"kind", "transformed"}, {"descriptor", to_json(*p.descriptor)},
                {"base", to_json(*p.base)}};
}

inline json to_json(const PiecewiseLinearPath& p) {
    return to_json(HamiltonianPath::from_piecewise(p));
}

// Loads the path structure; transformed nodes come back with an empty
// transform callable — callers wire transforms from the descriptors (the
// reductions header provides install_transforms).
inline HamiltonianPath path_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "piecewise") {
        PiecewiseLinearPath p;
        for (const auto& bp : j.at("breakpoints"))
            p.breakpoints.emplace_back(bp.at(0).get<double>(), operator_from_json(bp.at(1)));
        return HamiltonianPath::from_piecewise(std::move(p));
    }
    if (kind != "transformed") throw std::invalid_argument("unknown path kind: " + kind);
    HamiltonianPath h;
    h.kind = HamiltonianPath::Kind::Transformed;
    h.descriptor = descriptor_from_json(j.at("descriptor"));
    h.base = std::make_shared<HamiltonianPath>(path_from_json(j.at("base")));
    return h;
}

// ------------------------------------------------------------- certificates

inline json to_json(const SimulationCertificate& c) {
    return json{{"eps_enc_measured", c.eps_enc_measured},
                {"eps_measured", c.eps_measured},
                {"gap_target", c.gap_target},
                {"gap_sim", c.gap_sim},
                {"passed", c.passed},
                {"gap_ok", c.gap_ok},
                {"eps_enc_requested", c.eps_enc_requested},
                {"eps_requested", c.eps_requested}};
}

// ----------------------------------------------------------------- text I/O

// Shortest round-trip decimal for a double (<= 17 significant digits).
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
    return std::string(buf, ptr);
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline json load_json_file(const std::string& path) { return json::parse(read_text_file(path)); }

}  // namespace stoqsim
