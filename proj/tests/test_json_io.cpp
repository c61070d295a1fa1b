#include <catch2/catch_amalgamated.hpp>

#include "stoqsim/json_io.hpp"
#include "stoqsim/reductions.hpp"

using namespace stoqsim;

TEST_CASE("operator JSON round trip") {
    SparseSymmetricOperator H(2);
    H.set(0, 0, -0.25);
    H.set(1, 2, -1.5);
    const json j = to_json(H);
    const auto back = operator_from_json(j);
    REQUIRE(back.num_qubits() == 2);
    REQUIRE(back.entries() == H.entries());
}

TEST_CASE("operator JSON rejects malformed files") {
    REQUIRE_THROWS_AS(operator_from_json(json::parse(R"({"n":1,"entries":[[1,0,1.0]]})")),
                      std::invalid_argument);  // i > j
    REQUIRE_THROWS_AS(operator_from_json(json::parse(R"({"n":1,"entries":[[0,1,0.0]]})")),
                      std::invalid_argument);  // stored zero
    REQUIRE_THROWS_AS(
        operator_from_json(json::parse(R"({"n":1,"entries":[[0,1,1.0],[0,1,2.0]]})")),
        std::invalid_argument);  // duplicate
}

TEST_CASE("diagonal JSON round trip") {
    DiagonalOperator D(1);
    D.values = {-0.5, -0.25};
    const auto back = diagonal_from_json(to_json(D));
    REQUIRE(back.values == D.values);
    REQUIRE_THROWS_AS(diagonal_from_json(json::parse(R"({"n":1,"values":[1.0]})")),
                      std::invalid_argument);
}

TEST_CASE("pauli JSON round trip keeps the constant") {
    PauliTermList p;
    p.num_qubits = 2;
    p.constant = 2.5;
    p.terms.push_back({-1.0, {{0, PauliAxis::X}}});
    p.terms.push_back({0.5, {{0, PauliAxis::Z}, {1, PauliAxis::Z}}});
    const auto back = pauli_from_json(to_json(p));
    REQUIRE(back.constant == 2.5);
    REQUIRE(back.terms.size() == 2);
    REQUIRE((build_from_pauli(back) - build_from_pauli(p)).max_abs_entry() == 0.0);
}

TEST_CASE("path JSON round trip, piecewise and transformed") {
    SparseSymmetricOperator A(1), B(1);
    A.set(0, 1, -1.0);
    B.set(0, 0, -1.0);
    B.set(1, 1, 1.0);
    PiecewiseLinearPath base;
    base.breakpoints.emplace_back(0.0, A);
    base.breakpoints.emplace_back(1.0, B);

    SECTION("piecewise") {
        const auto back = path_from_json(to_json(base));
        REQUIRE(back.kind == HamiltonianPath::Kind::Piecewise);
        REQUIRE((eval_path(back, 0.5) - eval_path(base, 0.5)).max_abs_entry() < 1e-15);
    }
    SECTION("transformed: descriptor survives and transforms re-install") {
        const auto tp = make_reduction_i_path(HamiltonianPath::from_piecewise(base), 2, 2.0, 0.5, 64.0);
        auto back = path_from_json(to_json(tp));
        REQUIRE(back.kind == HamiltonianPath::Kind::Transformed);
        REQUIRE(back.descriptor->stage == "I");
        REQUIRE_FALSE(static_cast<bool>(back.transform));
        install_transforms(back);
        const auto direct = eval_path(tp, 0.25);
        const auto loaded = eval_path(back, 0.25);
        REQUIRE((direct - loaded).max_abs_entry() < 1e-12);
    }
}

TEST_CASE("certificate JSON carries every field") {
    SimulationCertificate c;
    c.eps_enc_measured = 0.1;
    c.eps_measured = 0.2;
    c.gap_target = 0.3;
    c.gap_sim = 0.4;
    c.passed = true;
    c.gap_ok = false;
    c.eps_enc_requested = 0.5;
    c.eps_requested = 0.5;
    const json j = to_json(c);
    REQUIRE(j.at("eps_enc_measured") == 0.1);
    REQUIRE(j.at("gap_ok") == false);
    REQUIRE(j.at("passed") == true);
    REQUIRE(j.at("eps_requested") == 0.5);
}

TEST_CASE("format_double produces shortest round-trip decimals") {
    REQUIRE(format_double(0.5) == "0.5");
    REQUIRE(format_double(-1.0) == "-1");
    REQUIRE(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("fnv1a64 matches reference values") {
    REQUIRE(fnv1a64("") == 14695981039346656037ULL);
    REQUIRE(fnv1a64("a") == 12638187200555641996ULL);
    REQUIRE(fnv1a64("hello") == 11831194017420414025ULL);
}
