// stoqsim: batch CLI for building instances, running the reduction chain,
// scanning gaps, certifying simulations, and running evolutions.
//
// Commands: gen, reduce-i, reduce-ii, linearize, assemble, gapscan, certify,
//           evolve, qhd, tosdg.
// Shared flags: --config <file>, --out <dir>, --seed <int>, --format json|csv.
// Exit codes: 0 pass, 1 check-fail, 2 usage/config error.

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stoqsim/clock.hpp"
#include "stoqsim/continuous.hpp"
#include "stoqsim/dynamics.hpp"
#include "stoqsim/generators.hpp"
#include "stoqsim/json_io.hpp"
#include "stoqsim/oracle.hpp"
#include "stoqsim/operators.hpp"
#include "stoqsim/reductions.hpp"
#include "stoqsim/spectral.hpp"

namespace fs = std::filesystem;
using namespace stoqsim;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitUsage = 2;

struct Emitter {
    fs::path out_dir;
    std::map<std::string, std::string> digests;

    void write(const std::string& name, const std::string& content) {
        fs::create_directories(out_dir);
        write_text_file((out_dir / name).string(), content);
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        digests[name] = hex;
    }

    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    void finalize() {
        json m;
        for (const auto& [k, v] : digests) m["files"][k] = v;
        write_text_file((out_dir / "manifest.json").string(), m.dump(2) + "\n");
    }
};

void reject_unknown_keys(const json& cfg, const std::vector<std::string>& allowed) {
    for (const auto& [key, _] : cfg.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument("unknown config key: " + key);
}

std::string gapscan_csv(const GapScanResult& res) {
    std::string csv = "t,mu0,gap\n";
    for (const auto& e : res.entries)
        csv += format_double(e.t) + "," + format_double(e.mu0) + "," + format_double(e.gap) + "\n";
    return csv;
}

HamiltonianPath load_path(const std::string& file) {
    HamiltonianPath p = path_from_json(load_json_file(file));
    install_transforms(p);
    return p;
}

int cmd_gen(const json& cfg, std::uint64_t seed, Emitter& em) {
    reject_unknown_keys(cfg, {"n", "s", "M", "segments"});
    const auto gen = random_sparse_stoquastic_path(
        cfg.at("n").get<int>(), cfg.at("s").get<int>(), cfg.at("M").get<double>(),
        cfg.value("segments", 1), seed);
    em.write_json("path.json", to_json(gen.path));
    json edges = json::array();
    for (const auto& [x, y] : gen.constraint.edges) edges.push_back({x, y});
    em.write_json("constraint.json",
                  json{{"n", gen.constraint.num_qubits}, {"edges", std::move(edges)}});
    return kExitPass;
}

int cmd_reduce_i(const json& cfg, Emitter& em) {
    reject_unknown_keys(cfg, {"operator", "s", "M", "eps", "delta"});
    const SparseSymmetricOperator K = operator_from_json(load_json_file(cfg.at("operator")));
    const auto out = reduce_sparse_to_hypercube(K, cfg.at("s").get<int>(),
                                                cfg.at("M").get<double>(),
                                                cfg.value("eps", 0.5), cfg.at("delta").get<double>());
    em.write_json("h0.json", to_json(out.H0));
    em.write_json("vmain.json", to_json(out.Vmain));
    em.write_json("vextra.json", to_json(out.Vextra));
    em.write_json("combined.json", to_json(out.combined()));
    em.write_json("encoding.json", json{{"map", out.encoding}});
    return kExitPass;
}

int cmd_reduce_ii(const json& cfg, Emitter& em) {
    reject_unknown_keys(cfg, {"operator", "M", "eps", "delta", "m_scale"});
    const SparseSymmetricOperator K = operator_from_json(load_json_file(cfg.at("operator")));
    const double M = cfg.at("M").get<double>();
    const auto out = reduce_hypercube_to_tfd(K, M, cfg.value("eps", 0.5),
                                             cfg.at("delta").get<double>(),
                                             cfg.value("m_scale", M));
    em.write_json("x_part.json", to_json(out.X_part));
    em.write_json("d_part.json", to_json(out.D_part));
    em.write_json("combined.json", to_json(out.combined()));
    em.write_json("encoding.json", json{{"map", out.encoding}});
    return kExitPass;
}

int cmd_linearize(const json& cfg, Emitter& em) {
    reject_unknown_keys(cfg, {"assembly", "t"});
    const LinearAssembly a = assembly_from_json(load_json_file(cfg.at("assembly")));
    const double t = cfg.at("t").get<double>();
    em.write_json("h_c.json", to_json(linearize(a, t)));
    return kExitPass;
}

int cmd_assemble(const json& cfg, Emitter& em) {
    reject_unknown_keys(cfg, {"assembly"});
    const LinearAssembly a = assembly_from_json(load_json_file(cfg.at("assembly")));
    const FinalAssembly f = assemble_final(a);
    em.write_json("h_tfi.json", to_json(f.h_tfi));
    em.write_json("d_final.json", to_json(f.d_final));
    em.write_json("final_path.json", to_json(f.path));
    em.write_json("assemble_report.json",
                  json{{"ground_index", f.ground_index},
                       {"product_state_distance", f.product_state_distance}});
    return kExitPass;
}

int cmd_gapscan(const json& cfg, const std::string& format, Emitter& em) {
    reject_unknown_keys(cfg, {"path", "samples"});
    const HamiltonianPath p = load_path(cfg.at("path"));
    const GapScanResult res = gap_scan(p, cfg.value("samples", 101));
    if (format == "csv") {
        em.write("gapscan.csv", gapscan_csv(res));
    } else {
        json rows = json::array();
        for (const auto& e : res.entries) rows.push_back({{"t", e.t}, {"mu0", e.mu0}, {"gap", e.gap}});
        em.write_json("gapscan.json", json{{"entries", std::move(rows)},
                                           {"min_gap", res.min_gap},
                                           {"argmin_t", res.argmin_t}});
    }
    return kExitPass;
}

int cmd_certify(const json& cfg, Emitter& em) {
    reject_unknown_keys(cfg, {"target", "sim", "encoding", "eps_enc", "eps"});
    const SparseSymmetricOperator H = operator_from_json(load_json_file(cfg.at("target")));
    const SparseSymmetricOperator Hsim = operator_from_json(load_json_file(cfg.at("sim")));
    const std::vector<Index> enc = load_json_file(cfg.at("encoding")).at("map").get<std::vector<Index>>();
    const SimulationCertificate cert =
        verify_simulation(H, Hsim, encoding_matrix(enc, Hsim.dim()),
                          cfg.at("eps_enc").get<double>(), cfg.at("eps").get<double>());
    em.write_json("certificate.json", to_json(cert));
    return cert.passed ? kExitPass : kExitCheckFail;
}

int cmd_evolve(const json& cfg, std::uint64_t seed, Emitter& em) {
    reject_unknown_keys(cfg, {"path", "T", "steps", "initial", "target", "shots", "stride"});
    EvolutionSpec spec;
    spec.path = load_path(cfg.at("path"));
    spec.T = cfg.at("T").get<double>();
    spec.steps = cfg.at("steps").get<int>();
    const SparseSymmetricOperator H0 = eval_path(spec.path, spec.path.t_min());
    const Index dim = H0.dim();
    if (cfg.value("initial", std::string("uniform")) == "uniform") {
        spec.initial = VectorXcd::Constant(dim, Complex(1.0 / std::sqrt(double(dim)), 0));
    } else if (cfg.at("initial") == "ground") {
        spec.initial = lowest_eigenpairs(H0, 1).vectors.col(0).cast<Complex>();
    } else {
        spec.initial = VectorXcd::Zero(dim);
        spec.initial[cfg.at("initial").get<Index>()] = 1.0;
    }

    std::string csv = "step,t,energy,ground_overlap\n";
    EvolutionObserver obs;
    obs.stride = cfg.value("stride", std::max(1, spec.steps / 50));
    obs.callback = [&](int step, double t, const VectorXcd& psi) {
        const SparseSymmetricOperator H = eval_path(spec.path, t);
        Eigen::VectorXd hr, hi;
        H.apply(psi.real(), hr);
        H.apply(psi.imag(), hi);
        const double energy = psi.real().dot(hr) + psi.imag().dot(hi);
        const Eigen::VectorXd g = lowest_eigenpairs(H, 1).vectors.col(0);
        const double ov = std::norm(g.cast<Complex>().dot(psi));
        csv += std::to_string(step) + "," + format_double(t) + "," + format_double(energy) +
               "," + format_double(ov) + "\n";
    };
    const VectorXcd final_state = evolve(spec, obs);
    em.write("evolution.csv", csv);

    json report{{"norm_drift", std::abs(final_state.norm() - 1.0)}};
    bool ok = true;
    if (cfg.contains("target")) {
        VectorXcd target = VectorXcd::Zero(dim);
        target[cfg.at("target").get<Index>()] = 1.0;
        const double f = fidelity(final_state, target);
        report["fidelity"] = f;
        ok = ok && f >= 0.9;
    }
    if (cfg.contains("shots")) {
        const auto hist = measure(final_state, cfg.at("shots").get<int>(), seed);
        json h = json::object();
        for (std::size_t k = 0; k < hist.size(); ++k)
            if (hist[k] > 0) h[std::to_string(k)] = hist[k];
        report["histogram"] = std::move(h);
    }
    em.write_json("evolve_report.json", report);
    return ok ? kExitPass : kExitCheckFail;
}

int cmd_qhd(const json& cfg, Emitter& em) {
    reject_unknown_keys(cfg, {"H_prob", "a", "lambda0", "w", "lambda_max", "m", "samples"});
    const DiagonalOperator hp = diagonal_from_json(cfg.at("H_prob"));
    ScheduleParams p;
    p.lambda0 = cfg.value("lambda0", 15.0);
    p.w = cfg.value("w", 0.25);
    p.a = cfg.at("a").get<std::vector<double>>();
    p.D_TFI = hp;  // the QHD instance's diagonal drives both g and f
    std::vector<Grid1D> grids(hp.num_qubits, Grid1D{cfg.value("m", 256)});
    const QhdPath path(hp, p, grids, cfg.at("lambda_max").get<double>());

    const int samples = cfg.value("samples", 9);
    const Eigen::VectorXd f = path.objective_diag();
    const double f_min = f.minCoeff();
    std::string csv = "t,lambda,nu,phi,mu0,gap,f_expectation\n";
    double final_gap_to_min = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double lam =
            p.lambda0 + (cfg.at("lambda_max").get<double>() - p.lambda0) * k / (samples - 1);
        const SchedulePoint s = path.point_at_lambda(lam);
        const TensorGridOperator op = path.at_lambda(lam);
        const EigenSolution es = grid_lowest_eigenpairs(op, 2);
        const Eigen::VectorXd g = es.vectors.col(0);
        const double f_exp = g.dot(f.asDiagonal() * g);
        final_gap_to_min = f_exp - f_min;
        csv += format_double(s.t) + "," + format_double(lam) + "," + format_double(s.nu) + "," +
               format_double(s.phi) + "," + format_double(es.values[0]) + "," +
               format_double(es.values[1] - es.values[0]) + "," + format_double(f_exp) + "\n";
    }
    em.write("qhd_sweep.csv", csv);
    em.write_json("qhd_report.json", json{{"Lambda0", path.params().Lambda0},
                                          {"t_max", path.t_max()},
                                          {"f_min", f_min},
                                          {"final_f_above_min", final_gap_to_min}});
    return kExitPass;
}

int cmd_tosdg(const json& cfg, Emitter& em) {
    reject_unknown_keys(cfg, {"D", "a", "lambda", "m", "w"});
    const DiagonalOperator D = diagonal_from_json(cfg.at("D"));
    std::vector<Grid1D> grids(D.num_qubits, Grid1D{cfg.value("m", 2048)});
    const TosdgReport r =
        verify_tosdg(cfg.at("a").get<std::vector<double>>(), D,
                     cfg.at("lambda").get<double>(), grids, cfg.value("w", 0.25));
    em.write_json("tosdg_report.json",
                  json{{"lambda", r.lambda},
                       {"Lambda", r.Lambda},
                       {"mu0_hat", r.mu0_hat},
                       {"mu1_hat", r.mu1_hat},
                       {"mu0_qubit", r.mu0_qubit},
                       {"mu1_qubit", r.mu1_qubit},
                       {"shift_sum", r.shift_sum},
                       {"energy_mismatch", r.energy_mismatch},
                       {"gap_hat", r.gap_hat},
                       {"gap_bound", r.gap_bound},
                       {"eps_hat", r.eps_hat},
                       {"overlap", r.overlap}});
    return r.overlap > 0.5 ? kExitPass : kExitCheckFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stoqsim: stoquastic Hamiltonian path reductions and verification"};
    app.require_subcommand(1);

    std::string config_file, out_dir = ".", format = "json";
    std::uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("--config", config_file, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });
    app.add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));

    const std::vector<std::string> names = {"gen",     "reduce-i", "reduce-ii", "linearize",
                                            "assemble", "gapscan",  "certify",   "evolve",
                                            "qhd",      "tosdg"};
    for (const auto& n : names) app.add_subcommand(n)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        json cfg = config_file.empty() ? json::object() : load_json_file(config_file);
        if (cmd == "gen" && !seed_set)
            throw std::invalid_argument("gen requires --seed");
        Emitter em{fs::path(out_dir), {}};
        int rc = kExitUsage;
        if (cmd == "gen") rc = cmd_gen(cfg, seed, em);
        else if (cmd == "reduce-i") rc = cmd_reduce_i(cfg, em);
        else if (cmd == "reduce-ii") rc = cmd_reduce_ii(cfg, em);
        else if (cmd == "linearize") rc = cmd_linearize(cfg, em);
        else if (cmd == "assemble") rc = cmd_assemble(cfg, em);
        else if (cmd == "gapscan") rc = cmd_gapscan(cfg, format, em);
        else if (cmd == "certify") rc = cmd_certify(cfg, em);
        else if (cmd == "evolve") rc = cmd_evolve(cfg, seed, em);
        else if (cmd == "qhd") rc = cmd_qhd(cfg, em);
        else if (cmd == "tosdg") rc = cmd_tosdg(cfg, em);
        em.finalize();
        return rc;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFail;
    }
}
