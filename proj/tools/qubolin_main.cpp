// Command-line front end: instance generation, the three iterative solvers,
// basis inspection, experiment sweeps and report verification.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qubolin/qubolin.hpp"

namespace {

using namespace qubolin;

struct SolverFlags {
    std::string kind = "exhaustive";
    std::uint64_t seed = 0;
    SaParams sa;
    TabuParams tabu;

    void attach(CLI::App* cmd) {
        cmd->add_option("--solver", kind, "QUBO backend: exhaustive, sa or tabu")
            ->check(CLI::IsMember({"exhaustive", "sa", "tabu"}));
        cmd->add_option("--seed", seed, "solver seed");
        cmd->add_option("--sa-sweeps", sa.sweeps, "SA sweeps per restart");
        cmd->add_option("--sa-restarts", sa.restarts, "SA restarts");
        cmd->add_option("--sa-beta-initial", sa.beta_initial, "SA initial beta (<=0: auto)");
        cmd->add_option("--sa-beta-final", sa.beta_final, "SA final beta (<=0: auto)");
        cmd->add_option("--tabu-tenure", tabu.tenure, "tabu tenure");
        cmd->add_option("--tabu-max-moves", tabu.max_moves, "tabu moves per restart");
        cmd->add_option("--tabu-restarts", tabu.restarts, "tabu restarts");
    }

    SolverSpec spec() const {
        SolverSpec s;
        if (kind == "exhaustive") s.kind = SolverKind::exhaustive;
        else if (kind == "sa") s.kind = SolverKind::simulated_annealing;
        else s.kind = SolverKind::tabu;
        s.seed = seed;
        s.sa = sa;
        s.tabu = tabu;
        return s;
    }
};

std::vector<std::size_t> parse_blocks(const std::string& text, std::size_t n) {
    std::vector<std::size_t> comp;
    if (text.rfind("uniform:", 0) == 0) {
        const long k = std::stol(text.substr(8));
        if (k < 1) throw CLI::ValidationError("--blocks", "uniform block size must be >= 1");
        std::size_t left = n;
        while (left > 0) {
            const std::size_t width = std::min<std::size_t>(left, static_cast<std::size_t>(k));
            comp.push_back(width);
            left -= width;
        }
        return comp;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        const std::string tok = text.substr(pos, next - pos);
        try {
            const long v = std::stol(tok);
            if (v < 1) throw std::invalid_argument("non-positive");
            comp.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--blocks", "bad block size '" + tok + "'");
        }
        pos = next + 1;
    }
    if (comp.empty()) throw CLI::ValidationError("--blocks", "empty block list");
    return comp;
}

std::string companion_x_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension("");
    return p.string() + ".x.txt";
}

int run_gen(std::size_t n, double lo, double hi, std::uint64_t seed,
            const std::string& out_matrix, const std::string& out_rhs) {
    const LinearSystem sys = random_instance(n, lo, hi, seed);
    write_matrix(out_matrix, sys.a);
    write_vector(out_rhs, sys.b);
    std::printf("wrote %s (%zux%zu) and %s\n", out_matrix.c_str(), n, n, out_rhs.c_str());
    return 0;
}

struct SolveFlags {
    std::string matrix, rhs, x0_file, out = "run.csv", out_x, svg;
    std::string algo = "rhombus";
    std::string blocks;
    double l = 0.0;  // 0: use suggest_l
    double c = 2.0;
    std::size_t iters = 50;
    std::size_t r_bits = 0;  // 0: per-algorithm default
    double early_stop_f = -1.0;
    bool timing_csv = false;
    SolverFlags solver;
};

int run_solve(const SolveFlags& fl) {
    const LinearSystem sys(read_matrix(fl.matrix), read_vector(fl.rhs));
    Vector x0(sys.size(), 0.0);
    if (!fl.x0_file.empty()) {
        x0 = read_vector(fl.x0_file);
        if (x0.size() != sys.size()) {
            std::fprintf(stderr, "error: x0 length %zu does not match N=%zu\n", x0.size(),
                         sys.size());
            return 1;
        }
    }

    IterationParams params;
    params.l_initial = fl.l > 0.0 ? fl.l : suggest_l(sys, x0);
    params.c = fl.c;
    params.n_iter = fl.iters;
    params.r_bits = fl.r_bits ? fl.r_bits : (fl.algo == "rhombus" ? 1 : 3);
    if (fl.early_stop_f >= 0.0) params.early_stop_f = fl.early_stop_f;

    SolveReport report;
    if (fl.algo == "square") {
        report = solve_square(sys, x0, params, fl.solver.spec());
    } else if (fl.algo == "rhombus") {
        report = solve_rhombus(sys, x0, params);
    } else {
        if (fl.blocks.empty()) {
            std::fprintf(stderr, "error: --algo block requires --blocks\n");
            return 1;
        }
        report = solve_block(sys, x0, params, parse_blocks(fl.blocks, sys.size()),
                             fl.solver.spec());
    }

    {
        auto out = qubolin::detail::open_out(fl.out);
        write_report_csv(out, report, fl.timing_csv);
    }
    const std::string x_path = fl.out_x.empty() ? companion_x_path(fl.out) : fl.out_x;
    write_vector(x_path, report.x_star);
    if (!fl.svg.empty()) write_convergence_svg(fl.svg, read_report_csv(fl.out), fl.out);

    std::printf("L0=%s iters=%zu final_f=%s converged=%d csv=%s x=%s\n",
                qubolin::detail::format_double(params.l_initial).c_str(),
                report.iterations.size(),
                qubolin::detail::format_double(report.final_f()).c_str(),
                report.converged ? 1 : 0, fl.out.c_str(), x_path.c_str());
    return 0;
}

struct BasisFlags {
    std::string matrix, blocks, out_v = "V.txt", out_c, out_block_prefix;
};

int run_basis(const BasisFlags& fl) {
    const DenseMatrix a = read_matrix(fl.matrix);
    if (fl.blocks.empty()) {
        const ConjugateBasis basis = conjugate_basis(a);
        write_matrix(fl.out_v, basis.v);
        if (!fl.out_c.empty()) write_vector(fl.out_c, basis.c);
        std::printf("wrote conjugate basis V to %s (N=%zu)\n", fl.out_v.c_str(), a.rows());
    } else {
        const BlockBasis basis = block_conjugate_basis(a, parse_blocks(fl.blocks, a.rows()));
        write_matrix(fl.out_v, basis.v);
        if (!fl.out_block_prefix.empty())
            for (std::size_t k = 0; k < basis.blocks.size(); ++k)
                write_matrix(fl.out_block_prefix + std::to_string(k) + ".txt", basis.blocks[k]);
        std::printf("wrote block basis V to %s (%zu blocks)\n", fl.out_v.c_str(),
                    basis.blocks.size());
    }
    return 0;
}

struct ExperimentFlags {
    std::string matrix, rhs, x0_file;
    std::size_t gen_n = 0;
    double gen_lo = 0.0, gen_hi = 200.0;
    std::uint64_t gen_seed = 0;
    std::string algo = "rhombus";
    std::string blocks;
    std::string c_sweep;
    double l = 0.0;
    double c = 2.0;
    std::size_t iters = 50;
    std::size_t r_bits = 0;
    double early_stop_f = -1.0;
    std::string out_dir = ".";
    std::string name = "run";
    std::size_t jobs = 1;
    bool timing_csv = false;
    bool svg = false;
    SolverFlags solver;
};

int run_experiment_cmd(const ExperimentFlags& fl) {
    ExperimentConfig cfg;
    if (fl.gen_n > 0) {
        cfg.generator = GeneratorSpec{fl.gen_n, fl.gen_lo, fl.gen_hi, fl.gen_seed};
    } else {
        if (fl.matrix.empty() || fl.rhs.empty()) {
            std::fprintf(stderr, "error: need --matrix/--rhs or --gen-n\n");
            return 1;
        }
        cfg.matrix_path = fl.matrix;
        cfg.rhs_path = fl.rhs;
    }
    if (!fl.x0_file.empty()) cfg.x0_path = fl.x0_file;

    if (fl.algo == "square") cfg.algorithm = Algorithm::square;
    else if (fl.algo == "rhombus") cfg.algorithm = Algorithm::rhombus;
    else cfg.algorithm = Algorithm::block;

    cfg.params.c = fl.c;
    cfg.params.n_iter = fl.iters;
    cfg.params.r_bits = fl.r_bits ? fl.r_bits : (fl.algo == "rhombus" ? 1 : 3);
    if (fl.early_stop_f >= 0.0) cfg.params.early_stop_f = fl.early_stop_f;
    cfg.solver = fl.solver.spec();
    cfg.output_dir = fl.out_dir;
    cfg.run_name = fl.name;
    cfg.jobs = fl.jobs;
    cfg.timing_in_csv = fl.timing_csv;
    cfg.emit_svg = fl.svg;

    if (!fl.c_sweep.empty()) {
        std::size_t pos = 0;
        while (pos < fl.c_sweep.size()) {
            std::size_t next = fl.c_sweep.find(',', pos);
            if (next == std::string::npos) next = fl.c_sweep.size();
            cfg.sweep_c.push_back(std::stod(fl.c_sweep.substr(pos, next - pos)));
            pos = next + 1;
        }
    }

    // The generator path needs N before blocks can be expanded; load once.
    std::size_t n = fl.gen_n;
    if (n == 0) {
        const DenseMatrix a = read_matrix(fl.matrix);
        n = a.rows();
    }
    if (cfg.algorithm == Algorithm::block) {
        if (fl.blocks.empty()) {
            std::fprintf(stderr, "error: --algo block requires --blocks\n");
            return 1;
        }
        cfg.composition = parse_blocks(fl.blocks, n);
    }

    // L: resolve here so every sweep point shares the same box.
    if (fl.l > 0.0) {
        cfg.params.l_initial = fl.l;
    } else {
        const LinearSystem sys = qubolin::detail::load_instance(cfg);
        Vector x0(sys.size(), 0.0);
        if (cfg.x0_path) x0 = read_vector(*cfg.x0_path);
        cfg.params.l_initial = suggest_l(sys, x0);
    }

    const auto results = run_experiment(cfg);
    bool all_ok = true;
    for (const RunResult& r : results) {
        if (r.ok) {
            std::printf("%s: final_f=%s iters=%zu csv=%s\n", r.name.c_str(),
                        qubolin::detail::format_double(r.final_f).c_str(), r.iters,
                        r.csv_path.c_str());
        } else {
            all_ok = false;
            std::printf("%s: error: %s\n", r.name.c_str(), r.error.c_str());
        }
    }
    return all_ok ? 0 : 1;
}

int run_check(const std::string& report, const std::string& matrix, const std::string& rhs,
              const std::string& x_path) {
    const CheckResult res = check_report(report, matrix, rhs, x_path);
    std::printf("%s\n", res.message.c_str());
    return res.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear-system solver via iterated QUBO encodings"};
    app.set_version_flag("--version", std::string("qubolin ") + qubolin::kVersion);
    app.set_config("--config", "", "key=value config file with [subcommand] sections; flags override");
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a seeded random instance");
    gen->fallthrough(true);
    std::size_t gen_n = 10;
    double gen_lo = 0.0, gen_hi = 200.0;
    std::uint64_t gen_seed = 0;
    std::string gen_matrix = "A.txt", gen_rhs = "b.txt";
    gen->add_option("--n", gen_n, "system size")->required();
    gen->add_option("--lo", gen_lo, "lower bound (inclusive)");
    gen->add_option("--hi", gen_hi, "upper bound (exclusive)");
    gen->add_option("--seed", gen_seed, "instance seed");
    gen->add_option("--out-matrix", gen_matrix, "matrix output path");
    gen->add_option("--out-rhs", gen_rhs, "rhs output path");

    // solve
    auto* solve = app.add_subcommand("solve", "run one iterative solve");
    solve->fallthrough(true);
    SolveFlags sf;
    solve->add_option("--matrix", sf.matrix, "matrix file")->required();
    solve->add_option("--rhs", sf.rhs, "rhs file")->required();
    solve->add_option("--x0-file", sf.x0_file, "initial guess (default: zero vector)");
    solve->add_option("--algo", sf.algo, "square, rhombus or block")
        ->check(CLI::IsMember({"square", "rhombus", "block"}));
    solve->add_option("--L", sf.l, "initial edge length (default: suggest_l)");
    solve->add_option("--c", sf.c, "shrink factor (> 1)");
    solve->add_option("--iters", sf.iters, "iteration count");
    solve->add_option("--R", sf.r_bits, "bits per coordinate (default: 1 rhombus, 3 otherwise)");
    solve->add_option("--blocks", sf.blocks, "block sizes: comma list or uniform:K");
    solve->add_option("--early-stop-f", sf.early_stop_f, "stop once f falls to this value");
    solve->add_option("--out", sf.out, "CSV report path");
    solve->add_option("--out-x", sf.out_x, "final iterate path (default: <out>.x.txt)");
    solve->add_option("--svg", sf.svg, "also write an SVG convergence chart");
    solve->add_flag("--timing-csv", sf.timing_csv,
                    "record measured per-iteration times in the CSV (breaks byte determinism)");
    sf.solver.attach(solve);

    // basis
    auto* basis = app.add_subcommand("basis", "dump the (block) conjugate basis");
    basis->fallthrough(true);
    BasisFlags bf;
    basis->add_option("--matrix", bf.matrix, "matrix file")->required();
    basis->add_option("--blocks", bf.blocks, "composition: comma list or uniform:K");
    basis->add_option("--out-v", bf.out_v, "V output path");
    basis->add_option("--out-c", bf.out_c, "C output path (full basis only)");
    basis->add_option("--out-block-prefix", bf.out_block_prefix,
                      "write blocks to <prefix><k>.txt");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a sweep and emit CSVs + summary");
    exp->fallthrough(true);
    ExperimentFlags ef;
    exp->add_option("--matrix", ef.matrix, "matrix file");
    exp->add_option("--rhs", ef.rhs, "rhs file");
    exp->add_option("--x0-file", ef.x0_file, "initial guess file");
    exp->add_option("--gen-n", ef.gen_n, "generate an instance of this size instead");
    exp->add_option("--gen-lo", ef.gen_lo, "generator lower bound");
    exp->add_option("--gen-hi", ef.gen_hi, "generator upper bound");
    exp->add_option("--gen-seed", ef.gen_seed, "generator seed");
    exp->add_option("--algo", ef.algo, "square, rhombus or block")
        ->check(CLI::IsMember({"square", "rhombus", "block"}));
    exp->add_option("--blocks", ef.blocks, "block sizes for --algo block");
    exp->add_option("--c", ef.c, "shrink factor for a single run");
    exp->add_option("--c-sweep", ef.c_sweep, "comma list of shrink factors");
    exp->add_option("--L", ef.l, "initial edge length (default: suggest_l)");
    exp->add_option("--iters", ef.iters, "iteration count");
    exp->add_option("--R", ef.r_bits, "bits per coordinate");
    exp->add_option("--early-stop-f", ef.early_stop_f, "early stop threshold");
    exp->add_option("--out-dir", ef.out_dir, "output directory");
    exp->add_option("--name", ef.name, "run name prefix");
    exp->add_option("--jobs", ef.jobs, "parallel sweep points");
    exp->add_flag("--timing-csv", ef.timing_csv, "measured times in CSVs");
    exp->add_flag("--svg", ef.svg, "emit SVG charts");
    ef.solver.attach(exp);

    // check
    auto* check = app.add_subcommand("check", "verify a CSV report against its final iterate");
    check->fallthrough(true);
    std::string ck_report, ck_matrix, ck_rhs, ck_x;
    check->add_option("--report", ck_report, "CSV report")->required();
    check->add_option("--matrix", ck_matrix, "matrix file")->required();
    check->add_option("--rhs", ck_rhs, "rhs file")->required();
    check->add_option("--x", ck_x, "final iterate (default: <report>.x.txt)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return run_gen(gen_n, gen_lo, gen_hi, gen_seed, gen_matrix, gen_rhs);
        if (solve->parsed()) return run_solve(sf);
        if (basis->parsed()) return run_basis(bf);
        if (exp->parsed()) return run_experiment_cmd(ef);
        if (check->parsed()) return run_check(ck_report, ck_matrix, ck_rhs, ck_x);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
