#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "qubolin/experiment.hpp"

using namespace qubolin;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("qubolin_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& name = "") const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig worked_square_config(const TempDir& dir) {
    const LinearSystem sys = oracles::worked_system();
    write_matrix(dir.str("A.txt"), sys.a);
    write_vector(dir.str("b.txt"), sys.b);

    ExperimentConfig cfg;
    cfg.matrix_path = dir.str("A.txt");
    cfg.rhs_path = dir.str("b.txt");
    cfg.algorithm = Algorithm::square;
    cfg.params = IterationParams{.l_initial = 10.0, .c = 2.0, .n_iter = 100, .r_bits = 3};
    cfg.solver.kind = SolverKind::exhaustive;
    cfg.output_dir = dir.str();
    cfg.run_name = "fig2";
    return cfg;
}

std::size_t crossing_iteration(const std::vector<CsvRow>& rows, double threshold) {
    for (const CsvRow& r : rows)
        if (r.f <= threshold) return r.iter;
    return 0;
}

}  // namespace

TEST_CASE("experiment sweep: larger c crosses the threshold earlier") {
    TempDir dir("fig2");
    ExperimentConfig cfg = worked_square_config(dir);
    cfg.sweep_c = {1.2, 1.5};

    const auto results = run_experiment(cfg);
    REQUIRE(results.size() == 2);
    for (const RunResult& r : results) {
        CHECK(r.ok);
        CHECK(r.final_f <= 1e-8);
        CHECK(fs::exists(r.csv_path));
    }

    const auto rows_12 = read_report_csv(results[0].csv_path);
    const auto rows_15 = read_report_csv(results[1].csv_path);
    REQUIRE(rows_12.size() == 100);
    REQUIRE(rows_15.size() == 100);
    const std::size_t cross_12 = crossing_iteration(rows_12, 1e-8);
    const std::size_t cross_15 = crossing_iteration(rows_15, 1e-8);
    REQUIRE(cross_12 > 0);
    REQUIRE(cross_15 > 0);
    CHECK(cross_15 < cross_12);

    const std::string summary = slurp(dir.str("fig2_summary.txt"));
    CHECK(summary.find("name=fig2_square_c1.2 final_f=") != std::string::npos);
    CHECK(summary.find("name=fig2_square_c1.5 final_f=") != std::string::npos);
    CHECK(summary.find("status=ok") != std::string::npos);
    CHECK(summary.find("elapsed_ms=") != std::string::npos);
}

TEST_CASE("rhombus experiment on a generated instance contracts steadily") {
    TempDir dir("gen");
    ExperimentConfig cfg;
    cfg.generator = GeneratorSpec{200, 0.0, 200.0, 7};
    cfg.algorithm = Algorithm::rhombus;

    const LinearSystem sys = random_instance(200, 0.0, 200.0, 7);
    cfg.params = IterationParams{.l_initial = suggest_l(sys, Vector(200, 0.0)),
                                 .c = 2.0,
                                 .n_iter = 60};
    cfg.output_dir = dir.str();
    cfg.run_name = "n200";

    const auto results = run_experiment(cfg);
    REQUIRE(results.size() == 1);  // degenerate sweep: exactly one CSV
    REQUIRE(results[0].ok);

    const auto rows = read_report_csv(results[0].csv_path);
    REQUIRE(rows.size() == 60);
    // log10 f falls by at least 1 per 10 iterations on average after iter 5
    const double lf5 = std::log10(rows[4].f);
    const double lf60 = std::log10(std::max(rows[59].f, 1e-300));
    CHECK((lf5 - lf60) / 55.0 * 10.0 >= 1.0);
}

TEST_CASE("a frozen report pins CSV values and formatting") {
    const LinearSystem sys = oracles::worked_system();
    const IterationParams params{.l_initial = 20.0, .c = 2.0, .n_iter = 3};
    const SolveReport rep = solve_rhombus(sys, {0.0, 0.0}, params);
    std::stringstream out;
    write_report_csv(out, rep);
    CHECK(out.str() ==
          "iter,L,f,elapsed_ms\n"
          "1,20,593.58893853962661,0\n"
          "2,10,73.916090891434735,0\n"
          "3,5,0.40792012093575886,0\n");
}

TEST_CASE("experiment CSVs are byte-identical across reruns") {
    TempDir dir("det");
    ExperimentConfig cfg = worked_square_config(dir);
    cfg.sweep_c = {1.5};
    cfg.run_name = "detA";
    run_experiment(cfg);
    const std::string first = slurp(dir.str("detA_square_c1.5.csv"));

    cfg.run_name = "detB";
    run_experiment(cfg);
    const std::string second = slurp(dir.str("detB_square_c1.5.csv"));
    CHECK(first == second);
    CHECK(first.rfind("iter,L,f,elapsed_ms\n", 0) == 0);
}

TEST_CASE("per-run failures are reported without aborting the sweep") {
    TempDir dir("fail");
    ExperimentConfig cfg = worked_square_config(dir);
    // N*R = 2*13 = 26 > 24: every sweep point fails in the driver, not in
    // run_experiment itself.
    cfg.params.r_bits = 13;
    cfg.sweep_c = {1.2, 1.5};
    const auto results = run_experiment(cfg);
    REQUIRE(results.size() == 2);
    for (const RunResult& r : results) {
        CHECK_FALSE(r.ok);
        CHECK(!r.error.empty());
    }
    const std::string summary = slurp(dir.str("fig2_summary.txt"));
    CHECK(summary.find("status=error:") != std::string::npos);
}

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg;
    cfg.generator = GeneratorSpec{4, 0.0, 1.0, 1};
    cfg.algorithm = Algorithm::block;  // composition missing
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg.algorithm = Algorithm::rhombus;
    cfg.composition = {2, 2};  // composition without the block algorithm
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    cfg.composition.clear();
    cfg.sweep_c = {0.9};
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    ExperimentConfig no_source;
    CHECK_THROWS_AS(run_experiment(no_source), std::invalid_argument);
}

TEST_CASE("check_report validates the companion final iterate") {
    TempDir dir("check");
    ExperimentConfig cfg = worked_square_config(dir);
    cfg.run_name = "chk";
    const auto results = run_experiment(cfg);
    REQUIRE(results.size() == 1);
    REQUIRE(results[0].ok);

    const CheckResult good =
        check_report(results[0].csv_path, dir.str("A.txt"), dir.str("b.txt"));
    CHECK(good.ok);
    CHECK(good.f_csv == Catch::Approx(good.f_replayed).margin(1e-12));

    // explicit --x path, same file
    const CheckResult explicit_x = check_report(results[0].csv_path, dir.str("A.txt"),
                                                dir.str("b.txt"), dir.str("chk_square_c2.x.txt"));
    CHECK(explicit_x.ok);

    // Corrupt the final iterate: the replay must disagree with the CSV.
    write_vector(dir.str("chk_square_c2.x.txt"), {1.0, 1.0});
    const CheckResult bad =
        check_report(results[0].csv_path, dir.str("A.txt"), dir.str("b.txt"));
    CHECK_FALSE(bad.ok);
}

TEST_CASE("svg emission writes a chart per run") {
    TempDir dir("svg");
    ExperimentConfig cfg = worked_square_config(dir);
    cfg.emit_svg = true;
    cfg.run_name = "plot";
    const auto results = run_experiment(cfg);
    REQUIRE(results[0].ok);
    const std::string svg = slurp(dir.str("plot_square_c2.svg"));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_CASE("parallel sweep points give the same artifacts as sequential runs") {
    TempDir dir("jobs");
    ExperimentConfig cfg = worked_square_config(dir);
    cfg.sweep_c = {1.2, 1.5, 2.0};
    cfg.run_name = "seq";
    run_experiment(cfg);
    cfg.run_name = "par";
    cfg.jobs = 3;
    run_experiment(cfg);
    for (const char* c : {"1.2", "1.5", "2"}) {
        CHECK(slurp(dir.str(std::string("seq_square_c") + c + ".csv")) ==
              slurp(dir.str(std::string("par_square_c") + c + ".csv")));
    }
}
