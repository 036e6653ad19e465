#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qubolin/drivers.hpp"
#include "qubolin/instance.hpp"
#include "qubolin/text_io.hpp"

namespace qubolin {

enum class Algorithm { square, rhombus, block };

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::square: return "square";
        case Algorithm::rhombus: return "rhombus";
        case Algorithm::block: return "block";
    }
    return "unknown";
}

struct GeneratorSpec {
    std::size_t n = 0;
    double lo = 0.0;
    double hi = 1.0;
    std::uint64_t seed = 0;
};

/// One experiment: an instance source, an algorithm, iteration parameters and
/// an optional sweep over shrink factors c. Each (algorithm, c) pair yields
/// one CSV `<name>_<algo>_c<value>.csv` plus the final iterate
/// `<same stem>.x.txt`; a summary file collects final f per run.
struct ExperimentConfig {
    std::optional<std::string> matrix_path;
    std::optional<std::string> rhs_path;
    std::optional<GeneratorSpec> generator;
    std::optional<std::string> x0_path;  // zero vector when absent

    Algorithm algorithm = Algorithm::rhombus;
    IterationParams params;
    std::vector<std::size_t> composition;  // block algorithm only
    SolverSpec solver;
    std::vector<double> sweep_c;  // empty: single run at params.c

    std::string output_dir = ".";
    std::string run_name = "run";
    bool timing_in_csv = false;  // keep CSVs byte-identical by default
    bool emit_svg = false;
    std::size_t jobs = 1;  // parallel sweep points
};

struct RunResult {
    std::string name;
    bool ok = false;
    std::string error;
    double final_f = 0.0;
    std::size_t iters = 0;
    double elapsed_ms = 0.0;
    std::string csv_path;
};

inline void write_report_csv(std::ostream& out, const SolveReport& report, bool timing = false) {
    out << "iter,L,f,elapsed_ms\n";
    for (const IterationRecord& rec : report.iterations) {
        out << rec.iteration << ',' << detail::format_double(rec.l) << ','
            << detail::format_double(rec.f_value) << ',';
        if (timing) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", rec.elapsed_ms);
            out << buf;
        } else {
            out << '0';
        }
        out << '\n';
    }
}

struct CsvRow {
    std::size_t iter;
    double l;
    double f;
    double elapsed_ms;
};

inline std::vector<CsvRow> read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("iter,L,f,elapsed_ms", 0) != 0)
        throw std::runtime_error("bad CSV header in " + path);
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CsvRow row{};
        char* end = nullptr;
        const char* s = line.c_str();
        row.iter = std::strtoull(s, &end, 10);
        if (*end != ',') throw std::runtime_error("bad CSV row in " + path + ": " + line);
        row.l = std::strtod(end + 1, &end);
        if (*end != ',') throw std::runtime_error("bad CSV row in " + path + ": " + line);
        row.f = std::strtod(end + 1, &end);
        if (*end != ',') throw std::runtime_error("bad CSV row in " + path + ": " + line);
        row.elapsed_ms = std::strtod(end + 1, &end);
        rows.push_back(row);
    }
    return rows;
}

/// Minimal log-scaled convergence chart; convenience output only, the CSV is
/// the product.
inline void write_convergence_svg(const std::string& path, const std::vector<CsvRow>& rows,
                                  const std::string& title) {
    auto out = detail::open_out(path);
    const double width = 640.0, height = 400.0, margin = 50.0;
    double fmin = 1e300, fmax = 1e-300;
    for (const CsvRow& r : rows) {
        const double f = std::max(r.f, 1e-300);
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
    }
    if (rows.empty()) fmin = fmax = 1.0;
    const double log_lo = std::floor(std::log10(fmin));
    const double log_hi = std::ceil(std::log10(fmax)) + (fmin == fmax ? 1.0 : 0.0);
    const double iter_max = rows.empty() ? 1.0 : static_cast<double>(rows.back().iter);

    auto sx = [&](double it) { return margin + (width - 2 * margin) * it / std::max(iter_max, 1.0); };
    auto sy = [&](double f) {
        const double t = (std::log10(std::max(f, 1e-300)) - log_lo) / std::max(log_hi - log_lo, 1e-12);
        return height - margin - (height - 2 * margin) * t;
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    for (double d = log_lo; d <= log_hi; d += std::max(1.0, std::floor((log_hi - log_lo) / 8))) {
        out << "<text x=\"" << margin - 6 << "\" y=\"" << sy(std::pow(10.0, d)) + 4
            << "\" text-anchor=\"end\" font-size=\"10\">1e" << static_cast<long long>(d)
            << "</text>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const CsvRow& r : rows) out << sx(static_cast<double>(r.iter)) << ',' << sy(r.f) << ' ';
    out << "\"/>\n</svg>\n";
}

namespace detail {

inline std::string format_c_value(double c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", c);
    return buf;
}

inline LinearSystem load_instance(const ExperimentConfig& cfg) {
    if (cfg.generator) {
        const GeneratorSpec& g = *cfg.generator;
        return random_instance(g.n, g.lo, g.hi, g.seed);
    }
    if (!cfg.matrix_path || !cfg.rhs_path)
        throw std::invalid_argument("experiment: need either a generator or matrix+rhs files");
    return LinearSystem(read_matrix(*cfg.matrix_path), read_vector(*cfg.rhs_path));
}

}  // namespace detail

/// Runs every sweep point of the config. Per-run failures are reported in the
/// results and the summary without aborting sibling runs.
inline std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
    if ((cfg.algorithm == Algorithm::block) != !cfg.composition.empty())
        throw std::invalid_argument("experiment: composition must be given exactly for the block algorithm");
    for (double c : cfg.sweep_c)
        if (!(c > 1.0)) throw std::invalid_argument("experiment: sweep c values must be > 1");

    const LinearSystem sys = detail::load_instance(cfg);
    Vector x0(sys.size(), 0.0);
    if (cfg.x0_path) {
        x0 = read_vector(*cfg.x0_path);
        if (x0.size() != sys.size())
            throw std::invalid_argument("experiment: x0 length does not match the system");
    }

    std::vector<double> cs = cfg.sweep_c;
    if (cs.empty()) cs.push_back(cfg.params.c);

    std::filesystem::create_directories(cfg.output_dir);
    std::vector<RunResult> results(cs.size());

    auto run_one = [&](std::size_t idx) {
        const double c = cs[idx];
        RunResult& res = results[idx];
        res.name = cfg.run_name + "_" + to_string(cfg.algorithm) + "_c" + detail::format_c_value(c);
        const auto stem = std::filesystem::path(cfg.output_dir) / res.name;
        res.csv_path = (stem.string() + ".csv");
        try {
            IterationParams params = cfg.params;
            params.c = c;
            const auto t0 = std::chrono::steady_clock::now();
            SolveReport report;
            switch (cfg.algorithm) {
                case Algorithm::square:
                    report = solve_square(sys, x0, params, cfg.solver);
                    break;
                case Algorithm::rhombus:
                    report = solve_rhombus(sys, x0, params);
                    break;
                case Algorithm::block:
                    report = solve_block(sys, x0, params, cfg.composition, cfg.solver);
                    break;
            }
            const std::chrono::duration<double, std::milli> dt =
                std::chrono::steady_clock::now() - t0;

            {
                auto out = detail::open_out(res.csv_path);
                write_report_csv(out, report, cfg.timing_in_csv);
            }
            write_vector(stem.string() + ".x.txt", report.x_star);
            if (cfg.emit_svg)
                write_convergence_svg(stem.string() + ".svg", read_report_csv(res.csv_path),
                                      res.name);
            res.ok = true;
            res.final_f = report.final_f();
            res.iters = report.iterations.size();
            res.elapsed_ms = dt.count();
        } catch (const std::exception& e) {
            res.ok = false;
            res.error = e.what();
        }
    };

    if (cfg.jobs > 1 && cs.size() > 1) {
        std::vector<std::future<void>> futures;
        for (std::size_t i = 0; i < cs.size(); ++i)
            futures.push_back(std::async(std::launch::async, run_one, i));
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < cs.size(); ++i) run_one(i);
    }

    const auto summary_path =
        std::filesystem::path(cfg.output_dir) / (cfg.run_name + "_summary.txt");
    auto out = detail::open_out(summary_path.string());
    for (const RunResult& r : results) {
        out << "name=" << r.name << " final_f=" << detail::format_double(r.final_f)
            << " iters=" << r.iters << " status=";
        if (r.ok) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", r.elapsed_ms);
            out << "ok elapsed_ms=" << buf;
        } else {
            out << "error:" << r.error;
        }
        out << '\n';
    }
    return results;
}

struct CheckResult {
    bool ok = false;
    double f_csv = 0.0;
    double f_replayed = 0.0;
    std::string message;
};

/// Replays the final iterate of a report: recomputes ‖A·x − b‖² from the
/// `.x.txt` companion of the CSV and compares it with the last CSV f value
/// (1e-9 relative).
inline CheckResult check_report(const std::string& csv_path, const std::string& matrix_path,
                                const std::string& rhs_path, std::string x_path = "") {
    if (x_path.empty()) {
        std::filesystem::path p(csv_path);
        p.replace_extension("");  // strip .csv
        x_path = p.string() + ".x.txt";
    }
    const LinearSystem sys{read_matrix(matrix_path), read_vector(rhs_path)};
    const Vector x = read_vector(x_path);
    const auto rows = read_report_csv(csv_path);
    if (rows.empty()) throw std::runtime_error("check: report has no data rows");

    CheckResult res;
    res.f_csv = rows.back().f;
    res.f_replayed = residual_norm_sq(sys, x);
    const double scale = std::max({1.0, std::abs(res.f_csv), std::abs(res.f_replayed)});
    res.ok = std::abs(res.f_csv - res.f_replayed) <= 1e-9 * scale;
    res.message = res.ok ? "final f matches replayed iterate"
                         : "mismatch: csv=" + detail::format_double(res.f_csv) +
                               " replayed=" + detail::format_double(res.f_replayed);
    return res;
}

}  // namespace qubolin
