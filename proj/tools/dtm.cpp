#include <dtm/engine.hpp>
#include <dtm/error.hpp>
#include <dtm/problem_file.hpp>
#include <dtm/report.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, parse_error = 1, invalid = 2, engine_error = 3, compare_failed = 4 };

enum class Command { info, solve, eval, compare };

struct Options {
    std::optional<int> order;
    bool json = false;
    bool strict = false;
    bool unchecked = false;
    std::vector<double> at;
    double h = 1e-3;
    int samples = 101;
    std::vector<double> interval;
};

int run_info(const dtm::CauchyProblem& problem, std::ostream& out) {
    const dtm::InfoReport info = dtm::build_info(problem);
    out << dtm::to_text(info, problem);
    return info.pass() ? ok : invalid;
}

int run_solve(const dtm::CauchyProblem& problem, const Options& opt, std::ostream& out, std::ostream& err) {
    const dtm::CompatibilityReport compat = dtm::check_compatibility(problem);
    if (!compat.pass) {
        if (opt.strict) {
            err << "error: initial values disagree with the initial functions at t = 0\n";
            return invalid;
        }
        err << "warning: initial values disagree with the initial functions at t = 0\n";
    }
    try {
        const dtm::TaylorSolution solution = dtm::solve(problem);
        out << (opt.json ? dtm::to_json(solution) : dtm::to_csv(solution));
    } catch (const dtm::SolveError& e) {
        out << (opt.json ? dtm::to_json(e) : dtm::to_csv(e));
        throw;
    }
    return ok;
}

int run_eval(const dtm::CauchyProblem& problem, const Options& opt, std::ostream& out) {
    if (opt.at.empty()) throw dtm::ValidationError("eval needs at least one point (--at)");
    const dtm::TaylorSolution solution = dtm::solve(problem);
    std::vector<std::vector<double>> rows;
    for (double t : opt.at) rows.push_back(dtm::evaluate_solution(solution, t, !opt.unchecked));
    out << 't';
    for (const auto& v : solution.vars) out << ',' << v;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << dtm::format_real(opt.at[i]);
        for (double v : rows[i]) out << ',' << dtm::format_real(v);
        out << '\n';
    }
    return ok;
}

int run_compare(const dtm::CauchyProblem& problem, const Options& opt, std::ostream& out) {
    dtm::CompareOptions co;
    co.h = opt.h;
    co.samples = opt.samples;
    if (!opt.interval.empty()) {
        if (opt.interval.size() != 2) throw dtm::ValidationError("--interval takes two values a,b");
        co.a = opt.interval[0];
        co.b = opt.interval[1];
    }
    const dtm::CompareReport report = dtm::run_compare(problem, co);
    out << dtm::to_text(report);
    return report.pass ? ok : compare_failed;
}

int run_file(Command cmd, const fs::path& path, const Options& opt, std::ostream& out, std::ostream& err) {
    try {
        dtm::CauchyProblem problem = dtm::load_problem(path);
        if (opt.order) problem.trunc_order = *opt.order;
        switch (cmd) {
        case Command::info: return run_info(problem, out);
        case Command::solve: return run_solve(problem, opt, out, err);
        case Command::eval: return run_eval(problem, opt, out);
        case Command::compare: return run_compare(problem, opt, out);
        }
    } catch (const dtm::ParseError& e) {
        err << path.string() << ":" << e.what() << '\n';
        return parse_error;
    } catch (const dtm::SolveError& e) {
        err << "error: " << e.what() << '\n';
        return engine_error;
    } catch (const dtm::Error& e) {
        err << "error: " << e.what() << '\n';
        return invalid;
    }
    return ok;
}

std::vector<fs::path> batch_inputs(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw dtm::ValidationError("--all expects a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".dde") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

int dispatch(Command cmd, const std::string& target, bool all, const std::string& out_path, const Options& opt) {
    std::ostringstream out;
    int code = ok;
    if (!all) {
        code = run_file(cmd, target, opt, out, std::cerr);
    } else {
        std::vector<fs::path> files;
        try {
            files = batch_inputs(target);
        } catch (const dtm::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return invalid;
        }
        struct Result {
            int code;
            std::string out;
            std::string err;
        };
        std::vector<std::future<Result>> jobs;
        for (const fs::path& f : files) {
            jobs.push_back(std::async(std::launch::async, [cmd, f, &opt] {
                std::ostringstream o, e;
                const int c = run_file(cmd, f, opt, o, e);
                return Result{c, o.str(), e.str()};
            }));
        }
        for (std::size_t i = 0; i < files.size(); ++i) {
            Result r = jobs[i].get();
            out << "== " << files[i].filename().string() << " (exit " << r.code << ")\n" << r.out;
            std::cerr << r.err;
            code = std::max(code, r.code);
        }
    }
    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return invalid;
        }
        file << out.str();
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Taylor-coefficient solver for delay differential systems"};
    app.require_subcommand(1);

    Options opt;
    std::string target;
    std::string out_path;
    bool all = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", target, "problem file, or a directory with --all")->required();
        sub->add_flag("--all", all, "process every .dde file in the directory");
        sub->add_option("--out", out_path, "write output to a file");
        sub->add_option("--order", opt.order, "override taylor_order")->check(CLI::NonNegativeNumber);
    };

    CLI::App* info = app.add_subcommand("info", "structure, validity interval and consistency checks");
    add_common(info);

    CLI::App* solve = app.add_subcommand("solve", "Taylor coefficients of the solution");
    add_common(solve);
    bool csv = false;
    auto* json_flag = solve->add_flag("--json", opt.json, "JSON output");
    solve->add_flag("--csv", csv, "CSV output (default)")->excludes(json_flag);
    solve->add_flag("--strict", opt.strict, "fail when initial values disagree with phi");

    CLI::App* eval = app.add_subcommand("eval", "evaluate the Taylor polynomials");
    add_common(eval);
    eval->add_option("--at", opt.at, "evaluation points t1,t2,...")->delimiter(',')->required();
    eval->add_flag("--unchecked", opt.unchecked, "allow points beyond the validity interval");

    CLI::App* cmp = app.add_subcommand("compare", "compare against the RK4 reference integrator");
    cmp->set_help_flag("--help", "Print this help message and exit");
    add_common(cmp);
    cmp->add_option("--h", opt.h, "oracle step")->check(CLI::PositiveNumber);
    cmp->add_option("--samples", opt.samples, "sample points")->check(CLI::Range(2, 1000000));
    cmp->add_option("--interval", opt.interval, "comparison interval a,b")->delimiter(',')->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return invalid;
    }

    Command cmd = Command::info;
    if (solve->parsed()) cmd = Command::solve;
    if (eval->parsed()) cmd = Command::eval;
    if (cmp->parsed()) cmd = Command::compare;
    return dispatch(cmd, target, all, out_path, opt);
}
