/*
 * qsplit command line: check, split and gen.
 *
 *   qsplit check <file> [--tol R] [--report PATH] [--jobs N]
 *   qsplit split <file> [--tol R] [--depth K] [--report PATH] [--jobs N]
 *   qsplit gen <kind> [--seed N] [--out PATH] [--depth K] [--explicit]
 *
 * Exit codes: 0 pass, 1 verification failure, 2 input error.
 */
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qsplit/scenario.hpp"

using namespace qsplit;

namespace {

int emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "qsplit: cannot write " << path << "\n";
        return 2;
    }
    out << text;
    return 0;
}

// Scenario loading is input handling: anything thrown there is exit code 2.
std::optional<Scenario> load(const std::string& file) {
    try {
        return scenario_parse(file);
    } catch (const Error& e) {
        std::cerr << "qsplit: " << file << ": " << e.what() << "\n";
        return std::nullopt;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Q-system checks and splittings over towers of finite semisimple categories"};
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs", jobs, "parallel level verification")->check(CLI::PositiveNumber);

    std::string file, report;
    std::optional<double> tol;
    int depth = -1;

    auto* check = app.add_subcommand("check", "verify the Q-system axioms, stability and functional calculus");
    check->add_option("file", file, "scenario JSON")->required();
    check->add_option("--tol", tol, "numerical tolerance eps_num");
    check->add_option("--report", report, "write the JSON report here instead of stdout");
    check->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

    auto* split = app.add_subcommand("split", "split Q through the tower of algebras and certify the result");
    split->add_option("file", file, "scenario JSON")->required();
    split->add_option("--tol", tol, "numerical tolerance eps_num");
    split->add_option("--depth", depth, "certify levels l .. depth-1");
    split->add_option("--report", report, "write the certificate here instead of stdout");
    split->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

    std::string kind, out;
    std::uint64_t seed = 1;
    int n = -1, l0 = -1;
    bool explicit_form = false;
    auto* gen = app.add_subcommand("gen", "write a fixture scenario");
    gen->add_option("kind", kind, "trivial, amp2, amp3, fib, forced_l2 (or amp / forced_l with --n / --l0)")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", out, "output path (stdout if omitted)");
    gen->add_option("--depth", depth, "tower depth K");
    gen->add_option("--n", n, "multiplicity for amp");
    gen->add_option("--l0", l0, "stability level for forced_l");
    gen->add_flag("--explicit", explicit_form, "write every component of Q instead of generator parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*gen) {
        try {
            const Scenario s = scenario_generate(fixture_spec_for(kind, seed, depth, n, l0));
            return emit(scenario_to_text(s, explicit_form), out);
        } catch (const Error& e) {
            std::cerr << "qsplit gen: " << e.what() << "\n";
            return 2;
        }
    }

    const auto s = load(file);
    if (!s) return 2;
    TolerancePolicy policy;
    try {
        policy = resolve_tolerance(*s, tol);
    } catch (const Error& e) {
        std::cerr << "qsplit: " << e.what() << "\n";
        return 2;
    }

    CommandResult r;
    try {
        r = *check ? cmd_check(*s, policy, jobs) : cmd_split(*s, policy, depth, jobs);
    } catch (const Error& e) {
        std::cerr << "qsplit: " << e.what() << "\n";
        return e.code() == ErrorCode::ParameterOutOfRange ? 2 : 1;
    }
    if (const int w = emit(r.report, report); w != 0) return w;
    if (!report.empty()) std::cout << (r.exit_code == 0 ? "PASS " : "FAIL ") << s->name << "\n";
    return r.exit_code;
}
