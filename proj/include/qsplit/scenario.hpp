/*
 * scenario: the JSON scenario format, fixture files, and the check / split
 * commands behind the CLI. Complex numbers are [re, im] pairs; a morphism is
 * a list of blocks (one per simple), each a list of rows.
 *
 * A scenario names its 0-cell (labels per level, Gamma_1..Gamma_K) and a
 * q_source that is either "generated" (fixture parameters, rebuilt on load)
 * or "explicit" (the functors, connections, m and i written out).
 */
#pragma once

#include <optional>
#include <string>

#include "qsplit/fixtures.hpp"
#include "qsplit/split.hpp"

namespace qsplit {

struct Scenario {
    std::string name;
    int depth = 0;
    std::vector<std::vector<std::string>> labels;  // per level
    std::vector<IntMatrix> gammas;                 // Gamma_1 .. Gamma_K
    std::string source;                            // "generated" | "explicit"
    FixtureSpec spec;                              // when generated
    std::optional<TolerancePolicy> tol;            // from the file, if present
    ZeroCellPtr base;
    QSystem q;
};

Scenario scenario_from_text(const std::string& text);
Scenario scenario_parse(const std::string& path);

// Serialized scenario; the explicit form writes every component of Q.
std::string scenario_to_text(const Scenario& s, bool explicit_form);
Scenario scenario_generate(const FixtureSpec& spec);

// "trivial", "amp2", "amp3", "fib", "forced_l2", or a bare kind with n / l0 given.
FixtureSpec fixture_spec_for(const std::string& kind, std::uint64_t seed, int depth = -1, int n = -1, int l0 = -1);

// Precedence, lowest first: built-in default, the scenario file, QSPLIT_TOL, --tol.
TolerancePolicy resolve_tolerance(const Scenario& s, std::optional<double> flag);

struct CommandResult {
    int exit_code = 0;  // 0 pass, 1 verification failure, 2 input error
    std::string report;
};

CommandResult cmd_check(const Scenario& s, const TolerancePolicy& tol, int jobs = 1);
CommandResult cmd_split(const Scenario& s, const TolerancePolicy& tol, int depth = -1, int jobs = 1);

std::string certificate_json(const SplitResult& r, const TolerancePolicy& tol);

}  // namespace qsplit
