/*
 * Fixture generation: base towers and Q-systems built as X (x) Xbar from an
 * explicitly dualized amplification 1-cell X = n.Id with randomly gauged
 * connections.
 */
#pragma once

#include <cstdint>
#include <string>

#include "qsplit/qsys.hpp"

namespace qsplit {

struct FixtureSpec {
    std::string kind = "trivial";  // trivial | amp | fib | forced_l
    int n = 1;                     // amplification of X (amp: 2 or 3)
    int depth = 3;
    std::uint64_t seed = 1;
    int l0 = 0;                    // forced_l: levels below l0 get m scaled
    double m_scale = 1.1;          // forced_l perturbation factor

    std::string name() const;
};

// Checks the documented parameter ranges (n <= 3, depth <= 5, l0 <= 2).
void validate_fixture_spec(const FixtureSpec& spec);

// Bratteli tower of the given kind: one simple with Gamma = [1] (trivial),
// one simple with Gamma = [2] (amp, forced_l), or the Fibonacci graph.
ZeroCellPtr make_base_tower(const std::string& kind, int depth);

// The amplification 1-cell X = n.Id over `base`, its dual, ev and coev.
DualityData make_amplification_pair(const ZeroCellPtr& base, int n, std::uint64_t seed, bool gauge = true);

struct Fixture {
    FixtureSpec spec;
    ZeroCellPtr base;
    DualityData pair;
    QSystem q;
};

Fixture generate_fixture(const FixtureSpec& spec);

}  // namespace qsplit
