// Q-system axioms, stability level and the d_Q calculus on generated fixtures.
#include <doctest.h>

#include <cmath>

#include "qsplit/fixtures.hpp"

using namespace qsplit;

namespace {

FixtureSpec spec(const std::string& kind, int n = 2, int depth = 3, int l0 = 0) {
    FixtureSpec s;
    s.kind = kind;
    s.n = n;
    s.depth = depth;
    s.l0 = l0;
    s.seed = 17;
    return s;
}

}  // namespace

TEST_CASE("identity Q-system") {
    auto z = make_base_tower("fib", 3);
    const QSystem q = identity_qsystem(z);
    for (int k = 0; k <= 3; ++k) CHECK(axioms_check(q, k).max() == 0.0);
    CHECK(stability_level(q).l == 0);
    const DqData d = dq_calculus(q, 2);
    CHECK(d.d == std::vector<double>{1.0, 1.0});
    CHECK(d.nondegenerate);
}

TEST_CASE("generated fixtures satisfy the axioms at every level") {
    for (const auto& s : {spec("trivial", 1), spec("amp", 2), spec("amp", 3), spec("fib")}) {
        const Fixture f = generate_fixture(s);
        for (int k = 0; k <= s.depth; ++k) CHECK(axioms_check(f.q, k).max() < 1e-12);
        CHECK(stability_level(f.q).l == 0);
        CHECK(self_duality_residual(f.q, s.depth) < 1e-12);
    }
}

TEST_CASE("d_Q is the squared amplification and satisfies the positivity bounds") {
    for (int n = 1; n <= 3; ++n) {
        const Fixture f = generate_fixture(spec("amp", n));
        for (int k = 0; k <= 3; ++k) {
            const DqData d = dq_calculus(f.q, k);
            CHECK(d.d[0] == doctest::Approx(n * n).epsilon(1e-12));
            CHECK(d.d_inv[0] * d.d[0] == doctest::Approx(1.0));
            CHECK(d.inverse_residual < 1e-9);
            CHECK(d.projection_residual < 1e-9);
            CHECK(d.f2_lower <= 1e-9);
            CHECK(d.f2_upper <= 1e-9);
            CHECK(d.f3b <= 1e-9);
        }
    }
    const Fixture fib = generate_fixture(spec("fib"));
    const DqData d = dq_calculus(fib.q, 2);
    CHECK(d.d[0] == doctest::Approx(4.0));
    CHECK(d.d[1] == doctest::Approx(4.0));
}

TEST_CASE("scaled multiplication breaks unitality and fixes the stability level") {
    const Fixture f = generate_fixture(spec("forced_l", 2, 4, 2));
    CHECK(axioms_check(f.q, 0).unitality == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(axioms_check(f.q, 1).unitality >= 0.1 - 1e-12);
    CHECK(axioms_check(f.q, 2).max() < 1e-12);
    StabilityReport r = stability_level(f.q);
    CHECK(r.l == 2);
    CHECK_FALSE(r.report.level(1).pass);
    CHECK_THROWS_AS(dq_calculus(f.q, 1), Error);
}

TEST_CASE("a system broken at the top level is never stable") {
    Fixture f = generate_fixture(spec("amp", 2, 3));
    auto& top = f.q.m.comps[3];
    top = nat_scale(1.1, top);
    try {
        stability_level(f.q);
        FAIL("expected NeverStable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NeverStable);
    }
}

TEST_CASE("single entry perturbation is detected") {
    Fixture f = generate_fixture(spec("amp", 2, 2));
    CMatrix& b = f.q.m.comps[1].comps[0].blocks[0];
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            if (std::abs(b(i, j)) > std::abs(b(bi, bj))) bi = i, bj = j;
    b(bi, bj) *= 1.01;
    CHECK(axioms_check(f.q, 1).max() > 1e-3);
}

TEST_CASE("from_dual_pair rejects a non-separable ev") {
    auto base = make_base_tower("amp", 2);
    DualityData d = make_amplification_pair(base, 2, 1);
    d.ev.comps[1] = nat_scale(2.0, d.ev.comps[1]);
    try {
        from_dual_pair(d);
        FAIL("expected NotSeparable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSeparable);
    }
}

namespace {

// Fills every square block with the identity: the canonical comparison between
// two functors with equal multiplicities.
NatTrans canonical_iso(const Functor& from, const Functor& to) {
    NatTrans n = NatTrans::zero(from, to);
    for (auto& c : n.comps)
        for (auto& b : c.blocks)
            if (b.rows() == b.cols()) b = CMatrix::identity(b.rows());
    return n;
}

}  // namespace

TEST_CASE("a Q-system with a zero corner has degenerate support") {
    // Q keeps simple 0 and kills simple 1, so d_Q = (1, 0).
    auto z = make_zero_cell("z", {make_scat("C0", 2), make_scat("C1", 2)}, {IntMatrix{{1, 0}, {0, 1}}});
    auto q = std::make_shared<OneCell>();
    q->name = "Q";
    q->from = q->to = z;
    for (int k = 0; k <= 1; ++k) {
        const SCatPtr& c = z->cats[static_cast<std::size_t>(k)];
        q->lambdas.push_back(Functor::basic(c, c, {{1, 0}, {0, 0}}));
    }
    q->conns = {NatTrans{}, canonical_iso(functor_compose(z->gamma(1), q->lambdas[0]), functor_compose(q->lambdas[1], z->gamma(1)))};
    std::vector<NatTrans> m, i;
    for (int k = 0; k <= 1; ++k) {
        const Functor& Q = q->lambdas[static_cast<std::size_t>(k)];
        m.push_back(canonical_iso(functor_compose(Q, Q), Q));
        NatTrans ik = NatTrans::zero(Functor::identity(Q.src()), Q);
        ik.comps[0].blocks[0](0, 0) = 1.0;
        i.push_back(ik);
    }
    const QSystem qs = make_qsystem("corner", q, m, i);
    CHECK(axioms_check(qs, 0).max() < 1e-15);
    CHECK(stability_level(qs).l == 0);
    const DqData d = dq_calculus(qs, 1);
    CHECK(d.d == std::vector<double>{1.0, 0.0});
    CHECK(d.s == std::vector<double>{1.0, 0.0});
    CHECK(d.d_inv == std::vector<double>{1.0, 0.0});
    CHECK_FALSE(d.nondegenerate);
    CHECK(d.projection_residual == 0.0);
}
