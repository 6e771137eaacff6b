// 0-, 1- and 2-cells at finite depth, exchange transport and duality.
#include <doctest.h>

#include "qsplit/fixtures.hpp"

using namespace qsplit;

namespace {

ZeroCellPtr fib_tower(int depth) { return make_base_tower("fib", depth); }

}  // namespace

TEST_CASE("zero cells validate their inclusion graphs") {
    auto z = fib_tower(3);
    CHECK(z->depth() == 3);
    CHECK(z->gamma(2).mult() == IntMatrix{{1, 1}, {1, 0}});
    CHECK_THROWS_AS(z->gamma(0), Error);

    auto a = make_scat("A", 2), b = make_scat("B", 2);
    try {
        make_zero_cell("bad", {a, b}, {IntMatrix{{1, 0}, {1, 0}}});
        FAIL("expected ValidationError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationError);
    }
}

TEST_CASE("identity 1-cell passes and a scaled connection does not") {
    auto z = fib_tower(3);
    auto one = identity_one_cell(z);
    CHECK(one_cell_check(*one).pass);

    auto bad = std::make_shared<OneCell>(*one);
    bad->conns[2] = nat_scale(1.01, bad->conns[2]);
    const CheckReport r = one_cell_check(*bad);
    CHECK_FALSE(r.pass);
    // |1.01^2 - 1| on both sides of the unitarity test.
    CHECK(r.max_residual("unitarity") == doctest::Approx(0.0201).epsilon(1e-6));
    CHECK(r.witness == 3);
}

TEST_CASE("generated amplification pairs are unitary 1-cells with duality") {
    for (const std::string kind : {"amp", "fib"}) {
        auto base = make_base_tower(kind, 3);
        const DualityData d = make_amplification_pair(base, 2, 7);
        CHECK(one_cell_check(*d.cell).pass);
        CHECK(one_cell_check(*d.dual).pass);
        const CheckReport dc = duality_check(d);
        CHECK(dc.pass);
        CHECK(dc.max_residual("zigzag_X") < 1e-12);
        CHECK(dc.max_residual("exchange_ev") < 1e-12);
    }
}

TEST_CASE("1-cell composition is associative on functors and connections") {
    auto base = make_base_tower("fib", 3);
    const DualityData d = make_amplification_pair(base, 2, 3);
    const DualityData e = make_amplification_pair(base, 1, 4);
    auto left = one_cell_compose(one_cell_compose(d.cell, e.cell), d.dual);
    auto right = one_cell_compose(d.cell, one_cell_compose(e.cell, d.dual));
    CHECK(one_cell_check(*left).pass);
    for (int k = 1; k <= 3; ++k) {
        CHECK(left->lambdas[static_cast<std::size_t>(k)] == right->lambdas[static_cast<std::size_t>(k)]);
        CHECK(nat_distance(left->conns[static_cast<std::size_t>(k)], right->conns[static_cast<std::size_t>(k)]) < 1e-12);
    }
}

TEST_CASE("exchange transport reproduces stored components and is deterministic") {
    const Fixture f = generate_fixture(FixtureSpec{"fib", 2, 4, 11, 0, 1.1});
    for (int k = 0; k < 4; ++k) {
        double res = 1.0;
        const NatTrans m1 = exchange_transport(f.q.m.at(k), *f.q.qq, *f.q.q, k, {}, &res);
        CHECK(res < 1e-12);
        CHECK(nat_distance(m1, f.q.m.at(k + 1)) < 1e-12);
        const NatTrans again = exchange_transport(f.q.m.at(k), *f.q.qq, *f.q.q, k);
        CHECK(nat_distance(m1, again) == 0.0);
        const NatTrans back = exchange_transport_back(f.q.m.at(k + 1), *f.q.qq, *f.q.q, k);
        CHECK(nat_distance(back, f.q.m.at(k)) < 1e-12);
    }
}

TEST_CASE("exchange transport rejects inconsistent input") {
    const Fixture f = generate_fixture(FixtureSpec{"amp", 2, 3, 5, 0, 1.1});
    // Twist the target's connection by a unitary mixing the two copies of
    // Q(s) inside Gamma Q(s); the identity then has no exchange partner.
    Rng rng(1);
    auto twisted = std::make_shared<OneCell>(*f.q.q);
    NatTrans& w = twisted->conns[1];
    NatTrans mix = NatTrans::identity(w.from);
    mix.comps[0].blocks[0] = random_unitary(8, rng);
    w = vertical(w, mix);
    const NatTrans eta = NatTrans::identity(f.q.q->lambdas[0]);
    try {
        exchange_transport(eta, *f.q.q, *twisted, 0);
        FAIL("expected NoSolution");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoSolution);
    }
}

TEST_CASE("2-cell operations and eventual equality") {
    const Fixture f = generate_fixture(FixtureSpec{"amp", 2, 3, 9, 0, 1.1});
    const TwoCell& m = f.q.m;
    CHECK(two_cell_check(m).pass);

    // m m* is the identity on Q.
    const TwoCell mms = two_cell_vertical(m, two_cell_star(m));
    const Eventually e = equal_eventually(mms, identity_two_cell(f.q.q));
    CHECK(e.equal);
    CHECK(e.witness == 0);

    // Differing only at level 1 still leaves the tail 2..3 equal.
    TwoCell m2 = m;
    m2.comps[1] = nat_scale(2.0, m2.comps[1]);
    const Eventually e2 = equal_eventually(m, m2);
    CHECK(e2.equal);
    CHECK(e2.witness == 2);

    TwoCell m3 = m;
    m3.comps[3] = nat_scale(2.0, m3.comps[3]);
    CHECK_FALSE(equal_eventually(m, m3).equal);

    // Equivalence on a triple.
    TwoCell m4 = m2;
    m4.comps[0] = nat_scale(3.0, m4.comps[0]);
    CHECK(equal_eventually(m, m).equal);
    CHECK(equal_eventually(m2, m).equal == equal_eventually(m, m2).equal);
    CHECK(equal_eventually(m, m4).equal);
    CHECK(equal_eventually(m4, m3).equal == equal_eventually(m, m3).equal);
}

TEST_CASE("horizontal composite of exchange-compatible 2-cells is exchange-compatible") {
    const Fixture f = generate_fixture(FixtureSpec{"fib", 2, 3, 2, 0, 1.1});
    const TwoCell h = two_cell_horizontal(f.q.m, f.q.i);  // Q (x) 1 => Q (x) Q, then m
    CHECK(two_cell_check(h).pass);
    const TwoCell w = two_cell_whisker_left(f.q.q, f.q.i);
    CHECK(two_cell_check(w).pass);
    const TwoCell u = two_cell_vertical(f.q.m, w);
    // Unitality: m (Q i) = id_Q on every level.
    for (int k = 0; k <= 3; ++k) CHECK(nat_distance(u.at(k), NatTrans::identity(f.q.q->lambdas[static_cast<std::size_t>(k)])) < 1e-12);
}
