// Functors as canonical inflation chains; natural transformations.
#include <doctest.h>

#include "qsplit/funcalc.hpp"

using namespace qsplit;

TEST_CASE("functor application examples") {
    auto c = make_scat("C", 1);
    Obj x{c, {1}};
    Mor f = Mor::identity(x);
    f.blocks[0](0, 0) = 3.0;
    CHECK(mor_distance(Functor::identity(c).apply(f), f) == 0.0);

    const Functor amp = Functor::basic(c, c, {{2}});
    const Mor g = amp.apply(f);
    CHECK(residual_equality(g.blocks[0], CMatrix::diag(std::vector<double>{3.0, 3.0})) == 0.0);

    auto fib = make_scat("F", 2);
    const Functor gam = Functor::basic(fib, fib, {{1, 1}, {1, 0}});
    const Mor id = gam.apply(Mor::identity(Obj{fib, {1, 1}}));
    CHECK(id.src.mult == std::vector<int>{2, 1});
    CHECK(mor_distance(id, Mor::identity(Obj{fib, {2, 1}})) == 0.0);
}

TEST_CASE("functors are *-preserving and functorial") {
    Rng rng(12);
    auto a = make_scat("A", 2), b = make_scat("B", 3);
    const Functor f = Functor::basic(a, b, {{1, 2}, {0, 1}, {3, 0}});
    const Functor g = Functor::basic(b, a, {{1, 0, 1}, {1, 1, 0}});
    Obj x{a, {2, 1}}, y{a, {1, 2}}, z{a, {1, 1}};
    for (int t = 0; t < 5; ++t) {
        const Mor p = random_mor(x, y, rng), q = random_mor(y, z, rng);
        CHECK(mor_distance(f.apply(mor_star(p)), mor_star(f.apply(p))) == 0.0);
        CHECK(mor_distance(f.apply(mor_compose(q, p)), mor_compose(f.apply(q), f.apply(p))) < 1e-12);
        const Functor gf = functor_compose(g, f);
        CHECK(mor_distance(gf.apply(p), g.apply(f.apply(p))) == 0.0);
    }
    CHECK(mor_distance(f.apply(Mor::identity(x)), Mor::identity(f.apply(x))) == 0.0);
}

TEST_CASE("composition of multiplicities and identity laws") {
    auto c = make_scat("C", 1);
    const Functor g = Functor::basic(c, c, {{2}}), f = Functor::basic(c, c, {{3}});
    CHECK(functor_compose(g, f).mult() == IntMatrix{{6}});
    CHECK(functor_compose(g, Functor::identity(c)) == g);
    CHECK(functor_compose(Functor::identity(c), g) == g);
    CHECK_THROWS_AS(functor_compose(g, Functor::identity(make_scat("D", 2))), Error);
}

TEST_CASE("bi-faithfulness") {
    CHECK(bifaithful_check(IntMatrix{{1, 1}, {1, 0}}));
    CHECK_FALSE(bifaithful_check(IntMatrix{{1, 0}, {1, 0}}));
    // Multiplicities of Gamma^k m_0 stay positive for a bi-faithful Gamma.
    IntMatrix gam{{1, 1}, {1, 0}};
    std::vector<int> m{1, 1};
    for (int k = 0; k < 5; ++k) {
        m = int_apply(gam, m);
        for (int v : m) CHECK(v > 0);
    }
}

TEST_CASE("nat_extend and its independence of the resolution") {
    Rng rng(13);
    auto c = make_scat("C", 2);
    const Functor f = Functor::basic(c, c, {{1, 1}, {1, 0}});
    const Functor g = Functor::basic(c, c, {{0, 1}, {2, 0}});
    // Natural transformations F -> G exist only where the blocks match; use random ones.
    NatTrans eta = NatTrans::zero(f, g);
    for (auto& comp : eta.comps)
        for (auto& b : comp.blocks) b = random_matrix(b.rows(), b.cols(), rng);

    Obj x{c, {2, 1}};
    const Mor e1 = nat_extend(eta, x);
    // Simple object: stored component.
    CHECK(mor_distance(nat_extend(eta, simple_obj(c, 1)), eta.comps[1]) == 0.0);
    // Second resolution: rotate the copies of each simple by a unitary.
    std::vector<std::pair<std::size_t, Mor>> res;
    Mor v = Mor::zero(x, x);
    for (std::size_t i = 0; i < 2; ++i) v.blocks[i] = random_unitary(static_cast<std::size_t>(x.mult[i]), rng);
    std::size_t idx = 0;
    for (const auto& u : simple_resolution(x)) {
        const std::size_t s = idx < 2 ? 0 : 1;
        res.emplace_back(s, mor_compose(v, u));
        ++idx;
    }
    CHECK(mor_distance(nat_extend_with(eta, x, res), e1) < 1e-12);
    CHECK(naturality_residual(eta) < 1e-9);
    CHECK(mor_distance(nat_extend(NatTrans::identity(f), x), Mor::identity(f.apply(x))) == 0.0);
}

TEST_CASE("vertical composition, whiskers, interchange") {
    Rng rng(14);
    auto c = make_scat("C", 2);
    const Functor f = Functor::basic(c, c, {{1, 1}, {1, 0}});
    const Functor h = Functor::basic(c, c, {{2, 0}, {1, 1}});
    NatTrans u = NatTrans::identity(f);
    for (auto& comp : u.comps)
        for (auto& b : comp.blocks) b = random_unitary(b.rows(), rng);
    CHECK(nat_distance(vertical(u, nat_star(u)), NatTrans::identity(f)) < 1e-12);
    CHECK(nat_distance(whisker_left(Functor::identity(c), u), u) == 0.0);
    CHECK(nat_distance(whisker_right(u, Functor::identity(c)), u) == 0.0);

    NatTrans v = NatTrans::identity(f);
    for (auto& comp : v.comps)
        for (auto& b : comp.blocks) b = random_matrix(b.rows(), b.cols(), rng);
    // H(v u) = H(v) H(u), (v u) K = (v K)(u K).
    CHECK(nat_distance(whisker_left(h, vertical(v, u)), vertical(whisker_left(h, v), whisker_left(h, u))) < 1e-12);
    CHECK(nat_distance(whisker_right(vertical(v, u), h), vertical(whisker_right(v, h), whisker_right(u, h))) < 1e-12);
    // Interchange: the two ways of forming the horizontal composite u * v agree.
    const NatTrans a = vertical(whisker_left(f, v), whisker_right(u, f));
    const NatTrans b = vertical(whisker_right(u, f), whisker_left(f, v));
    CHECK(nat_distance(a, b) < 1e-12);
    CHECK_THROWS_AS(vertical(NatTrans::identity(h), u), Error);
}

TEST_CASE("solve_natural_unitary") {
    auto c = make_scat("C", 2);
    const Functor f = Functor::basic(c, c, {{1, 1}, {1, 0}});
    CHECK(nat_distance(solve_natural_unitary(f, f), NatTrans::identity(f)) == 0.0);

    // Same multiplicity, different block ordering: chain versus single inflation.
    const Functor ff = functor_compose(f, f);
    const Functor flat = Functor::basic(c, c, int_product(f.mult(), f.mult()));
    const NatTrans w = solve_natural_unitary(ff, flat);
    CHECK(nat_unitarity_residual(w) < 1e-12);
    CHECK(naturality_residual(w) < 1e-9);
    CHECK(nat_distance(vertical(nat_star(w), w), NatTrans::identity(ff)) < 1e-12);
    // On a non-simple object the extension is a genuine permutation.
    const Mor wx = nat_extend(w, Obj{c, {1, 1}});
    CHECK(mor_unitarity_residual(wx) < 1e-12);
    CHECK_THROWS_AS(solve_natural_unitary(f, Functor::identity(c)), Error);
}

TEST_CASE("functor preimage recovers morphisms") {
    Rng rng(15);
    auto c = make_scat("C", 2);
    const Functor f = functor_compose(Functor::basic(c, c, {{1, 1}, {1, 0}}), Functor::basic(c, c, {{2, 1}, {0, 1}}));
    Obj x{c, {1, 2}}, y{c, {2, 1}};
    const Mor p = random_mor(x, y, rng);
    CHECK(mor_distance(functor_preimage(f, f.apply(p), x, y), p) < 1e-12);
}
