// Representations as induced functors, intertwiner extraction, and the balanced tensor oracle.
#include <doctest.h>

#include <chrono>

#include "qsplit/corr.hpp"
#include "qsplit/fixtures.hpp"

using namespace qsplit;

namespace {

Fixture make(const std::string& kind, int n = 2, int depth = 3) {
    FixtureSpec s;
    s.kind = kind;
    s.n = n;
    s.depth = depth;
    s.seed = 29;
    return generate_fixture(s);
}

// C^2 + Mat_2 represented on C^{1+2+2} = (C^2 (x) 1) + (Mat_2 on C^2, twice), with a scrambling unitary.
struct Toy {
    SCatPtr a_cat = corr_category("A", MMAlgebra{{1, 2}});
    SCatPtr y_cat = make_scat("Y", 1);
    Obj a = regular_obj(a_cat, MMAlgebra{{1, 2}});
    Obj y{y_cat, {5}};
    CMatrix u;

    Toy() {
        Rng rng(5);
        u = random_unitary(5, rng);
    }
    Mor pi(const Mor& b) const {
        std::vector<CMatrix> blocks{b.blocks[0], b.blocks[1], b.blocks[1]};
        return Mor{y, y, {u * direct_sum(blocks) * u.adjoint()}};
    }
};

}  // namespace

TEST_CASE("make_rep reads multiplicities and a unitary gauge") {
    Toy t;
    const StarRep r = make_rep(t.a, t.y, [&](const Mor& b) { return t.pi(b); });
    CHECK(r.functor.mult() == IntMatrix{{1, 2}});
    CHECK(r.residual < 1e-12);
    Rng rng(9);
    const Mor b = random_mor(t.a, t.a, rng);
    CHECK(mor_distance(rep_apply(r, b), t.pi(b)) < 1e-12);

    // A non-unital map is rejected.
    auto half = [&](const Mor& b2) {
        Mor out = t.pi(b2);
        CMatrix p = CMatrix::zeros(5, 5);
        p(0, 0) = 1.0;
        out.blocks[0] = p * out.blocks[0] * p;
        return out;
    };
    CHECK_THROWS_AS(make_rep(t.a, t.y, half), Error);
}

TEST_CASE("intertwiners give natural transformations") {
    Toy t;
    const StarRep r = make_rep(t.a, t.y, [&](const Mor& b) { return t.pi(b); });
    double res = 1.0;
    const NatTrans id = nat_from_intertwiner(r, r, Mor::identity(t.y), &res);
    CHECK(res < 1e-12);
    CHECK(nat_distance(id, NatTrans::identity(r.functor)) < 1e-12);

    // An intertwiner mixing the two copies of the Mat_2 block.
    Rng rng(3);
    const CMatrix mix = random_unitary(2, rng);
    CMatrix big = CMatrix::identity(5);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int s = 0; s < 2; ++s) {
                big(1 + 2 * static_cast<std::size_t>(i) + static_cast<std::size_t>(s), 1 + 2 * static_cast<std::size_t>(j) + static_cast<std::size_t>(s)) =
                    mix(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
    const Mor u{t.y, t.y, {t.u * big * t.u.adjoint()}};
    const NatTrans eta = nat_from_intertwiner(r, r, u, &res);
    CHECK(res < 1e-12);
    CHECK(naturality_residual(eta) < 1e-12);
    CHECK(nat_unitarity_residual(eta) < 1e-12);
    CHECK(mor_unitarity_residual(eta.comps[1]) < 1e-12);
}

TEST_CASE("rep composition multiplies representations") {
    Toy t;
    const StarRep r = make_rep(t.a, t.y, [&](const Mor& b) { return t.pi(b); });
    // Y -> Z: Mat_5 into Mat_10 as x (+) x conjugated by a unitary.
    const SCatPtr zc = make_scat("Z", 1);
    const Obj z{zc, {10}};
    Rng rng(8);
    const CMatrix v = random_unitary(10, rng);
    auto rho = [&](const Mor& x) { return Mor{z, z, {v * direct_sum({x.blocks[0], x.blocks[0]}) * v.adjoint()}}; };
    const StarRep s = make_rep(t.y, z, rho);
    const StarRep c = rep_compose(s, r);
    const Mor b = random_mor(t.a, t.a, rng);
    CHECK(mor_distance(rep_apply(c, b), rho(t.pi(b))) < 1e-12);
    CHECK(c.functor.mult() == IntMatrix{{2, 4}});

    // A canonical outer rep composes with any inner carrier.
    const Functor g = Functor::basic(t.y_cat, zc, {{2}});
    const StarRep cc = rep_compose(canonical_rep(g, t.y), r);
    CHECK(mor_distance(rep_apply(cc, b), g.apply(t.pi(b))) < 1e-12);
    CHECK_THROWS_AS(rep_compose(s, canonical_rep(Functor::identity(t.a_cat), t.a)), Error);
}

TEST_CASE("square connections detect non-commuting squares") {
    Toy t;
    const StarRep r1 = make_rep(t.a, t.y, [&](const Mor& b) { return t.pi(b); });
    Rng rng(2);
    const CMatrix w = random_unitary(5, rng);
    const StarRep r2 = make_rep(t.a, t.y, [&](const Mor& b) { return Mor{t.y, t.y, {w * t.pi(b).blocks[0] * w.adjoint()}}; });
    const NatTrans same = square_connection(r1, r1);
    CHECK(nat_distance(same, NatTrans::identity(r1.functor)) < 1e-12);
    try {
        square_connection(r1, r2);
        FAIL("expected NonCommutingSquare");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonCommutingSquare);
    }
}

TEST_CASE("concrete algebras round-trip through standard coordinates") {
    const Fixture f = make("fib");
    const HSpace h = build_H(f.q, 1);
    const ConcreteAlgebra s = concrete_algebra("S1", h.qgen, [&](Rng& r) { return phi1(h, random_mor(h.gen, h.qgen, r)); }, h.dim());
    CHECK(s.alg().dim() == h.dim());
    Rng rng(4);
    const Mor x = phi1(h, random_mor(h.gen, h.qgen, rng)), y = phi1(h, random_mor(h.gen, h.qgen, rng));
    CHECK(mor_distance(s.from_std(s.to_std(x)), x) < 1e-10);
    CHECK(mor_distance(s.to_std(mor_compose(x, y)), mor_compose(s.to_std(x), s.to_std(y))) < 1e-10);
    CHECK(mor_distance(s.to_std(mor_star(x)), mor_star(s.to_std(x))) < 1e-10);
}

TEST_CASE("balanced tensors: small algebraic examples") {
    // C^2 (x)_{Mat_2} conj(C^2) = C: V = Hom(C^2, C) rows, W = Hom(C, C^2) columns.
    std::vector<CMatrix> v, w;
    for (std::size_t i = 0; i < 2; ++i) {
        CMatrix r(1, 2), c(2, 1);
        r(0, i) = 1.0;
        c(i, 0) = 1.0;
        v.push_back(r);
        w.push_back(c);
    }
    auto pi = [](const CMatrix& g) { return g; };
    auto ext = [](const CMatrix& x) { return x; };
    auto sample = [](Rng& rng) { return random_matrix(2, 2, rng); };
    const RelTensor t = rel_tensor(v, w, pi, ext, 1, sample);
    CHECK(t.dim_oracle == 1);
    CHECK(t.gram_residual < 1e-14);
    CHECK(t.balance_residual < 1e-12);

    // A (x)_A W = W for A = Mat_2 acting on W = Mat_2 columns, with rotated bases.
    Rng rng(6);
    std::vector<CMatrix> va, wa;
    for (int a = 0; a < 4; ++a) va.push_back(random_matrix(2, 2, rng));
    for (int b = 0; b < 4; ++b) wa.push_back(random_matrix(2, 2, rng));
    const RelTensor t2 = rel_tensor(va, wa, pi, ext, 4, sample);
    CHECK(t2.dim_oracle == 4);
    CHECK(t2.fast_rank_residual == 0.0);
    CHECK(t2.gram_residual < 1e-12);
}

TEST_CASE("H (x)_A H matches Y through the fast map") {
    for (const std::string kind : {"trivial", "amp", "fib"}) {
        const Fixture f = make(kind, kind == "trivial" ? 1 : 2);
        for (int k = 0; k <= 1; ++k) {
            const RelTensor t = h_tensor_h(build_H(f.q, k));
            CHECK(t.dim_oracle == t.dim_fast);
            CHECK(t.fast_rank_residual == 0.0);
            CHECK(t.gram_residual < 1e-12);
            CHECK(t.balance_residual < 1e-10);
        }
    }
}

TEST_CASE("H (x)_A H with rotated bases") {
    for (const std::string kind : {"trivial", "amp", "fib"}) {
        const Fixture f = make(kind, kind == "trivial" ? 1 : 2);
        const RelTensor t = h_tensor_h(build_H(f.q, 0), 17);
        CHECK(t.dim_oracle == t.dim_fast);
        CHECK(t.fast_rank_residual == 0.0);
        CHECK(t.gram_residual < 1e-10);
        CHECK(t.balance_residual < 1e-10);
    }
}

TEST_CASE("a broken multiplication is seen by the tensor oracle only through the fast Gram") {
    // The oracle and the fast map are both built from Q alone, so the comparison
    // is a check on the concrete model; a wrong fast dimension is caught.
    const Fixture f = make("amp");
    const HSpace h = build_H(f.q, 0);
    std::vector<CMatrix> basis;
    for (std::size_t a = 0; a < h.dim(); ++a) basis.push_back(flatten(h.element(a)));
    auto pi = [&](const CMatrix& g) { return flatten(h.q.apply(unflatten(g, h.gen, h.gen))); };
    auto ext = [&](const CMatrix& xi) { return flatten(h.q.apply(unflatten(xi, h.gen, h.qgen))); };
    auto sample = [&](Rng& rng) { return flatten(random_mor(h.gen, h.gen, rng)); };
    const RelTensor t = rel_tensor(basis, basis, pi, ext, 15, sample);
    CHECK(t.dim_oracle == 16);
    CHECK(t.fast_rank_residual == 1.0);
}
