/*
 * Generated fixtures. X_k = n.Id_{M_k}; its connection is the flip between
 * the two orderings of Gamma(X(s)) and X(Gamma(s)), conjugated by a random
 * gauge. The dual's connection is the mate of W* through ev and coev, and
 * Xbar receives an independent gauge. ev and coev use the standard
 * normalization ev = n^{-1/2} sum_r <rr|, coev = n^{1/2} sum_r |rr>, so that
 * ev ev* = 1 and d_Q = n^2.
 */
#include "qsplit/fixtures.hpp"

#include <cmath>
#include <sstream>

namespace qsplit {

std::string FixtureSpec::name() const {
    std::ostringstream os;
    if (kind == "amp")
        os << "amp" << n;
    else if (kind == "forced_l")
        os << "forced_l" << l0;
    else
        os << kind;
    return os.str();
}

void validate_fixture_spec(const FixtureSpec& spec) {
    if (spec.kind != "trivial" && spec.kind != "amp" && spec.kind != "fib" && spec.kind != "forced_l")
        throw Error(ErrorCode::ParameterOutOfRange, "unknown fixture kind '" + spec.kind + "'");
    if (spec.depth < 1 || spec.depth > 5) throw Error(ErrorCode::ParameterOutOfRange, "depth must lie in [1, 5]");
    if (spec.kind == "amp" && (spec.n < 1 || spec.n > 3)) throw Error(ErrorCode::ParameterOutOfRange, "amp(n) needs 1 <= n <= 3");
    if (spec.kind == "forced_l" && (spec.l0 < 0 || spec.l0 > 2)) throw Error(ErrorCode::ParameterOutOfRange, "forced_l(l0) needs 0 <= l0 <= 2");
    if (spec.kind == "forced_l" && spec.l0 > spec.depth - 1) throw Error(ErrorCode::ParameterOutOfRange, "forced_l(l0) needs l0 < depth");
}

ZeroCellPtr make_base_tower(const std::string& kind, int depth) {
    std::vector<SCatPtr> cats;
    std::vector<IntMatrix> gammas;
    const bool fib = kind == "fib";
    for (int k = 0; k <= depth; ++k) {
        const std::string name = "M" + std::to_string(k);
        cats.push_back(fib ? make_scat(name, {"1", "tau"}) : make_scat(name, {"*"}));
        if (k == 0) continue;
        if (fib)
            gammas.push_back({{1, 1}, {1, 0}});
        else if (kind == "trivial")
            gammas.push_back({{1}});
        else
            gammas.push_back({{2}});
    }
    return make_zero_cell(kind + "_tower", std::move(cats), std::move(gammas));
}

namespace {

Functor amp_functor(const SCatPtr& c, int n) {
    IntMatrix a = int_identity(c->size());
    for (auto& row : a)
        for (auto& v : row) v *= n;
    return Functor::basic(c, c, a, "amplification");
}

// Random unitary automorphism of X_k = n.Id: one U(n) element per simple.
NatTrans random_gauge(const Functor& x, Rng& rng) {
    NatTrans u = NatTrans::identity(x);
    for (std::size_t s = 0; s < u.comps.size(); ++s) u.comps[s].blocks[s] = random_unitary(u.comps[s].blocks[s].rows(), rng);
    return u;
}

// Flip Gamma X(s) -> X Gamma(s): line (a, c) goes to (c, a).
NatTrans flip_connection(const Functor& gam, const Functor& xprev, const Functor& xk, int n) {
    NatTrans w = NatTrans::zero(functor_compose(gam, xprev), functor_compose(xk, gam));
    const IntMatrix g = gam.mult();
    for (std::size_t s = 0; s < w.comps.size(); ++s) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto gi = static_cast<std::size_t>(g[i][s]);
            CMatrix& b = w.comps[s].blocks[i];
            for (std::size_t a = 0; a < gi; ++a)
                for (std::size_t c = 0; c < static_cast<std::size_t>(n); ++c) b(c * gi + a, a * static_cast<std::size_t>(n) + c) = 1.0;
        }
    }
    return w;
}

NatTrans standard_ev(const Functor& x, const Functor& xb, int n) {
    NatTrans ev = NatTrans::zero(functor_compose(xb, x), Functor::identity(x.src()));
    const double w = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t s = 0; s < ev.comps.size(); ++s)
        for (int r = 0; r < n; ++r) ev.comps[s].blocks[s](0, static_cast<std::size_t>(r * n + r)) = w;
    return ev;
}

NatTrans standard_coev(const Functor& x, const Functor& xb, int n) {
    NatTrans co = NatTrans::zero(Functor::identity(x.src()), functor_compose(x, xb));
    const double w = std::sqrt(static_cast<double>(n));
    for (std::size_t s = 0; s < co.comps.size(); ++s)
        for (int r = 0; r < n; ++r) co.comps[s].blocks[s](static_cast<std::size_t>(r * n + r), 0) = w;
    return co;
}

}  // namespace

DualityData make_amplification_pair(const ZeroCellPtr& base, int n, std::uint64_t seed, bool gauge) {
    Rng rng(seed);
    const int K = base->depth();
    auto x = std::make_shared<OneCell>();
    auto xb = std::make_shared<OneCell>();
    x->name = "X";
    xb->name = "Xbar";
    x->from = x->to = xb->from = xb->to = base;
    for (int k = 0; k <= K; ++k) {
        x->lambdas.push_back(amp_functor(base->cats[static_cast<std::size_t>(k)], n));
        xb->lambdas.push_back(amp_functor(base->cats[static_cast<std::size_t>(k)], n));
    }
    std::vector<NatTrans> u, v;
    for (int k = 0; k <= K; ++k) {
        u.push_back(gauge ? random_gauge(x->lambdas[static_cast<std::size_t>(k)], rng) : NatTrans::identity(x->lambdas[static_cast<std::size_t>(k)]));
        v.push_back(gauge ? random_gauge(xb->lambdas[static_cast<std::size_t>(k)], rng) : NatTrans::identity(xb->lambdas[static_cast<std::size_t>(k)]));
    }
    // Gauged ev/coev for X alone (Xbar ungauged yet).
    std::vector<NatTrans> ev, coev;
    for (int k = 0; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const Functor& X = x->lambdas[uk];
        const Functor& Xb = xb->lambdas[uk];
        ev.push_back(vertical(standard_ev(X, Xb, n), whisker_left(Xb, nat_star(u[uk]))));
        coev.push_back(vertical(whisker_right(u[uk], Xb), standard_coev(X, Xb, n)));
    }
    x->conns.emplace_back();
    xb->conns.emplace_back();
    for (int k = 1; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const Functor& gam = base->gamma(k);
        const Functor& X = x->lambdas[uk];
        const Functor& Xp = x->lambdas[uk - 1];
        const Functor& Xb = xb->lambdas[uk];
        const Functor& Xbp = xb->lambdas[uk - 1];
        const NatTrans w = vertical(vertical(whisker_right(u[uk], gam), flip_connection(gam, Xp, X, n)),
                                    whisker_left(gam, nat_star(u[uk - 1])));
        x->conns.push_back(w);
        // Mate of W*: (Xbar Gamma coev*_{k-1}) o (Xbar W* Xbar) o (ev*_k Gamma Xbar).
        const NatTrans a = whisker_right(nat_star(ev[uk]), functor_compose(gam, Xbp));
        const NatTrans b = whisker_left(Xb, whisker_right(nat_star(w), Xbp));
        const NatTrans c = whisker_left(functor_compose(Xb, gam), nat_star(coev[uk - 1]));
        xb->conns.push_back(vertical(c, vertical(b, a)));
    }
    // Independent gauge of Xbar.
    for (int k = 1; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const Functor& gam = base->gamma(k);
        xb->conns[uk] = vertical(vertical(whisker_right(v[uk], gam), xb->conns[uk]), whisker_left(gam, nat_star(v[uk - 1])));
    }
    for (int k = 0; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        ev[uk] = vertical(ev[uk], whisker_right(nat_star(v[uk]), x->lambdas[uk]));
        coev[uk] = vertical(whisker_left(x->lambdas[uk], v[uk]), coev[uk]);
    }
    DualityData d;
    d.cell = x;
    d.dual = xb;
    d.ev = TwoCell{one_cell_compose(xb, x), identity_one_cell(base), 0, std::move(ev)};
    d.coev = TwoCell{identity_one_cell(base), one_cell_compose(x, xb), 0, std::move(coev)};
    return d;
}

Fixture generate_fixture(const FixtureSpec& spec) {
    validate_fixture_spec(spec);
    Fixture f;
    f.spec = spec;
    int n = spec.n;
    std::string tower = spec.kind;
    if (spec.kind == "trivial") n = 1;
    if (spec.kind == "fib") n = 2;
    if (spec.kind == "forced_l") {
        n = 2;
        tower = "amp";
    }
    f.base = make_base_tower(tower, spec.depth);
    f.pair = make_amplification_pair(f.base, n, spec.seed, spec.kind != "trivial");
    f.q = from_dual_pair(f.pair, {}, spec.name());
    if (spec.kind == "forced_l") {
        for (int k = 0; k < spec.l0; ++k) {
            auto& mk = f.q.m.comps[static_cast<std::size_t>(k)];
            mk = nat_scale(spec.m_scale, mk);
        }
    }
    return f;
}

}  // namespace qsplit
