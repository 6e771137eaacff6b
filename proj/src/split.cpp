/*
 * split: the algebra tower B_k, the 1-cells F, Lambda, Lbar and X, their
 * duality data, and the certificate comparing Xbar (x) X with Q.
 *
 * Every natural transformation here is produced the same way: write down two
 * concrete representations of a standard object and an intertwiner between
 * them, then let nat_from_intertwiner translate into canonical coordinates.
 */
#include "qsplit/split.hpp"

#include <algorithm>
#include <future>
#include <optional>

namespace qsplit {

namespace {

std::size_t u(int k) { return static_cast<std::size_t>(k); }

// The part of H_k that does not depend on m: generator, Q gen and Q_k.
HSpace frame(const QSystem& q, int k) {
    HSpace h;
    h.k = k;
    h.q = q.q->lambdas[u(k)];
    h.gen = tower_generator(*q.base, k);
    h.qgen = h.q.apply(h.gen);
    return h;
}

Functor identity_inflation(const SCatPtr& src, const SCatPtr& dst) { return Functor::basic(src, dst, int_identity(src->size())); }

// B_k below the stability level: the c in C_k whose image in C_l lies in S_l.
ConcreteAlgebra low_algebra(const QSystem& q, int k, int l, const HSpace& hl, std::uint64_t seed) {
    std::vector<HSpace> frames;
    for (int t = k; t < l; ++t) frames.push_back(frame(q, t));
    const Obj& qgen = frames.front().qgen;
    auto lift = [&](Mor c) {
        for (const HSpace& f : frames) c = include_C(q, f, c);
        return c;
    };
    std::vector<Mor> units;
    for (std::size_t i = 0; i < qgen.mult.size(); ++i)
        for (int r = 0; r < qgen.mult[i]; ++r)
            for (int s = 0; s < qgen.mult[i]; ++s) {
                Mor e = Mor::zero(qgen, qgen);
                e.blocks[i](u(r), u(s)) = 1.0;
                units.push_back(e);
            }
    std::vector<CMatrix> cols;
    for (const Mor& e : units) {
        const Mor c = lift(e);
        const CMatrix d = flatten(c - s_project(hl, c));
        CMatrix col(d.size(), 1);
        for (std::size_t t = 0; t < d.size(); ++t) col(t, 0) = d.data()[t];
        cols.push_back(col);
    }
    const CMatrix kernel = nullspace(hstack(cols));
    std::vector<Mor> basis;
    for (std::size_t t = 0; t < kernel.cols(); ++t) {
        Mor b = Mor::zero(qgen, qgen);
        for (std::size_t e = 0; e < units.size(); ++e)
            if (std::abs(kernel(e, t)) > 0.0) b = b + kernel(e, t) * units[e];
        basis.push_back(b);
    }
    if (basis.empty()) throw Error(ErrorCode::NotAlgebra, "B_" + std::to_string(k) + " is zero");
    auto sample = [&](Rng& rng) {
        std::normal_distribution<double> g;
        Mor x = Mor::zero(qgen, qgen);
        for (const Mor& b : basis) x = x + cplx(g(rng), g(rng)) * b;
        return x;
    };
    return concrete_algebra("B" + std::to_string(k), qgen, sample, basis.size(), seed);
}

struct Level {
    HSpace fr;
    std::optional<HSpace> h;  // k >= l
    SCatPtr acat, ccat;
    Obj xa, xc, yq;  // gen in R(A_k), Q gen in R(C_k), Q gen in R(A_k)
    Mor w;           // W^Q_k at gen_{k-1} (k >= 1)
    StarRep f, fbar, chi, lbar, ic, r;
    StarRep sigma, delta, psi;  // k >= 1
};

double nat_residual_or_zero(const NatTrans& a, const NatTrans& b) { return nat_distance(a, b); }

}  // namespace

SplitResult split_qsystem(const QSystem& q, const SplitOptions& opt) {
    opt.tol.validate();
    SplitResult out;
    out.name = q.name;
    out.eps = opt.tol.eps_num;
    const int K = q.depth();
    const int l = q.l >= 0 ? q.l : stability_level(q, opt.tol).l;
    out.l = l;
    out.depth = opt.depth < 0 ? K : opt.depth;
    if (out.depth > K || out.depth <= l)
        throw Error(ErrorCode::ParameterOutOfRange,
                    "split depth " + std::to_string(out.depth) + " must lie in (" + std::to_string(l) + ", " + std::to_string(K) + "]");
    const ZeroCellPtr& m = q.base;

    std::vector<Level> lv(u(K + 1));
    // Algebras first.
    for (int k = 0; k <= K; ++k) {
        Level& L = lv[u(k)];
        L.fr = frame(q, k);
        if (k >= l) L.h = build_H(q, k);
        L.acat = make_scat("RA" + std::to_string(k), m->cats[u(k)]->simples);
        L.ccat = make_scat("C" + std::to_string(k), m->cats[u(k)]->simples);
        L.xa = recat(L.fr.gen, L.acat);
        L.xc = recat(L.fr.qgen, L.ccat);
        L.yq = recat(L.fr.qgen, L.acat);
        if (k >= 1) L.w = nat_extend(q.q->conns[u(k)], lv[u(k - 1)].fr.gen);
    }
    const HSpace& hl = *lv[u(l)].h;
    for (int k = 0; k <= K; ++k) {
        const Level& L = lv[u(k)];
        const std::uint64_t seed = 101 + static_cast<std::uint64_t>(k);
        if (k >= l) {
            const HSpace& h = *L.h;
            out.b.push_back(concrete_algebra("B" + std::to_string(k), h.qgen,
                                             [&h](Rng& r) { return phi1(h, random_mor(h.gen, h.qgen, r)); }, h.dim(), seed));
        } else {
            out.b.push_back(low_algebra(q, k, l, hl, seed));
        }
    }

    // Representations.
    for (int k = 0; k <= K; ++k) {
        Level& L = lv[u(k)];
        const ConcreteAlgebra& B = out.b[u(k)];
        const SCatPtr& mk = m->cats[u(k)];
        const Obj xb = B.std_obj();
        L.f = canonical_rep(identity_inflation(mk, L.acat), L.fr.gen);
        L.fbar = canonical_rep(identity_inflation(L.acat, mk), L.xa);
        const Functor& qk = L.fr.q;
        L.chi = make_rep(L.xa, xb, [&](const Mor& a) { return B.to_std(qk.apply(recat(a, mk))); });
        if (k >= l) {
            L.lbar = make_rep(xb, L.yq, [&](const Mor& b) { return recat(B.from_std(b), L.acat); }, "restriction");
        } else {
            L.ic = make_rep(xb, L.xc, [&](const Mor& b) { return recat(B.from_std(b), L.ccat); }, "restriction");
            L.r = canonical_rep(identity_inflation(L.ccat, L.acat), L.xc);
            L.lbar = rep_compose(L.r, L.ic);
        }
        if (k == 0) continue;
        Level& P = lv[u(k - 1)];
        const ConcreteAlgebra& Bp = out.b[u(k - 1)];
        const HSpace& fp = P.fr;
        L.sigma = canonical_rep(Functor::basic(P.acat, L.acat, m->gamma(k).mult()), P.xa);
        L.delta = make_rep(Bp.std_obj(), xb, [&](const Mor& b) { return B.to_std(include_C(q, fp, Bp.from_std(b))); });
        if (k < l)
            L.psi = make_rep(P.xc, L.xc, [&](const Mor& c) { return recat(include_C(q, fp, recat(c, m->cats[u(k - 1)])), L.ccat); });
    }

    // 0-cells.
    {
        std::vector<SCatPtr> acats, bcats;
        std::vector<IntMatrix> ag, bg;
        for (int k = 0; k <= K; ++k) {
            acats.push_back(lv[u(k)].acat);
            bcats.push_back(out.b[u(k)].cat);
            if (k >= 1) {
                ag.push_back(m->gamma(k).mult());
                bg.push_back(lv[u(k)].delta.functor.mult());
            }
        }
        out.sigma = make_zero_cell("Sigma", acats, ag);
        out.delta = make_zero_cell("Delta", bcats, bg);
    }

    // F, Fbar, Lambda.
    auto f = std::make_shared<OneCell>(), fbar = std::make_shared<OneCell>(), lam = std::make_shared<OneCell>();
    f->name = "F";
    f->from = m;
    f->to = out.sigma;
    fbar->name = "Fbar";
    fbar->from = out.sigma;
    fbar->to = m;
    lam->name = "Lambda";
    lam->from = out.sigma;
    lam->to = out.delta;
    for (int k = 0; k <= K; ++k) {
        const Level& L = lv[u(k)];
        f->lambdas.push_back(L.f.functor);
        fbar->lambdas.push_back(L.fbar.functor);
        lam->lambdas.push_back(L.chi.functor);
        if (k == 0) {
            f->conns.emplace_back();
            fbar->conns.emplace_back();
            lam->conns.emplace_back();
            continue;
        }
        const Level& P = lv[u(k - 1)];
        const StarRep gam = canonical_rep(m->gamma(k), P.fr.gen);
        f->conns.push_back(nat_from_intertwiner(rep_compose(L.sigma, P.f), rep_compose(L.f, gam), Mor::identity(L.xa)));
        fbar->conns.push_back(nat_from_intertwiner(rep_compose(canonical_rep(m->gamma(k), P.fr.gen), P.fbar), rep_compose(L.fbar, L.sigma),
                                                   Mor::identity(L.fr.gen)));
        lam->conns.push_back(square_connection(rep_compose(L.delta, P.chi), rep_compose(L.chi, L.sigma), opt.tol));
    }
    out.f = f;
    out.fbar = fbar;
    out.lambda = lam;

    // Duality for F: both composites are identities in canonical coordinates.
    {
        std::vector<NatTrans> ev, coev;
        for (int k = 0; k <= K; ++k) {
            const Level& L = lv[u(k)];
            coev.push_back(nat_from_intertwiner(canonical_rep(Functor::identity(m->cats[u(k)]), L.fr.gen),
                                                canonical_rep(functor_compose(L.fbar.functor, L.f.functor), L.fr.gen), Mor::identity(L.fr.gen)));
            ev.push_back(nat_from_intertwiner(canonical_rep(functor_compose(L.f.functor, L.fbar.functor), L.xa),
                                              canonical_rep(Functor::identity(L.acat), L.xa), Mor::identity(L.xa)));
        }
        out.d_f.cell = fbar;
        out.d_f.dual = f;
        out.d_f.ev = TwoCell{one_cell_compose(f, fbar), identity_one_cell(out.sigma), 0, std::move(ev)};
        out.d_f.coev = TwoCell{identity_one_cell(m), one_cell_compose(fbar, f), 0, std::move(coev)};
    }

    // Duality for Lambda from the stability level on:
    //   coev : 1 => Lbar Lambda is the intertwiner i : gen -> Q gen;
    //   ev : Lambda Lbar => 1 sends sigma_c (x) b to phi1(sigma_c) b.
    std::vector<NatTrans> ev_l(u(K + 1)), coev_l(u(K + 1));
    for (int k = l; k <= K; ++k) {
        const Level& L = lv[u(k)];
        const HSpace& h = *L.h;
        const ConcreteAlgebra& B = out.b[u(k)];
        const Obj xb = B.std_obj();
        coev_l[u(k)] = nat_from_intertwiner(canonical_rep(Functor::identity(L.acat), L.xa), rep_compose(L.lbar, L.chi), recat(h.i_gen, L.acat));

        const Functor ll = functor_compose(L.chi.functor, L.lbar.functor);
        const Obj y = L.lbar.functor.apply(xb);
        Mor ev_x = Mor::zero(ll.apply(xb), xb);
        for (const Mor& iota : simple_resolution(y)) {
            std::size_t s = 0;
            for (std::size_t i = 0; i < iota.blocks.size(); ++i)
                if (iota.blocks[i].size() > 0 && iota.blocks[i].max_abs() > 0.0) s = i;
            Mor first = Mor::zero(simple_obj(L.acat, s), L.xa);
            first.blocks[s](0, 0) = 1.0;
            const Mor sigma_c = recat(mor_compose(L.lbar.gauge, mor_compose(iota, mor_star(first))), m->cats[u(k)]);
            const Mor theta = mor_compose(L.chi.gauge, mor_compose(L.chi.functor.apply(first), mor_star(L.chi.functor.apply(iota))));
            ev_x = ev_x + mor_compose(B.to_std(phi1(h, sigma_c)), theta);
        }
        NatTrans ev;
        ev.from = ll;
        ev.to = Functor::identity(B.cat);
        for (std::size_t j = 0; j < xb.mult.size(); ++j) {
            Mor first = Mor::zero(simple_obj(B.cat, j), xb);
            first.blocks[j](0, 0) = 1.0;
            ev.comps.push_back(mor_compose(mor_star(first), mor_compose(ev_x, ll.apply(first))));
        }
        ev_l[u(k)] = ev;
    }

    // Lbar and its connections.
    auto lbar = std::make_shared<OneCell>();
    lbar->name = "Lbar";
    lbar->from = out.delta;
    lbar->to = out.sigma;
    for (int k = 0; k <= K; ++k) lbar->lambdas.push_back(lv[u(k)].lbar.functor);
    lbar->conns.emplace_back();
    for (int k = 1; k <= K; ++k) {
        const Level& L = lv[u(k)];
        const Level& P = lv[u(k - 1)];
        const StarRep top = rep_compose(L.sigma, P.lbar);   // Sigma_k Lbar_{k-1}
        const StarRep bottom = rep_compose(L.lbar, L.delta);  // Lbar_k Delta_k
        const Mor wa = recat(L.w, L.acat);
        const NatTrans reference = nat_from_intertwiner(top, bottom, wa);
        ConnectionRecord rec;
        rec.k = k;
        NatTrans wbar;
        if (k < l) {
            rec.range = "below";
            const NatTrans sq = square_connection(rep_compose(L.psi, P.ic), rep_compose(L.ic, L.delta), opt.tol);
            const NatTrans wr = nat_from_intertwiner(rep_compose(L.sigma, P.r), rep_compose(L.r, L.psi), wa);
            wbar = vertical(whisker_left(L.r.functor, sq), whisker_right(wr, P.ic.functor));
        } else if (k == l) {
            rec.range = "stable";
            // sum over a PP basis of H_{l-1} of I(sigma) Gamma(sigma)*
            Mor s = Mor::zero(m->gamma(k).apply(P.fr.qgen), L.fr.qgen);
            for (const Mor& sig : pp_basis(P.fr))
                s = s + mor_compose(include_H(q, P.fr, sig), mor_star(m->gamma(k).apply(sig)));
            if (mor_unitarity_residual(s) > 1e3 * opt.tol.eps_num)
                throw Error(ErrorCode::SquareSolveFailure, "PP intertwiner at level " + std::to_string(k) + " is not unitary");
            wbar = nat_from_intertwiner(top, bottom, recat(s, L.acat));
        } else {
            rec.range = "mate";
            const NatTrans a = whisker_right(coev_l[u(k)], functor_compose(L.sigma.functor, P.lbar.functor));
            const NatTrans b = whisker_left(L.lbar.functor, whisker_right(nat_star(lam->conns[u(k)]), P.lbar.functor));
            const NatTrans c = whisker_left(functor_compose(L.lbar.functor, L.delta.functor), ev_l[u(k - 1)]);
            wbar = vertical(c, vertical(b, a));
        }
        rec.agreement = nat_distance(wbar, reference);
        rec.unitarity = nat_unitarity_residual(wbar);
        out.connections.push_back(rec);
        lbar->conns.push_back(wbar);
    }
    out.lambar = lbar;

    out.d_lambda.cell = lbar;
    out.d_lambda.dual = lam;
    out.d_lambda.ev = TwoCell{one_cell_compose(lam, lbar), identity_one_cell(out.delta), l, ev_l};
    out.d_lambda.coev = TwoCell{identity_one_cell(out.sigma), one_cell_compose(lbar, lam), l, coev_l};

    // X = Lambda F, Xbar = Fbar Lbar and the composite duality.
    out.x = one_cell_compose(lam, f);
    out.xbar = one_cell_compose(fbar, lbar);
    std::vector<NatTrans> ev_x(u(K + 1)), coev_x(u(K + 1)), beta(u(K + 1)), gamma(u(K + 1)), gamma_direct(u(K + 1));
    for (int k = l; k <= K; ++k) {
        const Level& L = lv[u(k)];
        ev_x[u(k)] = vertical(ev_l[u(k)], whisker_left(L.chi.functor, whisker_right(out.d_f.ev.at(k), L.lbar.functor)));
        coev_x[u(k)] = vertical(whisker_left(L.fbar.functor, whisker_right(coev_l[u(k)], L.f.functor)), out.d_f.coev.at(k));
        const StarRep lhs = rep_compose(L.lbar, rep_compose(L.chi, L.f));
        beta[u(k)] = nat_from_intertwiner(lhs, canonical_rep(functor_compose(L.f.functor, L.fr.q), L.fr.gen), Mor::identity(L.yq));
        gamma[u(k)] = vertical(whisker_right(nat_star(out.d_f.coev.at(k)), L.fr.q), whisker_left(L.fbar.functor, beta[u(k)]));
        gamma_direct[u(k)] = nat_from_intertwiner(rep_compose(L.fbar, lhs), canonical_rep(L.fr.q, L.fr.gen), Mor::identity(L.fr.qgen));
    }
    out.d_x.cell = out.xbar;
    out.d_x.dual = out.x;
    out.d_x.ev = TwoCell{one_cell_compose(out.x, out.xbar), identity_one_cell(out.delta), l, ev_x};
    out.d_x.coev = TwoCell{identity_one_cell(m), one_cell_compose(out.xbar, out.x), l, coev_x};
    out.beta = TwoCell{one_cell_compose(lbar, out.x), one_cell_compose(f, q.q), l, beta};
    out.gamma = TwoCell{out.d_x.coev.to, q.q, l, gamma};

    // Certificate.
    const QSystem qp = from_dual_pair(out.d_x, opt.tol, q.name + "'");
    const CheckReport dx = duality_check(out.d_x, opt.tol);
    const CheckReport dl = duality_check(out.d_lambda, opt.tol);
    const double eps = opt.tol.eps_num;
    auto level_report = [&](int k) {
        LevelReport rep;
        rep.k = k;
        const auto uk = u(k);
        const NatTrans& g = gamma[uk];
        const Functor& qk = q.q->lambdas[uk];
        const Functor& qpk = qp.q->lambdas[uk];
        const NatTrans gg = vertical(whisker_right(g, qk), whisker_left(qpk, g));
        rep.residuals["gamma_unitarity"] = nat_unitarity_residual(g);
        rep.residuals["beta_unitarity"] = nat_unitarity_residual(beta[uk]);
        rep.residuals["gamma_direct"] = nat_residual_or_zero(g, gamma_direct[uk]);
        rep.residuals["mult"] = nat_distance(vertical(g, qp.m.at(k)), vertical(q.m.at(k), gg));
        rep.residuals["unit"] = nat_distance(vertical(g, qp.i.at(k)), q.i.at(k));
        rep.residuals["beta_exchange"] = exchange_residual(beta[uk], beta[uk + 1], *out.beta.from, *out.beta.to, k);
        rep.residuals["gamma_exchange"] = exchange_residual(g, gamma[uk + 1], *out.gamma.from, *out.gamma.to, k);
        for (const auto& lr : dx.levels)
            if (lr.k == k)
                for (const auto& [name, v] : lr.residuals) rep.residuals["X_" + name] = v;
        for (const auto& lr : dl.levels)
            if (lr.k == k)
                for (const auto& [name, v] : lr.residuals) rep.residuals["Lambda_" + name] = v;
        for (const auto& c : out.connections)
            if (c.k == k) rep.residuals["Lbar_connection"] = std::max(c.agreement, c.unitarity);
        for (const auto& [name, v] : rep.residuals)
            if (!(v <= eps)) rep.pass = false;
        return rep;
    };
    std::vector<LevelReport> reps(u(out.depth - l));
    if (opt.jobs > 1) {
        std::vector<std::future<LevelReport>> fut;
        for (int k = l; k < out.depth; ++k) fut.push_back(std::async(std::launch::async, level_report, k));
        for (std::size_t t = 0; t < fut.size(); ++t) reps[t] = fut[t].get();
    } else {
        for (int k = l; k < out.depth; ++k) reps[u(k - l)] = level_report(k);
    }
    out.certificate.levels = reps;
    for (const auto& c : out.connections) {
        out.certificate.notes.push_back("Lbar connection at level " + std::to_string(c.k) + ": " + c.range);
        if (!(c.agreement <= eps && c.unitarity <= eps)) {
            out.certificate.notes.push_back("Lbar connection at level " + std::to_string(c.k) + " fails");
            out.certificate.level(c.k).pass = false;
        }
    }
    out.certificate.finalize();
    return out;
}

QSystem rebuild_qsystem(const SplitResult& s, const SplitOptions& opt) {
    QSystem out = from_dual_pair(s.d_x, opt.tol, s.name + "'");
    return out;
}

}  // namespace qsplit
