/*
 * Truncated 0-, 1- and 2-cells, exchange relation, duality checks.
 */
#include "qsplit/uc2.hpp"

#include <sstream>

namespace qsplit {

namespace {

void require_level(int k, int lo, int hi, const char* what) {
    if (k < lo || k > hi) {
        std::ostringstream os;
        os << what << ": level " << k << " outside [" << lo << ", " << hi << "]";
        throw Error(ErrorCode::LevelOutOfRange, os.str());
    }
}

void require_same_zero(const ZeroCellPtr& a, const ZeroCellPtr& b, const char* what) {
    if (a != b && !same_zero_cell(*a, *b)) throw Error(ErrorCode::StructuralMismatch, std::string(what) + ": 0-cells differ");
}

}  // namespace

const Functor& ZeroCell::gamma(int k) const {
    require_level(k, 1, depth(), "gamma");
    return gammas[static_cast<std::size_t>(k)];
}

void ZeroCell::validate() const {
    if (cats.empty()) throw Error(ErrorCode::ValidationError, "0-cell " + name + " has no levels");
    if (gammas.size() != cats.size()) throw Error(ErrorCode::ValidationError, "0-cell " + name + ": gamma count mismatch");
    for (int k = 1; k <= depth(); ++k) {
        const Functor& g = gammas[static_cast<std::size_t>(k)];
        if (!same_cat(g.src(), cats[static_cast<std::size_t>(k - 1)]) || !same_cat(g.dst(), cats[static_cast<std::size_t>(k)]))
            throw Error(ErrorCode::ValidationError, "0-cell " + name + ": Gamma_" + std::to_string(k) + " endpoints");
        const IntMatrix a = g.mult();
        for (std::size_t j = 0; j < a[0].size(); ++j) {
            bool any = false;
            for (const auto& row : a) any = any || row[j] > 0;
            if (!any) throw Error(ErrorCode::ValidationError, "zero column in Γ_" + std::to_string(k));
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            bool any = false;
            for (int v : a[i]) any = any || v > 0;
            if (!any) throw Error(ErrorCode::ValidationError, "zero row in Γ_" + std::to_string(k));
        }
    }
}

ZeroCellPtr make_zero_cell(std::string name, std::vector<SCatPtr> cats, std::vector<IntMatrix> gamma_mults) {
    auto z = std::make_shared<ZeroCell>();
    z->name = std::move(name);
    z->cats = std::move(cats);
    if (gamma_mults.size() + 1 != z->cats.size())
        throw Error(ErrorCode::ValidationError, "0-cell " + z->name + ": need one Γ per level above 0");
    z->gammas.push_back(Functor::identity(z->cats[0]));
    for (std::size_t k = 1; k < z->cats.size(); ++k)
        z->gammas.push_back(Functor::basic(z->cats[k - 1], z->cats[k], gamma_mults[k - 1]));
    z->validate();
    return z;
}

bool same_zero_cell(const ZeroCell& a, const ZeroCell& b) {
    if (a.cats.size() != b.cats.size()) return false;
    for (std::size_t k = 0; k < a.cats.size(); ++k)
        if (!same_cat(a.cats[k], b.cats[k])) return false;
    for (std::size_t k = 1; k < a.gammas.size(); ++k)
        if (a.gammas[k] != b.gammas[k]) return false;
    return true;
}

OneCellPtr identity_one_cell(const ZeroCellPtr& z) {
    auto c = std::make_shared<OneCell>();
    c->name = "1_" + z->name;
    c->from = c->to = z;
    for (int k = 0; k <= z->depth(); ++k) {
        c->lambdas.push_back(Functor::identity(z->cats[static_cast<std::size_t>(k)]));
        c->conns.push_back(k == 0 ? NatTrans{} : NatTrans::identity(z->gamma(k)));
    }
    return c;
}

CheckReport one_cell_check(const OneCell& c, const TolerancePolicy& tol) {
    CheckReport rep;
    if (c.from->depth() != c.depth() || c.to->depth() != c.depth())
        throw Error(ErrorCode::StructuralMismatch, "1-cell " + c.name + ": depth disagrees with its 0-cells");
    for (int k = 0; k <= c.depth(); ++k) {
        const Functor& lam = c.lambdas[static_cast<std::size_t>(k)];
        if (!same_cat(lam.src(), c.from->cats[static_cast<std::size_t>(k)]) || !same_cat(lam.dst(), c.to->cats[static_cast<std::size_t>(k)]))
            throw Error(ErrorCode::StructuralMismatch, "1-cell " + c.name + ": Λ_" + std::to_string(k) + " endpoints");
        rep.add(k, "bifaithful", bifaithful_check(lam) ? 0.0 : 1.0, 0.0);
    }
    for (int k = 1; k <= c.depth(); ++k) {
        const NatTrans& w = c.conns[static_cast<std::size_t>(k)];
        const Functor from = functor_compose(c.to->gamma(k), c.lambdas[static_cast<std::size_t>(k - 1)]);
        const Functor to = functor_compose(c.lambdas[static_cast<std::size_t>(k)], c.from->gamma(k));
        if (w.from != from || w.to != to)
            throw Error(ErrorCode::StructuralMismatch, "1-cell " + c.name + ": W_" + std::to_string(k) + " endpoints");
        rep.add(k, "unitarity", nat_unitarity_residual(w), tol.eps_num);
        rep.add(k, "naturality", naturality_residual(w), tol.eps_num);
    }
    rep.finalize();
    return rep;
}

OneCellPtr one_cell_compose(const OneCellPtr& o, const OneCellPtr& l) {
    require_same_zero(l->to, o->from, "one_cell_compose");
    if (o->depth() != l->depth()) throw Error(ErrorCode::StructuralMismatch, "one_cell_compose: depths differ");
    auto c = std::make_shared<OneCell>();
    c->name = o->name + "⊠" + l->name;
    c->from = l->from;
    c->to = o->to;
    for (int k = 0; k <= l->depth(); ++k) {
        const auto uk = static_cast<std::size_t>(k);
        c->lambdas.push_back(functor_compose(o->lambdas[uk], l->lambdas[uk]));
        if (k == 0) {
            c->conns.emplace_back();
            continue;
        }
        const NatTrans outer = whisker_left(o->lambdas[uk], l->conns[uk]);
        const NatTrans inner = whisker_right(o->conns[uk], l->lambdas[uk - 1]);
        c->conns.push_back(vertical(outer, inner));
    }
    return c;
}

const NatTrans& TwoCell::at(int k) const {
    require_level(k, start, depth(), "2-cell component");
    return comps[static_cast<std::size_t>(k)];
}

TwoCell identity_two_cell(const OneCellPtr& c) {
    TwoCell t{c, c, 0, {}};
    for (const auto& lam : c->lambdas) t.comps.push_back(NatTrans::identity(lam));
    return t;
}

double exchange_residual(const NatTrans& eta_k, const NatTrans& eta_k1, const OneCell& src, const OneCell& dst, int k) {
    require_level(k, 0, src.depth() - 1, "exchange_residual");
    const auto k1 = static_cast<std::size_t>(k + 1);
    const NatTrans lhs = vertical(dst.conns[k1], whisker_left(src.to->gamma(k + 1), eta_k));
    const NatTrans rhs = vertical(whisker_right(eta_k1, src.from->gamma(k + 1)), src.conns[k1]);
    return nat_distance(lhs, rhs);
}

NatTrans exchange_transport(const NatTrans& eta_k, const OneCell& src, const OneCell& dst, int k,
                            const TolerancePolicy& tol, double* residual_out) {
    require_level(k, 0, src.depth() - 1, "exchange_transport");
    const auto k1 = static_cast<std::size_t>(k + 1);
    const Functor& gam = src.from->gamma(k + 1);
    const Functor& lam1 = src.lambdas[k1];
    const Functor& om1 = dst.lambdas[k1];
    // R = W^Omega (Delta eta_k) (W^Lambda)* is eta_{k+1} whiskered by Gamma.
    const NatTrans r = vertical(vertical(dst.conns[k1], whisker_left(src.to->gamma(k + 1), eta_k)), nat_star(src.conns[k1]));
    // Normal equations of f |-> (f Gamma) are diagonal: each simple t of M_{k+1}
    // appears once per copy inside the Gamma(s), so average over those copies.
    const SCatPtr& big = gam.dst();
    NatTrans out = NatTrans::zero(lam1, om1);
    std::vector<int> count(big->size(), 0);
    const SCatPtr& small = gam.src();
    for (std::size_t s = 0; s < small->size(); ++s) {
        const Obj gs = gam.apply(simple_obj(small, s));
        std::size_t idx = 0;
        const auto res = simple_resolution(gs);
        for (std::size_t t = 0; t < big->size(); ++t) {
            for (int c = 0; c < gs.mult[t]; ++c, ++idx) {
                const Mor& u = res[idx];
                out.comps[t] = out.comps[t] + mor_compose(mor_star(om1.apply(u)), mor_compose(r.comps[s], lam1.apply(u)));
                ++count[t];
            }
        }
    }
    for (std::size_t t = 0; t < big->size(); ++t) {
        if (count[t] == 0) throw Error(ErrorCode::NoSolution, "Γ is not bi-faithful; transport undetermined");
        out.comps[t] = (1.0 / count[t]) * out.comps[t];
    }
    const double res = exchange_residual(eta_k, out, src, dst, k);
    if (residual_out) *residual_out = res;
    const double scale = std::max(1.0, nat_norm(eta_k));
    if (res > tol.eps_num * scale)
        throw Error(ErrorCode::NoSolution, "exchange transport from level " + std::to_string(k) + " leaves residual " + std::to_string(res));
    return out;
}

NatTrans exchange_transport_back(const NatTrans& eta_k1, const OneCell& src, const OneCell& dst, int k,
                                 const TolerancePolicy& tol, double* residual_out) {
    require_level(k, 0, src.depth() - 1, "exchange_transport_back");
    const auto k1 = static_cast<std::size_t>(k + 1);
    const auto uk = static_cast<std::size_t>(k);
    const Functor& delta = src.to->gamma(k + 1);
    // Delta eta_k = (W^Omega)* (eta_{k+1} Gamma) W^Lambda.
    const NatTrans r = vertical(vertical(nat_star(dst.conns[k1]), whisker_right(eta_k1, src.from->gamma(k + 1))), src.conns[k1]);
    NatTrans out = NatTrans::zero(src.lambdas[uk], dst.lambdas[uk]);
    for (std::size_t s = 0; s < out.comps.size(); ++s) {
        const Obj x = src.lambdas[uk].apply(simple_obj(src.from->cats[uk], s));
        const Obj y = dst.lambdas[uk].apply(simple_obj(src.from->cats[uk], s));
        out.comps[s] = functor_preimage(delta, r.comps[s], x, y);
    }
    const double res = exchange_residual(out, eta_k1, src, dst, k);
    if (residual_out) *residual_out = res;
    if (res > tol.eps_num * std::max(1.0, nat_norm(eta_k1)))
        throw Error(ErrorCode::NoSolution, "backward transport to level " + std::to_string(k) + " leaves residual " + std::to_string(res));
    return out;
}

CheckReport two_cell_check(const TwoCell& eta, const TolerancePolicy& tol) {
    CheckReport rep;
    for (int k = eta.start; k < eta.depth(); ++k)
        rep.add(k, "exchange", exchange_residual(eta.at(k), eta.at(k + 1), *eta.from, *eta.to, k), tol.eps_num);
    rep.finalize();
    return rep;
}

TwoCell two_cell_vertical(const TwoCell& kappa, const TwoCell& eta) {
    if (eta.to != kappa.from && eta.to->name != kappa.from->name)
        throw Error(ErrorCode::StructuralMismatch, "vertical: 1-cells do not match");
    TwoCell out{eta.from, kappa.to, std::max(eta.start, kappa.start), {}};
    out.comps.resize(eta.comps.size());
    for (int k = out.start; k <= eta.depth(); ++k)
        out.comps[static_cast<std::size_t>(k)] = vertical(kappa.at(k), eta.at(k));
    return out;
}

TwoCell two_cell_horizontal(const TwoCell& kappa, const TwoCell& eta, OneCellPtr from, OneCellPtr to) {
    require_same_zero(eta.from->to, kappa.from->from, "horizontal");
    if (!from) from = one_cell_compose(kappa.from, eta.from);
    if (!to) to = one_cell_compose(kappa.to, eta.to);
    TwoCell out{from, to, std::max(eta.start, kappa.start), {}};
    out.comps.resize(eta.comps.size());
    for (int k = out.start; k <= eta.depth(); ++k) {
        const auto uk = static_cast<std::size_t>(k);
        // (kappa Lambda') o (Omega eta)
        out.comps[uk] = vertical(whisker_right(kappa.at(k), eta.to->lambdas[uk]), whisker_left(kappa.from->lambdas[uk], eta.at(k)));
    }
    return out;
}

TwoCell two_cell_star(const TwoCell& eta) {
    TwoCell out{eta.to, eta.from, eta.start, {}};
    out.comps.resize(eta.comps.size());
    for (int k = eta.start; k <= eta.depth(); ++k) out.comps[static_cast<std::size_t>(k)] = nat_star(eta.at(k));
    return out;
}

TwoCell two_cell_whisker_left(const OneCellPtr& h, const TwoCell& eta, OneCellPtr from, OneCellPtr to) {
    if (!from) from = one_cell_compose(h, eta.from);
    if (!to) to = one_cell_compose(h, eta.to);
    TwoCell out{from, to, eta.start, {}};
    out.comps.resize(eta.comps.size());
    for (int k = eta.start; k <= eta.depth(); ++k)
        out.comps[static_cast<std::size_t>(k)] = whisker_left(h->lambdas[static_cast<std::size_t>(k)], eta.at(k));
    return out;
}

TwoCell two_cell_whisker_right(const TwoCell& eta, const OneCellPtr& kc, OneCellPtr from, OneCellPtr to) {
    if (!from) from = one_cell_compose(eta.from, kc);
    if (!to) to = one_cell_compose(eta.to, kc);
    TwoCell out{from, to, eta.start, {}};
    out.comps.resize(eta.comps.size());
    for (int k = eta.start; k <= eta.depth(); ++k)
        out.comps[static_cast<std::size_t>(k)] = whisker_right(eta.at(k), kc->lambdas[static_cast<std::size_t>(k)]);
    return out;
}

Eventually equal_eventually(const TwoCell& a, const TwoCell& b, const TolerancePolicy& tol) {
    Eventually e;
    const int lo = std::max(a.start, b.start);
    for (int k = a.depth(); k >= lo; --k) {
        const double d = nat_distance(a.at(k), b.at(k));
        e.max_diff = std::max(e.max_diff, d);
        if (d > tol.eps_num) break;
        e.witness = k;
    }
    // Equal means agreement on a non-empty tail of stored levels; the witness
    // is where that tail begins.
    e.equal = e.witness >= 0;
    return e;
}

CheckReport duality_check(const DualityData& d, const TolerancePolicy& tol) {
    CheckReport rep;
    const OneCell& x = *d.cell;
    const OneCell& xb = *d.dual;
    require_same_zero(x.from, xb.to, "duality_check");
    require_same_zero(x.to, xb.from, "duality_check");
    const int start = std::max(d.ev.start, d.coev.start);
    for (int k = start; k <= x.depth(); ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const Functor& X = x.lambdas[uk];
        const Functor& Xb = xb.lambdas[uk];
        const NatTrans& ev = d.ev.at(k);
        const NatTrans& coev = d.coev.at(k);
        const NatTrans z1 = vertical(whisker_left(X, ev), whisker_right(coev, X));
        const NatTrans z2 = vertical(whisker_right(ev, Xb), whisker_left(Xb, coev));
        rep.add(k, "zigzag_X", nat_distance(z1, NatTrans::identity(X)), tol.eps_num);
        rep.add(k, "zigzag_Xbar", nat_distance(z2, NatTrans::identity(Xb)), tol.eps_num);
        rep.add(k, "separability", nat_distance(vertical(ev, nat_star(ev)), NatTrans::identity(ev.to)), tol.eps_num);
        if (k < x.depth()) {
            rep.add(k, "exchange_ev", exchange_residual(ev, d.ev.at(k + 1), *d.ev.from, *d.ev.to, k), tol.eps_num);
            rep.add(k, "exchange_coev", exchange_residual(coev, d.coev.at(k + 1), *d.coev.from, *d.coev.to, k), tol.eps_num);
        }
    }
    rep.finalize();
    return rep;
}

}  // namespace qsplit
