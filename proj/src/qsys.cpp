/*
 * Q-system axioms, stability detection and the d_Q calculus.
 */
#include "qsplit/qsys.hpp"

#include <cmath>

namespace qsplit {

namespace {

NatTrans make_id(const SCatPtr& c) { return NatTrans::identity(Functor::identity(c)); }

double psd_violation(const Mor& f) {
    double worst = 0.0;
    for (const auto& b : f.blocks)
        if (b.rows() > 0) worst = std::max(worst, -min_eigenvalue(b));
    return std::max(worst, 0.0);
}

}  // namespace

QSystem make_qsystem(std::string name, OneCellPtr q, std::vector<NatTrans> m, std::vector<NatTrans> i) {
    QSystem s;
    s.name = std::move(name);
    s.base = q->from;
    if (q->from != q->to && !same_zero_cell(*q->from, *q->to))
        throw Error(ErrorCode::StructuralMismatch, "Q must be an endo 1-cell");
    s.q = q;
    s.qq = one_cell_compose(q, q);
    s.one = identity_one_cell(s.base);
    s.m = TwoCell{s.qq, q, 0, std::move(m)};
    s.i = TwoCell{s.one, q, 0, std::move(i)};
    if (s.m.depth() != q->depth() || s.i.depth() != q->depth())
        throw Error(ErrorCode::StructuralMismatch, "m and i need one component per level");
    return s;
}

QSystem identity_qsystem(const ZeroCellPtr& base) {
    auto one = identity_one_cell(base);
    std::vector<NatTrans> m, i;
    for (int k = 0; k <= base->depth(); ++k) {
        m.push_back(make_id(base->cats[static_cast<std::size_t>(k)]));
        i.push_back(make_id(base->cats[static_cast<std::size_t>(k)]));
    }
    return make_qsystem("identity", one, std::move(m), std::move(i));
}

AxiomResiduals axioms_check(const QSystem& q, int k) {
    if (k < 0 || k > q.depth()) throw Error(ErrorCode::LevelOutOfRange, "axioms_check level " + std::to_string(k));
    const auto uk = static_cast<std::size_t>(k);
    const Functor& Q = q.q->lambdas[uk];
    const NatTrans& m = q.m.at(k);
    const NatTrans& i = q.i.at(k);
    const NatTrans ms = nat_star(m);
    AxiomResiduals r;
    r.associativity = nat_distance(vertical(m, whisker_right(m, Q)), vertical(m, whisker_left(Q, m)));
    const NatTrans idq = NatTrans::identity(Q);
    r.unitality = std::max(nat_distance(vertical(m, whisker_left(Q, i)), idq), nat_distance(vertical(m, whisker_right(i, Q)), idq));
    const NatTrans mm = vertical(ms, m);
    r.frobenius = std::max(nat_distance(vertical(whisker_left(Q, m), whisker_right(ms, Q)), mm),
                           nat_distance(vertical(whisker_right(m, Q), whisker_left(Q, ms)), mm));
    r.separability = nat_distance(vertical(m, ms), idq);
    return r;
}

StabilityReport stability_level(const QSystem& q, const TolerancePolicy& tol) {
    StabilityReport out;
    const int K = q.depth();
    for (int k = std::max(q.m.start, q.i.start); k <= K; ++k) {
        const AxiomResiduals a = axioms_check(q, k);
        out.report.add(k, "associativity", a.associativity, tol.eps_num);
        out.report.add(k, "unitality", a.unitality, tol.eps_num);
        out.report.add(k, "frobenius", a.frobenius, tol.eps_num);
        out.report.add(k, "separability", a.separability, tol.eps_num);
        if (k < K) {
            out.report.add(k, "exchange_m", exchange_residual(q.m.at(k), q.m.at(k + 1), *q.qq, *q.q, k), tol.eps_num);
            out.report.add(k, "exchange_i", exchange_residual(q.i.at(k), q.i.at(k + 1), *q.one, *q.q, k), tol.eps_num);
        }
    }
    out.report.finalize();
    out.l = out.report.witness;
    if (out.l < 0 || out.l > K - 1) {
        out.l = -1;
        throw Error(ErrorCode::NeverStable, "no stability level within depth " + std::to_string(K));
    }
    return out;
}

NatTrans DqData::as_nat(const Functor& id, const std::vector<double>& v) const {
    NatTrans n = NatTrans::identity(id);
    for (std::size_t s = 0; s < v.size(); ++s) n.comps[s] = cplx(v[s]) * n.comps[s];
    return n;
}

DqData dq_calculus(const QSystem& q, int k, const TolerancePolicy& tol) {
    const AxiomResiduals ax = axioms_check(q, k);
    if (ax.max() > tol.eps_num * 10.0 * std::max(1.0, nat_norm(q.m.at(k))))
        throw Error(ErrorCode::AxiomFailure, "axioms fail at level " + std::to_string(k));
    const auto uk = static_cast<std::size_t>(k);
    const SCatPtr& cat = q.base->cats[uk];
    const Functor id = Functor::identity(cat);
    const Functor& Q = q.q->lambdas[uk];
    const NatTrans& i = q.i.at(k);
    const NatTrans& m = q.m.at(k);
    DqData out;
    out.k = k;
    const NatTrans d = vertical(nat_star(i), i);
    // The component at simple s is a scalar sitting in the s-block of Id(s) = s.
    std::vector<double> dv(d.comps.size());
    for (std::size_t s = 0; s < d.comps.size(); ++s) dv[s] = d.comps[s].blocks[s](0, 0).real();
    out.d = dv;
    const CMatrix dm = CMatrix::diag(dv);
    const CMatrix dinv = apply_spectral_function(dm, SpectralFn::PseudoInverse, tol, &out.warnings);
    const CMatrix sq = apply_spectral_function(dm, SpectralFn::SupportProjection, tol, &out.warnings);
    for (std::size_t s = 0; s < dv.size(); ++s) {
        out.d_inv.push_back(dinv(s, s).real());
        out.s.push_back(sq(s, s).real());
        out.norm = std::max(out.norm, dv[s]);
        if (out.s.back() < 0.5) out.nondegenerate = false;
    }
    out.inverse_residual = op_norm(dm * dinv - sq);
    out.projection_residual = residual_projection(sq);

    const NatTrans dnat = out.as_nat(id, dv);
    const NatTrans middle = whisker_right(dnat, q.qq->lambdas[uk]);
    const NatTrans mm = vertical(nat_star(m), m);
    const NatTrans top = nat_scale(out.norm, NatTrans::identity(q.qq->lambdas[uk]));
    const NatTrans iis = vertical(i, nat_star(i));
    const NatTrans topq = nat_scale(out.norm, NatTrans::identity(Q));
    for (std::size_t s = 0; s < cat->size(); ++s) {
        out.f2_lower = std::max(out.f2_lower, psd_violation(middle.comps[s] - mm.comps[s]));
        out.f2_upper = std::max(out.f2_upper, psd_violation(top.comps[s] - middle.comps[s]));
        out.f3b = std::max(out.f3b, psd_violation(topq.comps[s] - iis.comps[s]));
    }
    return out;
}

double self_duality_residual(const QSystem& q, int k) {
    const auto uk = static_cast<std::size_t>(k);
    const Functor& Q = q.q->lambdas[uk];
    const NatTrans& m = q.m.at(k);
    const NatTrans& i = q.i.at(k);
    const NatTrans ev = vertical(nat_star(i), m);     // QQ -> Id
    const NatTrans coev = vertical(nat_star(m), i);   // Id -> QQ
    const NatTrans idq = NatTrans::identity(Q);
    const double z1 = nat_distance(vertical(whisker_left(Q, ev), whisker_right(coev, Q)), idq);
    const double z2 = nat_distance(vertical(whisker_right(ev, Q), whisker_left(Q, coev)), idq);
    return std::max(z1, z2);
}

QSystem from_dual_pair(const DualityData& d, const TolerancePolicy& tol, std::string name) {
    const int start = std::max(d.ev.start, d.coev.start);
    for (int k = start; k <= d.cell->depth(); ++k) {
        const NatTrans& ev = d.ev.at(k);
        const double sep = nat_distance(vertical(ev, nat_star(ev)), NatTrans::identity(ev.to));
        if (sep > tol.eps_num)
            throw Error(ErrorCode::NotSeparable, "ev ev* differs from the identity by " + std::to_string(sep) + " at level " + std::to_string(k));
    }
    auto q = one_cell_compose(d.cell, d.dual);
    std::vector<NatTrans> m(static_cast<std::size_t>(d.cell->depth() + 1)), i(m.size());
    for (int k = start; k <= d.cell->depth(); ++k) {
        const auto uk = static_cast<std::size_t>(k);
        m[uk] = whisker_left(d.cell->lambdas[uk], whisker_right(d.ev.at(k), d.dual->lambdas[uk]));
        i[uk] = d.coev.at(k);
    }
    QSystem out = make_qsystem(std::move(name), q, std::move(m), std::move(i));
    out.m.start = out.i.start = start;
    return out;
}

}  // namespace qsplit
