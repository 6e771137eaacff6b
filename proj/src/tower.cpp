/*
 * tower: realization of the Q-system on the generator tower.
 *
 * Dense Mor arithmetic is used for the operations themselves. The exhaustive
 * structure checks run on flattened coordinates instead: Q acts on a matrix
 * unit by copying it along the line maps ql_gen / ql_qgen, so a product of two
 * basis elements is one column of m and phi1 of a basis element has only
 * |Q(simple)| nonzero columns.
 */
#include "qsplit/tower.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace qsplit {

Obj tower_generator(const ZeroCell& z, int k) {
    if (k < 0 || k > z.depth()) throw Error(ErrorCode::LevelOutOfRange, "tower_generator: level " + std::to_string(k));
    Obj g = generator_obj(z.cats[0]);
    for (int j = 1; j <= k; ++j) g = z.gamma(j).apply(g);
    return g;
}

std::size_t TowerAlgebra::dim() const {
    std::size_t d = 0;
    for (int b : obj.mult) d += static_cast<std::size_t>(b) * static_cast<std::size_t>(b);
    return d;
}

TowerAlgebra build_A(const ZeroCell& z, int k) { return TowerAlgebra{k, tower_generator(z, k)}; }

Mor include_A(const ZeroCell& z, int k, const Mor& a) {
    if (k + 1 > z.depth()) throw Error(ErrorCode::LevelOutOfRange, "include_A past the top level");
    return z.gamma(k + 1).apply(a);
}

namespace {

std::pair<std::size_t, std::size_t> locate(const Obj& x, std::size_t line) {
    for (std::size_t i = 0; i < x.mult.size(); ++i) {
        const std::size_t off = x.offset(i);
        if (line < off + static_cast<std::size_t>(x.mult[i])) return {i, line - off};
    }
    throw Error(ErrorCode::ShapeMismatch, "line outside object");
}

// For each line of x, the ascending list of lines of F(x) carrying a copy of it.
std::vector<std::vector<int>> line_images(const Functor& f, const Obj& x) {
    Mor d = Mor::identity(x);
    for (std::size_t i = 0; i < x.mult.size(); ++i)
        for (int r = 0; r < x.mult[i]; ++r)
            d.blocks[i](static_cast<std::size_t>(r), static_cast<std::size_t>(r)) = static_cast<double>(x.offset(i) + static_cast<std::size_t>(r) + 1);
    const CMatrix fd = flatten(f.apply(d));
    std::vector<std::vector<int>> out(x.total());
    for (std::size_t p = 0; p < fd.rows(); ++p) {
        const auto v = static_cast<std::size_t>(std::lround(fd(p, p).real()));
        out.at(v - 1).push_back(static_cast<int>(p));
    }
    return out;
}

using Cols = std::vector<int>;

// Sparse kernels on flattened H elements (N_q x N_g) and S elements (N_q x N_q).
struct Flat {
    const HSpace& h;
    std::size_t ng, nq;

    explicit Flat(const HSpace& hs) : h(hs), ng(hs.gen.total()), nq(hs.qgen.total()) {}

    CMatrix unit_vec(std::size_t a) const {
        CMatrix x(nq, ng);
        x(static_cast<std::size_t>(h.basis[a].first), static_cast<std::size_t>(h.basis[a].second)) = 1.0;
        return x;
    }

    // m Q(X) Y, skipping rows of Y that vanish.
    CMatrix product(const CMatrix& x, const CMatrix& y) const {
        std::vector<char> row_nz(y.rows(), 0);
        for (std::size_t r = 0; r < y.rows(); ++r)
            for (std::size_t c = 0; c < y.cols(); ++c)
                if (y(r, c) != cplx(0.0)) {
                    row_nz[r] = 1;
                    break;
                }
        CMatrix out(nq, y.cols());
        for (std::size_t r = 0; r < nq; ++r)
            for (std::size_t s = 0; s < ng; ++s) {
                const cplx xv = x(r, s);
                if (xv == cplx(0.0)) continue;
                const auto& gl = h.ql_gen[s];
                const auto& ql = h.ql_qgen[r];
                for (std::size_t t = 0; t < gl.size(); ++t) {
                    const auto yr = static_cast<std::size_t>(gl[t]);
                    if (!row_nz[yr]) continue;
                    const auto mc = static_cast<std::size_t>(ql[t]);
                    for (std::size_t p = 0; p < nq; ++p) {
                        const cplx mv = h.m_flat(p, mc) * xv;
                        if (mv == cplx(0.0)) continue;
                        for (std::size_t c = 0; c < y.cols(); ++c) out(p, c) += mv * y(yr, c);
                    }
                }
            }
        return out;
    }

    CMatrix phi1(const CMatrix& x) const {
        CMatrix out(nq, nq);
        for (std::size_t r = 0; r < nq; ++r)
            for (std::size_t s = 0; s < ng; ++s) {
                const cplx xv = x(r, s);
                if (xv == cplx(0.0)) continue;
                const auto& gl = h.ql_gen[s];
                const auto& ql = h.ql_qgen[r];
                for (std::size_t t = 0; t < gl.size(); ++t) {
                    const auto mc = static_cast<std::size_t>(ql[t]);
                    const auto oc = static_cast<std::size_t>(gl[t]);
                    for (std::size_t p = 0; p < nq; ++p) out(p, oc) += xv * h.m_flat(p, mc);
                }
            }
        return out;
    }

    CMatrix dagger(const CMatrix& x) const {
        CMatrix out(nq, ng);
        for (std::size_t r = 0; r < nq; ++r)
            for (std::size_t s = 0; s < ng; ++s) {
                const cplx xv = std::conj(x(r, s));
                if (xv == cplx(0.0)) continue;
                const auto& gl = h.ql_gen[s];
                const auto& ql = h.ql_qgen[r];
                for (std::size_t t = 0; t < gl.size(); ++t) {
                    const auto row = static_cast<std::size_t>(gl[t]);
                    const auto src = static_cast<std::size_t>(ql[t]);
                    for (std::size_t c = 0; c < ng; ++c) out(row, c) += xv * h.mstar_i(src, c);
                }
            }
        return out;
    }

    // x i for x in End(Q gen), exploiting zero columns of x.
    CMatrix phi2(const CMatrix& x, const CMatrix& i_flat) const {
        CMatrix out(nq, ng);
        for (std::size_t c = 0; c < nq; ++c) {
            bool nz = false;
            for (std::size_t p = 0; p < nq && !nz; ++p) nz = x(p, c) != cplx(0.0);
            if (!nz) continue;
            for (std::size_t s = 0; s < ng; ++s) {
                const cplx iv = i_flat(c, s);
                if (iv == cplx(0.0)) continue;
                for (std::size_t p = 0; p < nq; ++p) out(p, s) += x(p, c) * iv;
            }
        }
        return out;
    }
};

Cols nonzero_cols(const CMatrix& x) {
    Cols c;
    for (std::size_t j = 0; j < x.cols(); ++j)
        for (std::size_t i = 0; i < x.rows(); ++i)
            if (x(i, j) != cplx(0.0)) {
                c.push_back(static_cast<int>(j));
                break;
            }
    return c;
}

double compressed_norm(const CMatrix& x) {
    const Cols c = nonzero_cols(x);
    if (c.empty()) return 0.0;
    CMatrix y(x.rows(), c.size());
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t i = 0; i < x.rows(); ++i) y(i, j) = x(i, static_cast<std::size_t>(c[j]));
    return op_norm(y);
}

}  // namespace

Mor HSpace::element(std::size_t a) const {
    Mor x = Mor::zero(gen, qgen);
    const auto [i, lr] = locate(qgen, static_cast<std::size_t>(basis.at(a).first));
    const auto [j, ls] = locate(gen, static_cast<std::size_t>(basis.at(a).second));
    (void)j;
    x.blocks[i](lr, ls) = 1.0;
    return x;
}

Mor HSpace::from_coords(const std::vector<cplx>& c) const {
    if (c.size() != basis.size()) throw Error(ErrorCode::ShapeMismatch, "H coordinates of wrong length");
    CMatrix f(qgen.total(), gen.total());
    for (std::size_t a = 0; a < c.size(); ++a) f(static_cast<std::size_t>(basis[a].first), static_cast<std::size_t>(basis[a].second)) = c[a];
    return unflatten(f, gen, qgen);
}

std::vector<cplx> HSpace::coords(const Mor& xi) const {
    const CMatrix f = flatten(xi);
    std::vector<cplx> out(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) out[a] = f(static_cast<std::size_t>(basis[a].first), static_cast<std::size_t>(basis[a].second));
    return out;
}

HSpace build_H(const QSystem& q, int k) {
    if (k < 0 || k > q.depth()) throw Error(ErrorCode::LevelOutOfRange, "build_H: level " + std::to_string(k));
    HSpace h;
    h.k = k;
    h.q = q.q->lambdas[static_cast<std::size_t>(k)];
    h.gen = tower_generator(*q.base, k);
    h.qgen = h.q.apply(h.gen);
    h.qqgen = h.q.apply(h.qgen);
    h.m_gen = nat_extend(q.m.at(k), h.gen);
    h.i_gen = nat_extend(q.i.at(k), h.gen);
    h.m_flat = flatten(h.m_gen);
    h.mstar_i = flatten(mor_compose(mor_star(h.m_gen), h.i_gen));
    for (std::size_t i = 0; i < h.gen.mult.size(); ++i)
        for (int r = 0; r < h.qgen.mult[i]; ++r)
            for (int s = 0; s < h.gen.mult[i]; ++s)
                h.basis.emplace_back(static_cast<int>(h.qgen.offset(i)) + r, static_cast<int>(h.gen.offset(i)) + s);
    h.ql_gen = line_images(h.q, h.gen);
    h.ql_qgen = line_images(h.q, h.qgen);
    h.owner.assign(h.qgen.total(), {-1, -1});
    for (std::size_t s = 0; s < h.ql_gen.size(); ++s)
        for (std::size_t t = 0; t < h.ql_gen[s].size(); ++t) h.owner[static_cast<std::size_t>(h.ql_gen[s][t])] = {static_cast<int>(s), static_cast<int>(t)};
    return h;
}

Mor h_product(const HSpace& h, const Mor& xi, const Mor& eta) { return mor_compose(h.m_gen, mor_compose(h.q.apply(xi), eta)); }
Mor h_unit(const HSpace& h) { return h.i_gen; }
Mor h_dagger(const HSpace& h, const Mor& xi) {
    return mor_compose(h.q.apply(mor_star(xi)), mor_compose(mor_star(h.m_gen), h.i_gen));
}
Mor h_left(const HSpace& h, const Mor& a, const Mor& xi) { return mor_compose(h.q.apply(a), xi); }
Mor h_right(const Mor& xi, const Mor& a) { return mor_compose(xi, a); }
Mor h_inner(const Mor& xi, const Mor& zeta) { return mor_compose(mor_star(zeta), xi); }
Mor h_embed(const HSpace& h, const Mor& a) { return mor_compose(h.i_gen, a); }

Mor phi1(const HSpace& h, const Mor& xi) { return mor_compose(h.m_gen, h.q.apply(xi)); }
Mor phi2(const HSpace& h, const Mor& x) { return mor_compose(x, h.i_gen); }
Mor s_project(const HSpace& h, const Mor& x) { return phi1(h, phi2(h, x)); }

Mor include_H(const QSystem& q, const HSpace& hk, const Mor& xi) {
    if (hk.k + 1 > q.depth()) throw Error(ErrorCode::LevelOutOfRange, "include_H past the top level");
    const Mor w = nat_extend(q.q->conns[static_cast<std::size_t>(hk.k + 1)], hk.gen);
    return mor_compose(w, q.base->gamma(hk.k + 1).apply(xi));
}

Mor include_C(const QSystem& q, const HSpace& hk, const Mor& c) {
    if (hk.k + 1 > q.depth()) throw Error(ErrorCode::LevelOutOfRange, "include_C past the top level");
    const Mor w = nat_extend(q.q->conns[static_cast<std::size_t>(hk.k + 1)], hk.gen);
    return mor_compose(w, mor_compose(q.base->gamma(hk.k + 1).apply(c), mor_star(w)));
}

TowerAlgebra build_C(const QSystem& q, int k) {
    if (k < 0 || k > q.depth()) throw Error(ErrorCode::LevelOutOfRange, "build_C: level " + std::to_string(k));
    return TowerAlgebra{k, q.q->lambdas[static_cast<std::size_t>(k)].apply(tower_generator(*q.base, k))};
}

double HStructureReport::max() const {
    return std::max({associativity, unit, dagger_anti, dagger_star, involution, cstar, phi21, phi12});
}

HStructureReport h_structure_check(const HSpace& h, std::size_t max_pairs, std::uint64_t seed) {
    const Flat f(h);
    const std::size_t n = h.dim();
    HStructureReport rep;
    rep.dim_h = n;
    rep.pairs_total = n * n;
    const bool exhaustive = n * n <= max_pairs;

    std::vector<std::size_t> elems(n);
    std::iota(elems.begin(), elems.end(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    Rng rng(seed);
    if (exhaustive) {
        pairs.reserve(n * n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) pairs.emplace_back(a, b);
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t p = 0; p < max_pairs; ++p) pairs.emplace_back(pick(rng), pick(rng));
        std::shuffle(elems.begin(), elems.end(), rng);
        elems.resize(std::min<std::size_t>(n, 1024));
        std::sort(elems.begin(), elems.end());
    }
    rep.pairs_checked = pairs.size();

    const CMatrix i_flat = flatten(h.i_gen);
    std::vector<CMatrix> phi(n), dag(n);
    for (std::size_t a = 0; a < n; ++a) {
        phi[a] = f.phi1(f.unit_vec(a));
        dag[a] = f.dagger(f.unit_vec(a));
    }

    // Pairs are visited grouped by (b, s_a) so the vectors u_t below, which only
    // depend on b and the gen line of a, are computed once per group.
    std::sort(pairs.begin(), pairs.end(), [&](const auto& x, const auto& y) {
        const auto kx = std::make_tuple(x.second, h.basis[x.first].second, x.first);
        const auto ky = std::make_tuple(y.second, h.basis[y.first].second, y.first);
        return kx < ky;
    });
    const std::size_t nq = f.nq, ng = f.ng;
    const CMatrix& m = h.m_flat;
    const CMatrix& mi = h.mstar_i;
    std::vector<cplx> lhs(nq), rhs(nq), diff(nq * ng), u;
    long cached_b = -1, cached_sa = -1;
    for (const auto& [a, b] : pairs) {
        const auto ra = static_cast<std::size_t>(h.basis[a].first), sa = static_cast<std::size_t>(h.basis[a].second);
        const auto rb = static_cast<std::size_t>(h.basis[b].first), sb = static_cast<std::size_t>(h.basis[b].second);
        const auto& ca = h.ql_gen[sa];
        const auto& cb = h.ql_gen[sb];
        const bool nz = static_cast<std::size_t>(h.owner[rb].first) == sa;
        const std::size_t vcol = nz ? static_cast<std::size_t>(h.ql_qgen[ra][static_cast<std::size_t>(h.owner[rb].second)]) : 0;

        // phi1(e_a e_b) against phi1(e_a) phi1(e_b), column by column on the support of phi1(e_b).
        double acc = 0.0;
        for (std::size_t t2 = 0; t2 < cb.size(); ++t2) {
            const auto r2 = static_cast<std::size_t>(h.ql_qgen[rb][t2]);
            std::fill(rhs.begin(), rhs.end(), cplx(0.0));
            std::fill(lhs.begin(), lhs.end(), cplx(0.0));
            for (std::size_t t1 = 0; t1 < ca.size(); ++t1) {
                const cplx w = m(static_cast<std::size_t>(ca[t1]), r2);
                if (w == cplx(0.0)) continue;
                const auto c = static_cast<std::size_t>(h.ql_qgen[ra][t1]);
                for (std::size_t p = 0; p < nq; ++p) rhs[p] += m(p, c) * w;
            }
            if (nz)
                for (std::size_t r = 0; r < nq; ++r) {
                    const cplx w = m(r, vcol);
                    if (w == cplx(0.0) || h.ql_qgen[r].size() <= t2) continue;
                    const auto c = static_cast<std::size_t>(h.ql_qgen[r][t2]);
                    for (std::size_t p = 0; p < nq; ++p) lhs[p] += m(p, c) * w;
                }
            for (std::size_t p = 0; p < nq; ++p) acc += std::norm(lhs[p] - rhs[p]);
        }
        rep.associativity = std::max(rep.associativity, std::sqrt(acc));

        // (e_a e_b)^dagger against e_b^dagger e_a^dagger. The latter is
        // sum_t u_t (x) (m* i)[Q-line t of r_a, :] with u_t depending on (b, s_a).
        const std::size_t nt = ca.size();
        if (cached_b != static_cast<long>(b) || cached_sa != static_cast<long>(sa)) {
            u.assign(nt * nq, cplx(0.0));
            for (std::size_t t1 = 0; t1 < cb.size(); ++t1) {
                const cplx x = mi(static_cast<std::size_t>(h.ql_qgen[rb][t1]), sa);
                if (x == cplx(0.0)) continue;
                const auto& lines = h.ql_qgen[static_cast<std::size_t>(cb[t1])];
                for (std::size_t t = 0; t < nt && t < lines.size(); ++t)
                    for (std::size_t p = 0; p < nq; ++p) u[t * nq + p] += x * m(p, static_cast<std::size_t>(lines[t]));
            }
            cached_b = static_cast<long>(b);
            cached_sa = static_cast<long>(sa);
        }
        std::fill(diff.begin(), diff.end(), cplx(0.0));
        for (std::size_t t = 0; t < nt; ++t) {
            const auto row = static_cast<std::size_t>(h.ql_qgen[ra][t]);
            for (std::size_t c = 0; c < ng; ++c) {
                const cplx y = mi(row, c);
                if (y == cplx(0.0)) continue;
                for (std::size_t p = 0; p < nq; ++p) diff[p * ng + c] += u[t * nq + p] * y;
            }
        }
        if (nz)
            for (std::size_t t = 0; t < cb.size(); ++t) {
                const auto row = static_cast<std::size_t>(cb[t]);
                for (std::size_t r = 0; r < nq; ++r) {
                    const cplx w = std::conj(m(r, vcol));
                    if (w == cplx(0.0) || h.ql_qgen[r].size() <= t) continue;
                    const auto src = static_cast<std::size_t>(h.ql_qgen[r][t]);
                    for (std::size_t c = 0; c < ng; ++c) diff[row * ng + c] -= w * mi(src, c);
                }
            }
        double dn = 0.0;
        for (const cplx& z : diff) dn += std::norm(z);
        rep.dagger_anti = std::max(rep.dagger_anti, std::sqrt(dn));
    }

    // mQ(i) is the left unit on all of H at once.
    const CMatrix left_unit = f.phi1(i_flat);
    rep.unit = (left_unit - CMatrix::identity(f.nq)).frobenius_norm();

    // S_k sits block-diagonally by the gen line of the basis element, so the
    // Gram rank splits into one small Gram per gen line.
    std::vector<std::vector<std::size_t>> by_col(f.ng);
    for (std::size_t a = 0; a < n; ++a) by_col[static_cast<std::size_t>(h.basis[a].second)].push_back(a);
    for (const auto& group : by_col) {
        if (group.empty()) continue;
        CMatrix g(group.size(), group.size());
        for (std::size_t x = 0; x < group.size(); ++x)
            for (std::size_t y = 0; y < group.size(); ++y) g(x, y) = hs_inner(phi[group[y]], phi[group[x]]);
        rep.dim_s += gram_orthonormal_basis(g).rank;
    }
    rep.rank_exact = true;

    for (std::size_t a : elems) {
        const CMatrix ea = f.unit_vec(a);
        rep.unit = std::max(rep.unit, (f.product(ea, i_flat) - ea).frobenius_norm());
        rep.dagger_star = std::max(rep.dagger_star, (f.phi1(dag[a]) - phi[a].adjoint()).frobenius_norm());
        rep.involution = std::max(rep.involution, (f.dagger(dag[a]) - ea).frobenius_norm());
        const double na = compressed_norm(phi[a]);
        const double nn = compressed_norm(f.phi1(f.product(dag[a], ea)));
        rep.cstar = std::max(rep.cstar, std::abs(nn - na * na));
        const CMatrix back = f.phi2(phi[a], i_flat);
        rep.phi21 = std::max(rep.phi21, (back - ea).frobenius_norm());
        rep.phi12 = std::max(rep.phi12, (f.phi1(back) - phi[a]).frobenius_norm());
    }
    return rep;
}

namespace {

Mor scale_blocks(const Mor& x, const std::vector<double>& v, bool on_dst) {
    Mor out = x;
    for (std::size_t i = 0; i < out.blocks.size(); ++i) out.blocks[i] *= cplx(v[i]);
    (void)on_dst;
    return out;
}

Mor diag_mor(const Obj& x, const std::vector<double>& v) {
    Mor out = Mor::identity(x);
    for (std::size_t i = 0; i < out.blocks.size(); ++i) out.blocks[i] *= cplx(v[i]);
    return out;
}

}  // namespace

Mor cond_exp(const HSpace& h, const DqData& d, const Mor& xi) {
    return scale_blocks(mor_compose(mor_star(h.i_gen), xi), d.d_inv, true);
}

Mor cond_exp_c(const HSpace& h, const DqData& d, const Mor& x) {
    return scale_blocks(mor_compose(mor_star(h.i_gen), mor_compose(x, h.i_gen)), d.d_inv, true);
}

ExpectationReport expectation_check(const HSpace& h, const DqData& d, std::uint64_t seed, int samples) {
    ExpectationReport rep;
    rep.d_norm = d.norm;
    Rng rng(seed);
    const Mor s = diag_mor(h.gen, d.s);
    const Mor dinv = diag_mor(h.gen, d.d_inv);
    rep.unitality = mor_distance(cond_exp(h, d, h.i_gen), s);
    for (int t = 0; t < samples; ++t) {
        const Mor a = random_mor(h.gen, h.gen, rng);
        const Mor b = random_mor(h.gen, h.gen, rng);
        const Mor xi = random_mor(h.gen, h.qgen, rng);
        const Mor eta = random_mor(h.gen, h.qgen, rng);
        rep.embedding = std::max(rep.embedding, mor_distance(cond_exp(h, d, h_embed(h, a)), mor_compose(s, a)));
        rep.bimodule = std::max(rep.bimodule, mor_distance(cond_exp(h, d, h_right(h_left(h, a, xi), b)),
                                                           mor_compose(a, mor_compose(cond_exp(h, d, xi), b))));
        rep.inner_product = std::max(rep.inner_product, mor_distance(cond_exp(h, d, h_product(h, h_dagger(h, eta), xi)),
                                                                     mor_compose(dinv, h_inner(xi, eta))));
        // Positive elements of S_k: phi1(xi)* phi1(xi).
        const Mor p = phi1(h, xi);
        const Mor x = mor_compose(mor_star(p), p);
        const Mor lhs = (cplx(d.norm) * h.q.apply(cond_exp_c(h, d, x))) - x;
        rep.index_bound = std::min(rep.index_bound, min_eigenvalue(hermitian_part(flatten(lhs))));
    }
    // Faithfulness on the basis: E(e* e) = d^{-1} e* e in flattened form.
    const Flat f(h);
    rep.faithful_min = std::numeric_limits<double>::infinity();
    const CMatrix istar = flatten(h.i_gen).adjoint();
    for (std::size_t a = 0; a < h.dim(); ++a) {
        const CMatrix ea = f.unit_vec(a);
        const CMatrix e = istar * f.product(f.dagger(ea), ea);
        const auto [j, ls] = locate(h.gen, static_cast<std::size_t>(h.basis[a].second));
        (void)ls;
        rep.faithful_min = std::min(rep.faithful_min, d.d_inv[j] * e.max_abs());
        if (d.s[j] < 0.5) rep.faithful_min = std::min(rep.faithful_min, e.max_abs());
    }
    return rep;
}

std::vector<Mor> pp_basis(const HSpace& h) {
    std::vector<Mor> out;
    for (const Mor& iota : simple_resolution(h.qgen)) {
        std::size_t simple = 0;
        for (std::size_t i = 0; i < iota.blocks.size(); ++i)
            if (iota.blocks[i].rows() > 0 && iota.blocks[i].cols() > 0 && iota.blocks[i].max_abs() > 0.0) simple = i;
        Mor first = Mor::zero(simple_obj(h.gen.cat, simple), h.gen);
        if (h.gen.mult[simple] == 0) throw Error(ErrorCode::MissingSimple, "generator misses a simple");
        first.blocks[simple](0, 0) = 1.0;
        out.push_back(mor_compose(iota, mor_star(first)));
    }
    return out;
}

std::vector<Mor> pp_transport(const QSystem& q, const HSpace& hk, const std::vector<Mor>& basis) {
    std::vector<Mor> out;
    out.reserve(basis.size());
    for (const Mor& s : basis) out.push_back(include_H(q, hk, s));
    return out;
}

double pp_completeness(const std::vector<Mor>& basis) {
    if (basis.empty()) return 0.0;
    Mor acc = Mor::zero(basis[0].dst, basis[0].dst);
    for (const Mor& s : basis) acc = acc + mor_compose(s, mor_star(s));
    return mor_distance(acc, Mor::identity(basis[0].dst));
}

double pp_reconstruction(const HSpace& h, const std::vector<Mor>& basis, std::uint64_t seed, int samples) {
    Rng rng(seed);
    double r = 0.0;
    for (int t = 0; t < samples; ++t) {
        const Mor xi = random_mor(h.gen, h.qgen, rng);
        Mor acc = Mor::zero(h.gen, h.qgen);
        for (const Mor& s : basis) acc = acc + h_right(s, h_inner(xi, s));
        r = std::max(r, mor_distance(acc, xi));
    }
    return r;
}

double pp_separability(const HSpace& h, const std::vector<Mor>& basis) {
    Mor acc = Mor::zero(h.qgen, h.qgen);
    for (const Mor& s : basis) {
        const Mor p = phi1(h, s);
        acc = acc + mor_compose(p, mor_star(p));
    }
    return mor_distance(acc, Mor::identity(h.qgen));
}

std::vector<int> Wedderburn::dims() const {
    std::vector<int> d;
    for (const auto& b : blocks) d.push_back(static_cast<int>(b.size));
    return d;
}

std::vector<CMatrix> Wedderburn::to_blocks(const CMatrix& x) const {
    std::vector<CMatrix> out;
    for (const auto& b : blocks) out.push_back(adjoint_times(b.isometries[0], x * b.isometries[0]));
    return out;
}

CMatrix Wedderburn::from_blocks(const std::vector<CMatrix>& bs) const {
    if (bs.size() != blocks.size()) throw Error(ErrorCode::ShapeMismatch, "from_blocks: block count");
    const std::size_t n = blocks.empty() ? 0 : blocks[0].isometries[0].rows();
    CMatrix out(n, n);
    for (std::size_t j = 0; j < blocks.size(); ++j)
        for (const CMatrix& v : blocks[j].isometries) out += v * bs[j] * v.adjoint();
    return out;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& p, std::size_t x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
}

// One attempt; returns false when the sampled elements were not generic enough.
bool wedderburn_attempt(const std::function<CMatrix(Rng&)>& sample, std::size_t n, std::size_t dim, Rng& rng,
                        double tol, Wedderburn& out) {
    const CMatrix x = sample(rng);
    const CMatrix h = hermitian_part(x);
    const SpectralDecomposition sd = hermitian_eig(h);
    double spread = 1.0;
    for (double e : sd.eigenvalues) spread = std::max(spread, std::abs(e));
    // Cluster eigenvalues: copies of one minimal projection share an eigenvalue exactly.
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) {
        if (!clusters.empty() && sd.eigenvalues[i] - sd.eigenvalues[clusters.back().back()] < 1e-7 * spread)
            clusters.back().push_back(i);
        else
            clusters.push_back({i});
    }
    std::vector<CMatrix> e;
    for (const auto& c : clusters) {
        CMatrix v(n, c.size());
        for (std::size_t j = 0; j < c.size(); ++j)
            for (std::size_t r = 0; r < n; ++r) v(r, j) = sd.basis(r, c[j]);
        e.push_back(v);
    }
    const CMatrix s1 = sample(rng), s2 = sample(rng);
    const double scale = std::max({1.0, op_norm(s1), op_norm(s2)});
    // Minimality: p s p is a multiple of p.
    for (const CMatrix& v : e) {
        const CMatrix m = adjoint_times(v, s1 * v);
        const cplx avg = m.trace() / static_cast<double>(m.rows());
        if ((m - avg * CMatrix::identity(m.rows())).max_abs() > tol * scale) return false;
    }
    std::vector<std::size_t> parent(e.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<CMatrix> links(e.size() * e.size());
    for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = a + 1; b < e.size(); ++b) {
            const CMatrix m = adjoint_times(e[a], s1 * e[b]);
            const CMatrix m2 = adjoint_times(e[a], s2 * e[b]);
            if (m.max_abs() > 1e3 * tol * scale || m2.max_abs() > 1e3 * tol * scale) parent[find_root(parent, b)] = find_root(parent, a);
        }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> group_of(e.size(), -1);
    for (std::size_t a = 0; a < e.size(); ++a) {
        const std::size_t r = find_root(parent, a);
        if (group_of[r] < 0) {
            group_of[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(group_of[r])].push_back(a);
    }
    out.blocks.clear();
    std::size_t total_dim = 0;
    for (const auto& g : groups) {
        const std::size_t copies = e[g[0]].cols();
        WedderburnBlock blk;
        blk.size = g.size();
        std::vector<CMatrix> rot;  // E_a U_a*
        for (std::size_t a = 0; a < g.size(); ++a) {
            if (e[g[a]].cols() != copies) return false;
            if (a == 0) {
                rot.push_back(e[g[0]]);
                continue;
            }
            CMatrix u = adjoint_times(e[g[0]], s1 * e[g[a]]);
            const double nrm = std::sqrt(std::max(0.0, (u.adjoint() * u).trace().real() / static_cast<double>(copies)));
            if (nrm < 1e3 * tol * scale) u = adjoint_times(e[g[0]], s2 * e[g[a]]);
            const double nrm2 = std::sqrt(std::max(0.0, (u.adjoint() * u).trace().real() / static_cast<double>(copies)));
            if (nrm2 < 1e3 * tol * scale) return false;
            u *= cplx(1.0 / nrm2);
            if (residual_unitarity(u) > 1e-6) return false;
            rot.push_back(e[g[a]] * u.adjoint());
        }
        for (std::size_t t = 0; t < copies; ++t) {
            CMatrix v(n, g.size());
            for (std::size_t a = 0; a < g.size(); ++a)
                for (std::size_t r = 0; r < n; ++r) v(r, a) = rot[a](r, t);
            blk.isometries.push_back(v);
        }
        blk.central = CMatrix(n, n);
        for (const CMatrix& v : blk.isometries) blk.central += v * v.adjoint();
        total_dim += blk.size * blk.size;
        out.blocks.push_back(std::move(blk));
    }
    if (dim != 0 && total_dim != dim) return false;
    const CMatrix probe = sample(rng);
    out.reassembly = (out.from_blocks(out.to_blocks(probe)) - probe).max_abs() / std::max(1.0, probe.max_abs());
    return out.reassembly <= tol;
}

}  // namespace

Wedderburn wedderburn(const std::function<CMatrix(Rng&)>& sample, std::size_t n, std::size_t dim, std::uint64_t seed,
                      const TolerancePolicy& tol) {
    Wedderburn out;
    for (int attempt = 0; attempt < 5; ++attempt) {
        Rng rng(seed + static_cast<std::uint64_t>(attempt) * 7919u);
        out.attempts = attempt + 1;
        if (wedderburn_attempt(sample, n, dim, rng, std::max(tol.eps_num, 1e-9) * 10.0, out)) return out;
    }
    throw Error(ErrorCode::NotAlgebra, "wedderburn: no consistent block decomposition after 5 attempts");
}

FlatSpace flat_space(const OneCell& lam, int k) {
    FlatSpace s;
    s.k = k;
    s.src = tower_generator(*lam.to, k);
    s.dst = lam.lambdas.at(static_cast<std::size_t>(k)).apply(tower_generator(*lam.from, k));
    return s;
}

Mor flat_include(const OneCell& lam, int k, const Mor& xi) {
    const Obj m = tower_generator(*lam.from, k);
    const Mor w = nat_extend(lam.conns.at(static_cast<std::size_t>(k + 1)), m);
    return mor_compose(w, lam.to->gamma(k + 1).apply(xi));
}

Mor flatten_two_cell(const TwoCell& eta, int k, const Mor& xi) {
    return mor_compose(nat_extend(eta.at(k), tower_generator(*eta.from->from, k)), xi);
}

std::vector<double> flatten_drift(const TwoCell& eta) {
    std::vector<double> out;
    const int K = eta.depth();
    for (int k = 0; k < K; ++k) {
        if (k < eta.start) {
            out.push_back(0.0);
            continue;
        }
        const FlatSpace sp = flat_space(*eta.from, k);
        double r = 0.0;
        for (std::size_t i = 0; i < sp.src.mult.size(); ++i)
            for (int a = 0; a < sp.dst.mult[i]; ++a)
                for (int b = 0; b < sp.src.mult[i]; ++b) {
                    Mor xi = Mor::zero(sp.src, sp.dst);
                    xi.blocks[i](static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = 1.0;
                    const Mor lhs = flatten_two_cell(eta, k + 1, flat_include(*eta.from, k, xi));
                    const Mor rhs = flat_include(*eta.to, k, flatten_two_cell(eta, k, xi));
                    r = std::max(r, mor_distance(lhs, rhs));
                }
        out.push_back(r);
    }
    return out;
}

}  // namespace qsplit
