/*
 * corr: induced functors as (inflation functor, gauge) pairs and the
 * balanced tensor oracle.
 */
#include "qsplit/corr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace qsplit {

std::size_t MMAlgebra::dim() const {
    std::size_t d = 0;
    for (int n : dims) d += static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    return d;
}

void MMAlgebra::validate() const {
    if (dims.empty()) throw Error(ErrorCode::ValidationError, "multi-matrix algebra with no blocks");
    for (int n : dims)
        if (n <= 0) throw Error(ErrorCode::ValidationError, "multi-matrix algebra block of size " + std::to_string(n));
}

SCatPtr corr_category(const std::string& name, const MMAlgebra& a) {
    a.validate();
    return make_scat(name, a.dims.size());
}

Obj regular_obj(const SCatPtr& cat, const MMAlgebra& a) {
    if (cat->size() != a.dims.size()) throw Error(ErrorCode::CategoryMismatch, "regular_obj: block count differs from " + cat->name);
    return Obj{cat, a.dims};
}

Obj recat(const Obj& x, const SCatPtr& cat) {
    if (cat->size() != x.mult.size()) throw Error(ErrorCode::CategoryMismatch, "recat: " + x.cat->name + " -> " + cat->name);
    return Obj{cat, x.mult};
}

Mor recat(const Mor& f, const SCatPtr& cat) {
    Mor g = f;
    g.src = recat(f.src, cat);
    g.dst = recat(f.dst, cat);
    return g;
}

Mor ConcreteAlgebra::to_std(const Mor& x) const {
    if (x.src != carrier || x.dst != carrier) throw Error(ErrorCode::ObjectMismatch, name + ": element not in End(carrier)");
    const Obj s = std_obj();
    Mor out{s, s, w.to_blocks(flatten(x))};
    return out;
}

Mor ConcreteAlgebra::from_std(const Mor& b) const {
    if (b.src != std_obj() || b.dst != std_obj()) throw Error(ErrorCode::ObjectMismatch, name + ": not a standard-coordinate element");
    return unflatten(w.from_blocks(b.blocks), carrier, carrier);
}

ConcreteAlgebra concrete_algebra(const std::string& name, const Obj& carrier, const std::function<Mor(Rng&)>& sample,
                                 std::size_t dim, std::uint64_t seed) {
    ConcreteAlgebra a;
    a.name = name;
    a.carrier = carrier;
    a.w = wedderburn([&](Rng& r) { return flatten(sample(r)); }, carrier.total(), dim, seed);
    a.cat = corr_category(name, a.alg());
    return a;
}

namespace {

Mor matrix_unit(const Obj& x, std::size_t j, std::size_t r, std::size_t c) {
    Mor e = Mor::zero(x, x);
    e.blocks[j](r, c) = 1.0;
    return e;
}

Mor first_copy(const Obj& x, std::size_t j) {
    if (x.mult.at(j) <= 0) throw Error(ErrorCode::MissingSimple, "object of " + x.cat->name + " lacks simple " + std::to_string(j));
    Mor iota = Mor::zero(simple_obj(x.cat, j), x);
    iota.blocks[j](0, 0) = 1.0;
    return iota;
}

double rep_probe(const StarRep& r, const std::function<Mor(const Mor&)>& pi, std::uint64_t seed) {
    Rng rng(seed);
    const Mor b = random_mor(r.src, r.src, rng);
    return mor_distance(pi(b), rep_apply(r, b));
}

}  // namespace

StarRep make_rep(const Obj& src, const Obj& dst, const std::function<Mor(const Mor&)>& pi, const std::string& kind,
                 std::uint64_t seed) {
    const std::size_t ns = src.mult.size(), nt = dst.mult.size();
    // Range of pi(E^j_00) in every target block.
    std::vector<std::vector<CMatrix>> ranges(ns, std::vector<CMatrix>(nt));
    IntMatrix lam(nt, std::vector<int>(ns, 0));
    for (std::size_t j = 0; j < ns; ++j) {
        if (src.mult[j] <= 0) throw Error(ErrorCode::MissingSimple, "make_rep: source object is not standard");
        const Mor p = pi(matrix_unit(src, j, 0, 0));
        if (p.src != dst || p.dst != dst) throw Error(ErrorCode::ObjectMismatch, "make_rep: image outside End(dst)");
        for (std::size_t i = 0; i < nt; ++i) {
            if (dst.mult[i] == 0) continue;
            ranges[j][i] = range_basis(p.blocks[i]);
            lam[i][j] = static_cast<int>(ranges[j][i].cols());
        }
    }
    StarRep r;
    r.src = src;
    r.dst = dst;
    r.functor = Functor::basic(src.cat, dst.cat, lam, kind);
    if (r.functor.apply(src) != dst) throw Error(ErrorCode::NotUnital, "make_rep: representation is not unital on " + dst.cat->name);

    r.gauge = Mor::zero(dst, dst);
    for (std::size_t j = 0; j < ns; ++j) {
        const std::size_t bj = static_cast<std::size_t>(src.mult[j]);
        std::vector<Mor> units;
        for (std::size_t row = 0; row < bj; ++row) units.push_back(pi(matrix_unit(src, j, row, 0)));
        for (std::size_t i = 0; i < nt; ++i) {
            std::size_t off = 0;
            for (std::size_t jj = 0; jj < j; ++jj) off += static_cast<std::size_t>(lam[i][jj]) * static_cast<std::size_t>(src.mult[jj]);
            for (int c = 0; c < lam[i][j]; ++c) {
                const CMatrix v = ranges[j][i].col(static_cast<std::size_t>(c));
                for (std::size_t row = 0; row < bj; ++row)
                    r.gauge.blocks[i].set_block(0, off + static_cast<std::size_t>(c) * bj + row, units[row].blocks[i] * v);
            }
        }
    }
    const double unit = mor_unitarity_residual(r.gauge);
    if (unit > 1e-8) throw Error(ErrorCode::NotUnital, "make_rep: gauge is not unitary (" + std::to_string(unit) + ")");
    r.residual = std::max(unit, rep_probe(r, pi, seed));
    return r;
}

StarRep canonical_rep(const Functor& f, const Obj& src) {
    StarRep r;
    r.src = src;
    r.functor = f;
    r.dst = f.apply(src);
    r.gauge = Mor::identity(r.dst);
    r.canonical = true;
    return r;
}

StarRep rep_compose(const StarRep& outer, const StarRep& inner) {
    StarRep r;
    r.src = inner.src;
    r.functor = functor_compose(outer.functor, inner.functor);
    r.residual = std::max(outer.residual, inner.residual);
    if (outer.canonical) {
        r.dst = outer.functor.apply(inner.dst);
        r.gauge = outer.functor.apply(inner.gauge);
        r.canonical = inner.canonical;
        return r;
    }
    if (inner.dst != outer.src) throw Error(ErrorCode::ObjectMismatch, "rep_compose: inner carrier is not the outer source");
    r.dst = outer.dst;
    r.gauge = mor_compose(outer.gauge, outer.functor.apply(inner.gauge));
    return r;
}

Mor rep_apply(const StarRep& r, const Mor& b) {
    return mor_compose(r.gauge, mor_compose(r.functor.apply(b), mor_star(r.gauge)));
}

NatTrans nat_from_intertwiner(const StarRep& f, const StarRep& g, const Mor& u, double* intertwining) {
    if (f.src != g.src) throw Error(ErrorCode::ObjectMismatch, "nat_from_intertwiner: representations of different algebras");
    if (u.src != f.dst || u.dst != g.dst) throw Error(ErrorCode::ObjectMismatch, "nat_from_intertwiner: intertwiner has the wrong shape");
    const Mor c = mor_compose(mor_star(g.gauge), mor_compose(u, f.gauge));
    NatTrans eta;
    eta.from = f.functor;
    eta.to = g.functor;
    for (std::size_t j = 0; j < f.src.mult.size(); ++j) {
        const Mor iota = first_copy(f.src, j);
        eta.comps.push_back(mor_compose(mor_star(g.functor.apply(iota)), mor_compose(c, f.functor.apply(iota))));
    }
    if (intertwining) {
        Rng rng(47);
        const Mor b = random_mor(f.src, f.src, rng);
        *intertwining = mor_distance(mor_compose(u, rep_apply(f, b)), mor_compose(rep_apply(g, b), u));
    }
    return eta;
}

StarRep induction_functor(const Obj& a_std, const Obj& b_std, const std::function<Mor(const Mor&)>& pi) {
    return make_rep(a_std, b_std, pi, "induction");
}

NatTrans square_connection(const StarRep& path1, const StarRep& path2, const TolerancePolicy& tol) {
    if (path1.src != path2.src || path1.dst != path2.dst)
        throw Error(ErrorCode::NonCommutingSquare, "square_connection: the two paths do not share source and carrier");
    Rng rng(59);
    double diff = 0.0;
    for (int t = 0; t < 3; ++t) {
        const Mor b = random_mor(path1.src, path1.src, rng);
        diff = std::max(diff, mor_distance(rep_apply(path1, b), rep_apply(path2, b)) / std::max(1.0, mor_norm(b)));
    }
    if (diff > 100.0 * tol.eps_num)
        throw Error(ErrorCode::NonCommutingSquare, "square_connection: paths differ by " + std::to_string(diff));
    return nat_from_intertwiner(path1, path2, Mor::identity(path1.dst));
}

// ---------------------------------------------------------------- tensor oracle

namespace {

using Sparse = std::unordered_map<std::uint64_t, cplx>;

std::uint64_t key(std::size_t a, std::size_t b) { return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b); }

std::size_t root(std::vector<std::size_t>& p, std::size_t x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
}

// Rank of a sparse Hermitian PSD matrix, block by connected component.
std::size_t sparse_rank(const Sparse& g, std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<bool> live(n, false);
    for (const auto& [k, v] : g) {
        const std::size_t a = static_cast<std::size_t>(k >> 32), b = static_cast<std::size_t>(k & 0xffffffffu);
        live[a] = live[b] = true;
        p[root(p, a)] = root(p, b);
    }
    std::unordered_map<std::size_t, std::vector<std::size_t>> comps;
    for (std::size_t i = 0; i < n; ++i)
        if (live[i]) comps[root(p, i)].push_back(i);
    std::size_t rank = 0;
    for (auto& [r, nodes] : comps) {
        std::unordered_map<std::size_t, std::size_t> pos;
        for (std::size_t t = 0; t < nodes.size(); ++t) pos[nodes[t]] = t;
        CMatrix m(nodes.size(), nodes.size());
        for (std::size_t s = 0; s < nodes.size(); ++s)
            for (std::size_t t = 0; t < nodes.size(); ++t) {
                auto it = g.find(key(nodes[s], nodes[t]));
                if (it != g.end()) m(s, t) = it->second;
            }
        rank += gram_orthonormal_basis(m).rank;
    }
    return rank;
}

constexpr double kZero = 1e-14;

}  // namespace

RelTensor rel_tensor(const std::vector<CMatrix>& v, const std::vector<CMatrix>& w, const std::function<CMatrix(const CMatrix&)>& pi,
                     const std::function<CMatrix(const CMatrix&)>& ext, std::size_t fast_dim,
                     const std::function<CMatrix(Rng&)>& sample_a, std::uint64_t seed) {
    const std::size_t nv = v.size(), nw = w.size(), n = nv * nw;
    auto node = [&](std::size_t a, std::size_t b) { return a * nw + b; };

    // Oracle: <v_a (x) w_b, v_a' (x) w_b'> = Tr(w_b'* pi(v_a'* v_a) w_b), stored at (node, node').
    Sparse oracle;
    for (std::size_t a = 0; a < nv; ++a)
        for (std::size_t a2 = 0; a2 < nv; ++a2) {
            const CMatrix g = adjoint_times(v[a2], v[a]);
            if (g.max_abs() < kZero) continue;
            const CMatrix p = pi(g);
            for (std::size_t b = 0; b < nw; ++b) {
                const CMatrix u = p * w[b];
                if (u.max_abs() < kZero) continue;
                for (std::size_t b2 = 0; b2 < nw; ++b2) {
                    const cplx val = hs_inner(u, w[b2]);
                    if (std::abs(val) > kZero) oracle[key(node(a, b), node(a2, b2))] = val;
                }
            }
        }

    // Fast path: images ext(v_a) w_b, Gram assembled through their supports.
    std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, cplx>>> support;
    for (std::size_t a = 0; a < nv; ++a) {
        const CMatrix e = ext(v[a]);
        for (std::size_t b = 0; b < nw; ++b) {
            const CMatrix img = e * w[b];
            for (std::size_t t = 0; t < img.size(); ++t)
                if (std::abs(img.data()[t]) > kZero) support[t].emplace_back(node(a, b), img.data()[t]);
        }
    }
    Sparse fast;
    for (const auto& [pos, list] : support)
        for (const auto& [n1, x1] : list)
            for (const auto& [n2, x2] : list) fast[key(n1, n2)] += x1 * std::conj(x2);

    RelTensor out;
    out.dim_fast = fast_dim;
    out.dim_oracle = sparse_rank(oracle, n);
    for (const auto& [k, x] : oracle) {
        auto it = fast.find(k);
        out.gram_residual = std::max(out.gram_residual, std::abs(x - (it == fast.end() ? cplx(0.0) : it->second)));
    }
    for (const auto& [k, x] : fast)
        if (!oracle.count(k)) out.gram_residual = std::max(out.gram_residual, std::abs(x));
    const std::size_t fr = sparse_rank(fast, n);
    out.fast_rank_residual = std::abs(static_cast<double>(fr) - static_cast<double>(fast_dim));

    // Balancing on probes: |(v a) (x) w - v (x) pi(a) w|^2 relative to the two norms.
    // The squared form avoids the square root of a cancellation.
    auto ip = [&](const CMatrix& x, const CMatrix& y, const CMatrix& x2, const CMatrix& y2) {
        return hs_inner(pi(adjoint_times(x2, x)) * y, y2);
    };
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick_v(0, nv - 1), pick_w(0, nw - 1);
    for (int t = 0; t < 6 && nv > 0 && nw > 0; ++t) {
        const CMatrix g = sample_a(rng);
        const CMatrix& x = v[pick_v(rng)];
        const CMatrix& y = w[pick_w(rng)];
        const CMatrix x1 = x * g, y2 = pi(g) * y;
        const double n1 = std::real(ip(x1, y, x1, y)), n2 = std::real(ip(x, y2, x, y2));
        const double sq = n1 + n2 - 2.0 * std::real(ip(x1, y, x, y2));
        out.balance_residual = std::max(out.balance_residual, std::abs(sq) / std::max(n1 + n2, 1e-300));
    }
    return out;
}

RelTensor h_tensor_h(const HSpace& h, std::uint64_t rotate_seed) {
    std::vector<CMatrix> basis;
    for (std::size_t a = 0; a < h.dim(); ++a) basis.push_back(flatten(h.element(a)));
    if (rotate_seed != 0) {
        Rng rng(rotate_seed);
        const CMatrix u = random_unitary(basis.size(), rng);
        std::vector<CMatrix> mixed;
        for (std::size_t a = 0; a < basis.size(); ++a) {
            CMatrix x = CMatrix::zeros(basis[0].rows(), basis[0].cols());
            for (std::size_t b = 0; b < basis.size(); ++b) x += u(a, b) * basis[b];
            mixed.push_back(x);
        }
        basis = std::move(mixed);
    }
    auto pi = [&](const CMatrix& g) { return flatten(h.q.apply(unflatten(g, h.gen, h.gen))); };
    auto ext = [&](const CMatrix& xi) { return flatten(h.q.apply(unflatten(xi, h.gen, h.qgen))); };
    std::size_t fast = 0;
    for (std::size_t i = 0; i < h.gen.mult.size(); ++i)
        fast += static_cast<std::size_t>(h.qqgen.mult[i]) * static_cast<std::size_t>(h.gen.mult[i]);
    auto sample = [&](Rng& rng) { return flatten(random_mor(h.gen, h.gen, rng)); };
    return rel_tensor(basis, basis, pi, ext, fast, sample);
}

}  // namespace qsplit
