/*
 * Functor chains and natural transformations.
 */
#include "qsplit/funcalc.hpp"

#include <sstream>

namespace qsplit {

IntMatrix int_identity(std::size_t n) {
    IntMatrix a(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) a[i][i] = 1;
    return a;
}

IntMatrix int_product(const IntMatrix& a, const IntMatrix& b) {
    const std::size_t n = a.size(), m = b.size(), p = b.empty() ? 0 : b[0].size();
    IntMatrix c(n, std::vector<int>(p, 0));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != m) throw Error(ErrorCode::CategoryMismatch, "multiplicity matrices do not chain");
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < p; ++j) c[i][j] += a[i][k] * b[k][j];
    }
    return c;
}

std::vector<int> int_apply(const IntMatrix& a, const std::vector<int>& v) {
    std::vector<int> out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != v.size()) throw Error(ErrorCode::CategoryMismatch, "multiplicity vector has wrong length");
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
    }
    return out;
}

namespace {

Obj apply_basic(const BasicFunctor& b, const Obj& x) {
    if (!same_cat(x.cat, b.src)) throw Error(ErrorCode::CategoryMismatch, "object is not in the functor's source");
    return Obj{b.dst, int_apply(b.mult, x.mult)};
}

Mor apply_basic(const BasicFunctor& b, const Mor& f) {
    const Obj fx = apply_basic(b, f.src), fy = apply_basic(b, f.dst);
    Mor out = Mor::zero(fx, fy);
    for (std::size_t i = 0; i < b.mult.size(); ++i) {
        std::size_t ro = 0, co = 0;
        for (std::size_t j = 0; j < b.mult[i].size(); ++j) {
            for (int a = 0; a < b.mult[i][j]; ++a) {
                out.blocks[i].set_block(ro, co, f.blocks[j]);
                ro += f.blocks[j].rows();
                co += f.blocks[j].cols();
            }
        }
    }
    return out;
}

// Least-squares preimage through a single basic functor: each copy of f_j is
// averaged over the copies where it appears.
Mor preimage_basic(const BasicFunctor& b, const Mor& r, const Obj& x, const Obj& y) {
    Mor f = Mor::zero(x, y);
    std::vector<int> count(x.mult.size(), 0);
    for (std::size_t i = 0; i < b.mult.size(); ++i) {
        std::size_t ro = 0, co = 0;
        for (std::size_t j = 0; j < b.mult[i].size(); ++j) {
            const auto ny = static_cast<std::size_t>(y.mult[j]), nx = static_cast<std::size_t>(x.mult[j]);
            for (int a = 0; a < b.mult[i][j]; ++a) {
                f.blocks[j] += r.blocks[i].block(ro, co, ny, nx);
                ++count[j];
                ro += ny;
                co += nx;
            }
        }
    }
    for (std::size_t j = 0; j < count.size(); ++j)
        if (count[j] > 0) f.blocks[j] *= 1.0 / count[j];
    return f;
}

// For a coordinate isometry image F(u) (a 0/1 matrix per block), the row hit
// by each column.
std::vector<std::vector<std::size_t>> column_targets(const Mor& fu) {
    std::vector<std::vector<std::size_t>> t(fu.blocks.size());
    for (std::size_t i = 0; i < fu.blocks.size(); ++i) {
        const CMatrix& b = fu.blocks[i];
        t[i].assign(b.cols(), 0);
        for (std::size_t c = 0; c < b.cols(); ++c)
            for (std::size_t r = 0; r < b.rows(); ++r)
                if (b(r, c) != 0.0) {
                    t[i][c] = r;
                    break;
                }
    }
    return t;
}

}  // namespace

Functor Functor::identity(const SCatPtr& c) {
    Functor f;
    f.src_ = f.dst_ = c;
    return f;
}

Functor Functor::basic(const SCatPtr& src, const SCatPtr& dst, IntMatrix mult, std::string kind) {
    if (mult.size() != dst->size()) throw Error(ErrorCode::CategoryMismatch, "multiplicity matrix row count != target simples");
    for (const auto& row : mult) {
        if (row.size() != src->size()) throw Error(ErrorCode::CategoryMismatch, "multiplicity matrix column count != source simples");
        for (int v : row)
            if (v < 0) throw Error(ErrorCode::ValidationError, "negative multiplicity");
    }
    if (same_cat(src, dst) && mult == int_identity(src->size())) return identity(src);
    Functor f;
    f.src_ = src;
    f.dst_ = dst;
    f.chain_.push_back(std::make_shared<const BasicFunctor>(BasicFunctor{src, dst, std::move(mult), std::move(kind)}));
    return f;
}

IntMatrix Functor::mult() const {
    IntMatrix a = int_identity(src_->size());
    for (const auto& b : chain_) a = int_product(b->mult, a);
    return a;
}

Obj Functor::apply(const Obj& x) const {
    if (!same_cat(x.cat, src_)) throw Error(ErrorCode::CategoryMismatch, "object not in source of " + describe());
    Obj y = x;
    for (const auto& b : chain_) y = apply_basic(*b, y);
    return y;
}

Mor Functor::apply(const Mor& f) const {
    if (!same_cat(f.src.cat, src_)) throw Error(ErrorCode::CategoryMismatch, "morphism not in source of " + describe());
    Mor g = f;
    for (const auto& b : chain_) g = apply_basic(*b, g);
    return g;
}

std::string Functor::describe() const {
    if (chain_.empty()) return "Id(" + src_->name + ")";
    std::ostringstream os;
    for (std::size_t k = chain_.size(); k-- > 0;) {
        os << chain_[k]->kind << "[" << chain_[k]->src->name << "->" << chain_[k]->dst->name << "]";
        if (k) os << " o ";
    }
    return os.str();
}

bool Functor::operator==(const Functor& o) const {
    if (!same_cat(src_, o.src_) || !same_cat(dst_, o.dst_) || chain_.size() != o.chain_.size()) return false;
    for (std::size_t k = 0; k < chain_.size(); ++k)
        if (chain_[k] != o.chain_[k] && !chain_[k]->same_action(*o.chain_[k])) return false;
    return true;
}

Functor functor_compose(const Functor& g, const Functor& f) {
    if (!same_cat(f.dst_, g.src_))
        throw Error(ErrorCode::CategoryMismatch, "cannot compose " + g.describe() + " after " + f.describe());
    Functor h;
    h.src_ = f.src_;
    h.dst_ = g.dst_;
    h.chain_ = f.chain_;
    h.chain_.insert(h.chain_.end(), g.chain_.begin(), g.chain_.end());
    return h;
}

Functor functor_compose(const std::vector<Functor>& outer_to_inner) {
    if (outer_to_inner.empty()) throw Error(ErrorCode::CategoryMismatch, "empty composite");
    Functor h = outer_to_inner.back();
    for (std::size_t k = outer_to_inner.size() - 1; k-- > 0;) h = functor_compose(outer_to_inner[k], h);
    return h;
}

bool bifaithful_check(const IntMatrix& a) {
    if (a.empty()) return false;
    std::vector<bool> col(a[0].size(), false);
    for (const auto& row : a) {
        bool any = false;
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j] > 0) {
                any = true;
                col[j] = true;
            }
        if (!any) return false;
    }
    for (bool c : col)
        if (!c) return false;
    return true;
}

bool bifaithful_check(const Functor& f) { return bifaithful_check(f.mult()); }

Mor functor_preimage(const Functor& f, const Mor& r, const Obj& x, const Obj& y) {
    // Walk the chain backwards, recording intermediate objects first.
    std::vector<Obj> xs{x}, ys{y};
    for (const auto& b : f.chain()) {
        xs.push_back(apply_basic(*b, xs.back()));
        ys.push_back(apply_basic(*b, ys.back()));
    }
    if (r.src != xs.back() || r.dst != ys.back()) throw Error(ErrorCode::ObjectMismatch, "preimage: endpoints are not F(x), F(y)");
    Mor cur = r;
    for (std::size_t k = f.chain().size(); k-- > 0;) cur = preimage_basic(*f.chain()[k], cur, xs[k], ys[k]);
    return cur;
}

NatTrans NatTrans::identity(const Functor& f) {
    NatTrans eta{f, f, {}};
    for (std::size_t s = 0; s < f.src()->size(); ++s) eta.comps.push_back(Mor::identity(f.apply(simple_obj(f.src(), s))));
    return eta;
}

NatTrans NatTrans::zero(const Functor& from, const Functor& to) {
    NatTrans eta{from, to, {}};
    for (std::size_t s = 0; s < from.src()->size(); ++s) {
        const Obj x = simple_obj(from.src(), s);
        eta.comps.push_back(Mor::zero(from.apply(x), to.apply(x)));
    }
    return eta;
}

void NatTrans::validate() const {
    if (!same_cat(from.src(), to.src()) || !same_cat(from.dst(), to.dst()))
        throw Error(ErrorCode::FunctorMismatch, "natural transformation between functors with different endpoints");
    if (comps.size() != from.src()->size()) throw Error(ErrorCode::FunctorMismatch, "wrong number of components");
    for (std::size_t s = 0; s < comps.size(); ++s) {
        const Obj x = simple_obj(from.src(), s);
        if (comps[s].src != from.apply(x) || comps[s].dst != to.apply(x))
            throw Error(ErrorCode::FunctorMismatch, "component " + std::to_string(s) + " has wrong endpoints");
        comps[s].validate();
    }
}

Mor nat_extend(const NatTrans& eta, const Obj& x) {
    if (!same_cat(x.cat, eta.from.src())) throw Error(ErrorCode::CategoryMismatch, "nat_extend: object outside the source");
    const Obj fx = eta.from.apply(x), gx = eta.to.apply(x);
    Mor out = Mor::zero(fx, gx);
    // Coordinate isometries map to 0/1 matrices, so the sum of G(u) eta_s F(u)*
    // is an index scatter.
    for (std::size_t s = 0; s < x.mult.size(); ++s) {
        const Obj xs = simple_obj(x.cat, s);
        for (int c = 0; c < x.mult[s]; ++c) {
            Mor u = Mor::zero(xs, x);
            u.blocks[s](static_cast<std::size_t>(c), 0) = 1.0;
            const auto ft = column_targets(eta.from.apply(u));
            const auto gt = column_targets(eta.to.apply(u));
            const Mor& e = eta.comps[s];
            for (std::size_t i = 0; i < e.blocks.size(); ++i) {
                const CMatrix& b = e.blocks[i];
                for (std::size_t r = 0; r < b.rows(); ++r)
                    for (std::size_t q = 0; q < b.cols(); ++q) out.blocks[i](gt[i][r], ft[i][q]) += b(r, q);
            }
        }
    }
    return out;
}

Mor nat_extend_with(const NatTrans& eta, const Obj& x, const std::vector<std::pair<std::size_t, Mor>>& resolution) {
    const Obj fx = eta.from.apply(x), gx = eta.to.apply(x);
    Mor out = Mor::zero(fx, gx);
    for (const auto& [s, u] : resolution)
        out = out + mor_compose(eta.to.apply(u), mor_compose(eta.comps[s], mor_star(eta.from.apply(u))));
    return out;
}

NatTrans vertical(const NatTrans& kappa, const NatTrans& eta) {
    if (eta.to != kappa.from)
        throw Error(ErrorCode::FunctorMismatch, "vertical: " + eta.to.describe() + " vs " + kappa.from.describe());
    NatTrans out{eta.from, kappa.to, {}};
    for (std::size_t s = 0; s < eta.comps.size(); ++s) out.comps.push_back(mor_compose(kappa.comps[s], eta.comps[s]));
    return out;
}

NatTrans whisker_left(const Functor& h, const NatTrans& eta) {
    if (!same_cat(h.src(), eta.from.dst())) throw Error(ErrorCode::FunctorMismatch, "whisker_left: category mismatch");
    NatTrans out{functor_compose(h, eta.from), functor_compose(h, eta.to), {}};
    for (const auto& c : eta.comps) out.comps.push_back(h.apply(c));
    return out;
}

NatTrans whisker_right(const NatTrans& eta, const Functor& k) {
    if (!same_cat(k.dst(), eta.from.src())) throw Error(ErrorCode::FunctorMismatch, "whisker_right: category mismatch");
    NatTrans out{functor_compose(eta.from, k), functor_compose(eta.to, k), {}};
    if (k.is_identity()) {
        out.comps = eta.comps;
        return out;
    }
    for (std::size_t s = 0; s < k.src()->size(); ++s) out.comps.push_back(nat_extend(eta, k.apply(simple_obj(k.src(), s))));
    return out;
}

NatTrans nat_star(const NatTrans& eta) {
    NatTrans out{eta.to, eta.from, {}};
    for (const auto& c : eta.comps) out.comps.push_back(mor_star(c));
    return out;
}

NatTrans nat_add(const NatTrans& a, const NatTrans& b) {
    if (a.from != b.from || a.to != b.to) throw Error(ErrorCode::FunctorMismatch, "nat_add: endpoint mismatch");
    NatTrans out = a;
    for (std::size_t s = 0; s < out.comps.size(); ++s) out.comps[s] = a.comps[s] + b.comps[s];
    return out;
}

NatTrans nat_scale(cplx s, const NatTrans& a) {
    NatTrans out = a;
    for (auto& c : out.comps) c = s * c;
    return out;
}

NatTrans solve_natural_unitary(const Functor& f, const Functor& g) {
    if (!same_cat(f.src(), g.src()) || !same_cat(f.dst(), g.dst()) || f.mult() != g.mult())
        throw Error(ErrorCode::NotIsomorphic, f.describe() + " and " + g.describe() + " have different multiplicities");
    // Matching coordinate bases of F(s) and G(s) gives identity blocks; any
    // choice on simples extends to a natural transformation.
    NatTrans out{f, g, {}};
    for (std::size_t s = 0; s < f.src()->size(); ++s) out.comps.push_back(Mor::identity(f.apply(simple_obj(f.src(), s))));
    return out;
}

double nat_distance(const NatTrans& a, const NatTrans& b) {
    if (a.comps.size() != b.comps.size()) throw Error(ErrorCode::FunctorMismatch, "nat_distance: size mismatch");
    double r = 0.0;
    for (std::size_t s = 0; s < a.comps.size(); ++s) r = std::max(r, mor_distance(a.comps[s], b.comps[s]));
    return r;
}

double nat_norm(const NatTrans& a) {
    double r = 0.0;
    for (const auto& c : a.comps) r = std::max(r, mor_norm(c));
    return r;
}

double nat_unitarity_residual(const NatTrans& eta) {
    double r = 0.0;
    for (const auto& c : eta.comps) r = std::max(r, mor_unitarity_residual(c));
    return r;
}

double naturality_residual(const NatTrans& eta, std::uint64_t seed, int count) {
    Rng rng(seed);
    const SCatPtr& c = eta.from.src();
    std::uniform_int_distribution<int> md(0, 2);
    double r = 0.0;
    for (int t = 0; t < count; ++t) {
        Obj x = zero_obj(c), y = zero_obj(c);
        for (auto& m : x.mult) m = md(rng);
        for (auto& m : y.mult) m = md(rng);
        if (x.total() == 0) x.mult[0] = 1;
        if (y.total() == 0) y.mult[0] = 1;
        const Mor f = random_mor(x, y, rng);
        const Mor lhs = mor_compose(eta.to.apply(f), nat_extend(eta, x));
        const Mor rhs = mor_compose(nat_extend(eta, y), eta.from.apply(f));
        r = std::max(r, mor_distance(lhs, rhs));
    }
    return r;
}

}  // namespace qsplit
