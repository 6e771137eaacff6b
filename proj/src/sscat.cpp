/*
 * Semisimple categories: block bookkeeping for objects and morphisms.
 */
#include "qsplit/sscat.hpp"

#include <algorithm>
#include <sstream>

namespace qsplit {

SCatPtr make_scat(std::string name, std::size_t n_simples) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n_simples; ++i) labels.push_back("s" + std::to_string(i));
    return make_scat(std::move(name), std::move(labels));
}

SCatPtr make_scat(std::string name, std::vector<std::string> labels) {
    if (labels.empty()) throw Error(ErrorCode::ValidationError, "category " + name + " has no simples");
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(ErrorCode::ValidationError, "category " + name + " has repeated labels");
    return std::make_shared<const SCat>(SCat{std::move(name), std::move(labels)});
}

bool same_cat(const SCatPtr& a, const SCatPtr& b) {
    if (a == b) return true;
    return a && b && *a == *b;
}

std::size_t Obj::total() const {
    std::size_t t = 0;
    for (int m : mult) t += static_cast<std::size_t>(m);
    return t;
}

std::size_t Obj::offset(std::size_t simple) const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < simple; ++i) t += static_cast<std::size_t>(mult[i]);
    return t;
}

Obj simple_obj(const SCatPtr& cat, std::size_t i) {
    Obj x{cat, std::vector<int>(cat->size(), 0)};
    x.mult.at(i) = 1;
    return x;
}

Obj zero_obj(const SCatPtr& cat) { return Obj{cat, std::vector<int>(cat->size(), 0)}; }

Obj generator_obj(const SCatPtr& cat) { return Obj{cat, std::vector<int>(cat->size(), 1)}; }

Obj direct_sum(const Obj& a, const Obj& b) {
    if (!same_cat(a.cat, b.cat)) throw Error(ErrorCode::ObjectMismatch, "direct sum across categories");
    Obj s = a;
    for (std::size_t i = 0; i < s.mult.size(); ++i) s.mult[i] += b.mult[i];
    return s;
}

Mor Mor::identity(const Obj& x) {
    Mor f{x, x, {}};
    for (int m : x.mult) f.blocks.push_back(CMatrix::identity(static_cast<std::size_t>(m)));
    return f;
}

Mor Mor::zero(const Obj& src, const Obj& dst) {
    if (!same_cat(src.cat, dst.cat)) throw Error(ErrorCode::ObjectMismatch, "zero morphism across categories");
    Mor f{src, dst, {}};
    for (std::size_t i = 0; i < src.mult.size(); ++i)
        f.blocks.emplace_back(static_cast<std::size_t>(dst.mult[i]), static_cast<std::size_t>(src.mult[i]));
    return f;
}

void Mor::validate() const {
    if (!same_cat(src.cat, dst.cat)) throw Error(ErrorCode::ObjectMismatch, "morphism endpoints in different categories");
    if (blocks.size() != src.mult.size()) throw Error(ErrorCode::ObjectMismatch, "wrong number of blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].rows() != static_cast<std::size_t>(dst.mult[i]) ||
            blocks[i].cols() != static_cast<std::size_t>(src.mult[i])) {
            std::ostringstream os;
            os << "block " << i << " has shape " << blocks[i].rows() << "x" << blocks[i].cols();
            throw Error(ErrorCode::ObjectMismatch, os.str());
        }
    }
}

Mor mor_compose(const Mor& g, const Mor& f) {
    if (f.dst != g.src) throw Error(ErrorCode::ObjectMismatch, "compose: f.dst != g.src");
    Mor h{f.src, g.dst, {}};
    h.blocks.reserve(f.blocks.size());
    for (std::size_t i = 0; i < f.blocks.size(); ++i) h.blocks.push_back(g.blocks[i] * f.blocks[i]);
    return h;
}

Mor mor_star(const Mor& f) {
    Mor h{f.dst, f.src, {}};
    for (const auto& b : f.blocks) h.blocks.push_back(b.adjoint());
    return h;
}

Mor operator+(const Mor& a, const Mor& b) {
    if (a.src != b.src || a.dst != b.dst) throw Error(ErrorCode::ObjectMismatch, "sum of morphisms with different endpoints");
    Mor h = a;
    for (std::size_t i = 0; i < h.blocks.size(); ++i) h.blocks[i] += b.blocks[i];
    return h;
}

Mor operator-(const Mor& a, const Mor& b) {
    if (a.src != b.src || a.dst != b.dst) throw Error(ErrorCode::ObjectMismatch, "difference of morphisms with different endpoints");
    Mor h = a;
    for (std::size_t i = 0; i < h.blocks.size(); ++i) h.blocks[i] -= b.blocks[i];
    return h;
}

Mor operator*(cplx s, const Mor& a) {
    Mor h = a;
    for (auto& b : h.blocks) b *= s;
    return h;
}

std::vector<Mor> simple_resolution(const Obj& x) {
    std::vector<Mor> out;
    for (std::size_t i = 0; i < x.mult.size(); ++i) {
        const Obj s = simple_obj(x.cat, i);
        for (int c = 0; c < x.mult[i]; ++c) {
            Mor u = Mor::zero(s, x);
            u.blocks[i](static_cast<std::size_t>(c), 0) = 1.0;
            out.push_back(std::move(u));
        }
    }
    return out;
}

double mor_norm(const Mor& f) {
    double n = 0.0;
    for (const auto& b : f.blocks) n = std::max(n, op_norm(b));
    return n;
}

double mor_distance(const Mor& a, const Mor& b) { return mor_norm(a - b); }

double mor_unitarity_residual(const Mor& f) {
    double r = 0.0;
    for (const auto& b : f.blocks) {
        if (b.empty() && b.rows() == b.cols()) continue;
        r = std::max(r, residual_unitarity(b));
    }
    return r;
}

MorMetrics mor_metrics(const Mor& f, const TolerancePolicy& tol) {
    if (f.src != f.dst) throw Error(ErrorCode::ObjectMismatch, "positivity and unitarity need an endomorphism");
    MorMetrics m;
    m.norm = mor_norm(f);
    const double scale = std::max(1.0, m.norm);
    double pos = 0.0;
    for (const auto& b : f.blocks)
        if (b.rows() > 0) pos = std::max(pos, residual_positivity(b));
    m.positive = pos <= tol.eps_num * scale;
    m.unitary = mor_unitarity_residual(f) <= tol.eps_num;
    return m;
}

CMatrix flatten(const Mor& f) {
    CMatrix m(f.dst.total(), f.src.total());
    for (std::size_t i = 0; i < f.blocks.size(); ++i) m.set_block(f.dst.offset(i), f.src.offset(i), f.blocks[i]);
    return m;
}

Mor unflatten(const CMatrix& m, const Obj& src, const Obj& dst) {
    if (m.rows() != dst.total() || m.cols() != src.total())
        throw Error(ErrorCode::ObjectMismatch, "unflatten: matrix shape does not match objects");
    Mor f = Mor::zero(src, dst);
    for (std::size_t i = 0; i < f.blocks.size(); ++i)
        f.blocks[i] = m.block(dst.offset(i), src.offset(i), static_cast<std::size_t>(dst.mult[i]),
                              static_cast<std::size_t>(src.mult[i]));
    return f;
}

Mor random_mor(const Obj& src, const Obj& dst, Rng& rng) {
    Mor f = Mor::zero(src, dst);
    for (auto& b : f.blocks) b = random_matrix(b.rows(), b.cols(), rng);
    return f;
}

}  // namespace qsplit
