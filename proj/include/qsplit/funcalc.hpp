/*
 * funcalc: *-functors between semisimple categories and natural
 * transformations between them.
 *
 * A functor is kept as a chain of basic canonical-inflation functors. The
 * identity is the empty chain and composition concatenates chains, so
 * composites are strictly associative and never normalized. Block i of F(f)
 * for a basic functor with multiplicity matrix A is the direct sum over
 * source simples j (ascending) of A[i][j] copies of f_j.
 */
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qsplit/sscat.hpp"

namespace qsplit {

using IntMatrix = std::vector<std::vector<int>>;  // rows = dst simples, cols = src simples

IntMatrix int_identity(std::size_t n);
IntMatrix int_product(const IntMatrix& a, const IntMatrix& b);
std::vector<int> int_apply(const IntMatrix& a, const std::vector<int>& v);

struct BasicFunctor {
    SCatPtr src, dst;
    IntMatrix mult;
    std::string kind = "canonical";  // provenance label only: canonical, induction, hom

    bool same_action(const BasicFunctor& o) const {
        return same_cat(src, o.src) && same_cat(dst, o.dst) && mult == o.mult;
    }
};

class Functor {
public:
    Functor() = default;
    static Functor identity(const SCatPtr& c);
    static Functor basic(const SCatPtr& src, const SCatPtr& dst, IntMatrix mult, std::string kind = "canonical");

    const SCatPtr& src() const { return src_; }
    const SCatPtr& dst() const { return dst_; }
    const std::vector<std::shared_ptr<const BasicFunctor>>& chain() const { return chain_; }
    bool is_identity() const { return chain_.empty(); }

    IntMatrix mult() const;
    Obj apply(const Obj& x) const;
    Mor apply(const Mor& f) const;
    std::string describe() const;

    bool operator==(const Functor& o) const;
    bool operator!=(const Functor& o) const { return !(*this == o); }

    friend Functor functor_compose(const Functor& g, const Functor& f);

private:
    SCatPtr src_, dst_;
    std::vector<std::shared_ptr<const BasicFunctor>> chain_;  // applied first to last
};

// G o F (apply F first).
Functor functor_compose(const Functor& g, const Functor& f);
Functor functor_compose(const std::vector<Functor>& outer_to_inner);
bool bifaithful_check(const Functor& f);
bool bifaithful_check(const IntMatrix& a);

// Least-squares preimage of r : F(x) -> F(y) under f |-> F(f); exact when r is in the image.
Mor functor_preimage(const Functor& f, const Mor& r, const Obj& x, const Obj& y);

struct NatTrans {
    Functor from, to;
    std::vector<Mor> comps;  // one per simple of from.src()

    static NatTrans identity(const Functor& f);
    static NatTrans zero(const Functor& from, const Functor& to);
    void validate() const;
};

Mor nat_extend(const NatTrans& eta, const Obj& x);
// Same, against an arbitrary resolution (isometries u : simple -> x with sum u u* = 1).
Mor nat_extend_with(const NatTrans& eta, const Obj& x, const std::vector<std::pair<std::size_t, Mor>>& resolution);

NatTrans vertical(const NatTrans& kappa, const NatTrans& eta);  // kappa o eta
NatTrans whisker_left(const Functor& h, const NatTrans& eta);   // H eta : HF -> HG
NatTrans whisker_right(const NatTrans& eta, const Functor& k);  // eta K : FK -> GK
NatTrans nat_star(const NatTrans& eta);
NatTrans nat_add(const NatTrans& a, const NatTrans& b);
NatTrans nat_scale(cplx s, const NatTrans& a);
NatTrans solve_natural_unitary(const Functor& f, const Functor& g);

double nat_distance(const NatTrans& a, const NatTrans& b);
double nat_norm(const NatTrans& a);
double nat_unitarity_residual(const NatTrans& eta);
// Naturality against a fixed seeded family of random morphisms between small test objects.
double naturality_residual(const NatTrans& eta, std::uint64_t seed = 20, int count = 20);

}  // namespace qsplit
