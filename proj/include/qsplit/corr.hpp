/*
 * corr: finite right correspondences over multi-matrix algebras.
 *
 * R_A is modelled as an SCat whose simples are the blocks of A; the regular
 * module is the object with multiplicities = block sizes, and End of it is A
 * in standard block coordinates. A unital *-homomorphism pi : A -> End(y)
 * induces the functor . (x)_A B; it is stored as the canonical inflation
 * functor with the same multiplicities plus a unitary gauge U with
 * pi(a) = U F(a) U*. Natural transformations between induced functors are
 * read off from intertwiners between the concrete representations.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsplit/tower.hpp"

namespace qsplit {

struct MMAlgebra {
    std::vector<int> dims;

    std::size_t dim() const;
    void validate() const;
};

SCatPtr corr_category(const std::string& name, const MMAlgebra& a);
Obj regular_obj(const SCatPtr& cat, const MMAlgebra& a);

// Same blocks, different category label.
Obj recat(const Obj& x, const SCatPtr& cat);
Mor recat(const Mor& f, const SCatPtr& cat);

// A concrete *-subalgebra of End(carrier), presented in standard coordinates.
struct ConcreteAlgebra {
    std::string name;
    Obj carrier;
    Wedderburn w;
    SCatPtr cat;

    MMAlgebra alg() const { return MMAlgebra{w.dims()}; }
    Obj std_obj() const { return regular_obj(cat, alg()); }
    Mor to_std(const Mor& x) const;    // x in End(carrier)
    Mor from_std(const Mor& b) const;  // back into End(carrier)
};

ConcreteAlgebra concrete_algebra(const std::string& name, const Obj& carrier, const std::function<Mor(Rng&)>& sample,
                                 std::size_t dim, std::uint64_t seed = 11);

struct StarRep {
    Obj src;          // standard object of the source algebra
    Obj dst;          // carrier of the representation, equal to functor(src)
    Functor functor;  // canonical inflation with the representation's multiplicities
    Mor gauge;        // unitary on dst
    bool canonical = false;  // gauge is the identity on every object
    double residual = 0.0;   // |pi(b) - U F(b) U*| on a probe
};

// Reads off multiplicities and gauge from the images of matrix units.
StarRep make_rep(const Obj& src, const Obj& dst, const std::function<Mor(const Mor&)>& pi, const std::string& kind = "induction",
                 std::uint64_t seed = 31);
StarRep canonical_rep(const Functor& f, const Obj& src);
StarRep rep_compose(const StarRep& outer, const StarRep& inner);
Mor rep_apply(const StarRep& r, const Mor& b);

// The natural transformation F => G induced by an intertwiner u : dst_f -> dst_g
// (u pi_f(b) = pi_g(b) u). `intertwining` receives the intertwiner residual on a probe.
NatTrans nat_from_intertwiner(const StarRep& f, const StarRep& g, const Mor& u, double* intertwining = nullptr);

// Induction along a unital inclusion given concretely: pi : End(a_std) -> End(b_std).
StarRep induction_functor(const Obj& a_std, const Obj& b_std, const std::function<Mor(const Mor&)>& pi);

// Two composite inductions around a commuting square of inclusions; both reps
// must land in the same carrier. The comparison is the canonical identity of
// balanced tensors. Throws NonCommutingSquare when the paths disagree.
NatTrans square_connection(const StarRep& path1, const StarRep& path2, const TolerancePolicy& tol = {});

// Balanced tensor of hom-space correspondences. V lives in Hom(g, X) with right
// A = End(g) action by composition and inner product v'* v; W lives in Hom(g', Y)
// with left A action through pi. The oracle forms the semi-inner product
// <v (x) w, v' (x) w'> = Tr(w'* pi(v'* v) w) and orthonormalizes; the fast
// path sends v (x) w to ext(v) w in a concrete model and takes its dimension
// from multiplicity arithmetic.
struct RelTensor {
    std::size_t dim_oracle = 0;
    std::size_t dim_fast = 0;
    double gram_residual = 0.0;     // max |oracle Gram - Gram of fast images|
    double balance_residual = 0.0;  // squared seminorm of (v a) (x) w - v (x) (a w), relative
    double fast_rank_residual = 0.0;  // |rank(fast Gram) - dim_fast|
};

RelTensor rel_tensor(const std::vector<CMatrix>& v, const std::vector<CMatrix>& w,
                     const std::function<CMatrix(const CMatrix&)>& pi,
                     const std::function<CMatrix(const CMatrix&)>& ext, std::size_t fast_dim,
                     const std::function<CMatrix(Rng&)>& sample_a, std::uint64_t seed = 13);

// H_k (x)_{A_k} H_k against Y_k = Hom(gen, QQ gen) via xi (x) eta |-> Q(xi) eta.
// A nonzero rotate_seed replaces the matrix-unit basis by a random unitary mix
// of it on both factors, which makes every Gram block dense.
RelTensor h_tensor_h(const HSpace& h, std::uint64_t rotate_seed = 0);

}  // namespace qsplit
