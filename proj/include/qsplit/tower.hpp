/*
 * tower: the algebra towers A_k = End(gen_k) and C_k = End(Q_k gen_k), the
 * C*-algebras H_k = Hom(gen_k, Q_k gen_k), their images S_k in C_k, the
 * conditional expectation E_k, Pimsner-Popa bases, and the flattening of
 * 2-cells onto the H-towers.
 *
 * gen_k is Gamma_k ... Gamma_1 of the object holding every simple of M_0
 * once. H_k is handled in matrix-unit coordinates: basis element (r, s) is
 * the 0/1 morphism from line s of gen_k to line r of Q_k gen_k (same simple),
 * which is orthonormal for the traced inner product Tr(zeta* xi).
 */
#pragma once

#include <functional>
#include <vector>

#include "qsplit/qsys.hpp"

namespace qsplit {

Obj tower_generator(const ZeroCell& z, int k);

struct TowerAlgebra {
    int k = 0;
    Obj obj;  // the algebra is End(obj)

    const std::vector<int>& block_dims() const { return obj.mult; }
    std::size_t dim() const;
};

TowerAlgebra build_A(const ZeroCell& z, int k);
// alpha |-> Gamma_{k+1}(alpha)
Mor include_A(const ZeroCell& z, int k, const Mor& a);

struct HSpace {
    int k = 0;
    Functor q;             // Q_k
    Obj gen, qgen, qqgen;  // gen_k, Q gen_k, QQ gen_k
    Mor m_gen;             // m_k at gen_k : QQ gen -> Q gen
    Mor i_gen;             // i_k at gen_k : gen -> Q gen

    // Flattened coordinates for the sparse tables.
    CMatrix m_flat;                             // N_q x N_qq
    CMatrix mstar_i;                            // m* i, N_qq x N_g
    std::vector<std::pair<int, int>> basis;     // (r in qgen lines, s in gen lines)
    std::vector<std::vector<int>> ql_gen;       // gen line s -> ascending Q(gen) = qgen lines
    std::vector<std::vector<int>> ql_qgen;      // qgen line r -> ascending Q(qgen) = qqgen lines
    std::vector<std::pair<int, int>> owner;     // qgen line -> (gen line s, copy t) with ql_gen[s][t] = line

    std::size_t dim() const { return basis.size(); }
    Mor element(std::size_t a) const;
    Mor from_coords(const std::vector<cplx>& c) const;
    std::vector<cplx> coords(const Mor& xi) const;
};

HSpace build_H(const QSystem& q, int k);

// The algebra operations, evaluated by whiskered composition.
Mor h_product(const HSpace& h, const Mor& xi, const Mor& eta);  // m Q(xi) eta
Mor h_unit(const HSpace& h);                                     // i
Mor h_dagger(const HSpace& h, const Mor& xi);                    // Q(xi*) m* i
Mor h_left(const HSpace& h, const Mor& a, const Mor& xi);        // Q(a) xi
Mor h_right(const Mor& xi, const Mor& a);                        // xi a
Mor h_inner(const Mor& xi, const Mor& zeta);                     // zeta* xi
Mor h_embed(const HSpace& h, const Mor& a);                      // i a

Mor phi1(const HSpace& h, const Mor& xi);  // m Q(xi), an element of End(Q gen)
Mor phi2(const HSpace& h, const Mor& x);   // x i
// The idempotent x |-> phi1(phi2(x)) whose fixed points are S_k.
Mor s_project(const HSpace& h, const Mor& x);

// W^Q_{k+1} Gamma_{k+1}(xi): H_k -> H_{k+1}.
Mor include_H(const QSystem& q, const HSpace& hk, const Mor& xi);
// W Gamma(c) W*: C_k -> C_{k+1}.
Mor include_C(const QSystem& q, const HSpace& hk, const Mor& c);
TowerAlgebra build_C(const QSystem& q, int k);

struct HStructureReport {
    double associativity = 0.0;   // max over pairs of |phi1(ab) - phi1(a) phi1(b)|_F
    double unit = 0.0;            // 1.xi and xi.1 on the basis
    double dagger_anti = 0.0;     // (ab)^dagger - b^dagger a^dagger over pairs
    double dagger_star = 0.0;     // phi1(a^dagger) - phi1(a)* on the basis
    double involution = 0.0;      // a^dagger^dagger - a on the basis
    double cstar = 0.0;           // | |a^dagger a| - |a|^2 | on the basis
    double phi21 = 0.0;           // phi2 phi1 - id on the basis
    double phi12 = 0.0;           // phi1 phi2 - id on phi1(basis)
    std::size_t dim_h = 0;
    std::size_t dim_s = 0;
    bool rank_exact = false;      // dim_s from a Gram rank rather than the injectivity bound
    std::size_t pairs_checked = 0;
    std::size_t pairs_total = 0;

    double max() const;
};

// Structure checks over basis pairs. Pairs are exhaustive when dim^2 <= max_pairs,
// otherwise a seeded sample of max_pairs pairs is used.
HStructureReport h_structure_check(const HSpace& h, std::size_t max_pairs = 1u << 20, std::uint64_t seed = 3);

struct ExpectationReport {
    double unitality = 0.0;      // E(1) - s
    double embedding = 0.0;      // E(i a) - s a
    double bimodule = 0.0;       // E(a xi b) - a E(xi) b
    double inner_product = 0.0;  // E(eta^dagger xi) - d^{-1} <xi, eta>
    double faithful_min = 0.0;   // min over basis of |E(e^dagger e)|
    double index_bound = 0.0;    // min eigenvalue of |d| Q(E'(x)) - x over positive test x
    double d_norm = 0.0;
};

// E_k(xi) = d^{-1} i* xi.
Mor cond_exp(const HSpace& h, const DqData& d, const Mor& xi);
// E'(x) = d^{-1} i* x i on End(Q gen).
Mor cond_exp_c(const HSpace& h, const DqData& d, const Mor& x);
ExpectationReport expectation_check(const HSpace& h, const DqData& d, std::uint64_t seed = 5, int samples = 8);

// Pimsner-Popa basis: sigma_c = iota_c iota^gen*, iota_c running over the
// canonical resolution of Q gen and iota^gen the first copy of the same simple in gen.
std::vector<Mor> pp_basis(const HSpace& h);
std::vector<Mor> pp_transport(const QSystem& q, const HSpace& hk, const std::vector<Mor>& basis);
double pp_completeness(const std::vector<Mor>& basis);                // sum sigma sigma* - 1
double pp_reconstruction(const HSpace& h, const std::vector<Mor>& basis, std::uint64_t seed = 7, int samples = 10);
double pp_separability(const HSpace& h, const std::vector<Mor>& basis);  // sum phi1(s) phi1(s)* - 1

// Minimal central decomposition of a concrete *-subalgebra of Mat_N.
struct WedderburnBlock {
    std::size_t size = 0;            // matrix size n_j
    std::vector<CMatrix> isometries;  // V_{j,t}: N x n_j, one per copy t
    CMatrix central;                 // central projection p_j (N x N)
};

struct Wedderburn {
    std::vector<WedderburnBlock> blocks;
    double reassembly = 0.0;  // on a random element
    int attempts = 0;

    std::vector<int> dims() const;
    // x_j = V_{j,0}* x V_{j,0}
    std::vector<CMatrix> to_blocks(const CMatrix& x) const;
    CMatrix from_blocks(const std::vector<CMatrix>& b) const;
};

// `sample` returns a random element of the algebra; `dim` its dimension when known (0 to skip).
Wedderburn wedderburn(const std::function<CMatrix(Rng&)>& sample, std::size_t n, std::size_t dim,
                      std::uint64_t seed = 11, const TolerancePolicy& tol = {});

// Hom(n_k, Lambda_k m_k) for Lambda : Gamma -> Delta, with the inclusion W Delta(xi).
struct FlatSpace {
    int k = 0;
    Obj src, dst;  // n_k, Lambda_k m_k
};

FlatSpace flat_space(const OneCell& lam, int k);
Mor flat_include(const OneCell& lam, int k, const Mor& xi);
// Phi_k(xi) = eta_{m_k} xi
Mor flatten_two_cell(const TwoCell& eta, int k, const Mor& xi);
// Per level k < K: max over the matrix-unit basis of |Phi_{k+1}(I xi) - I(Phi_k xi)|.
std::vector<double> flatten_drift(const TwoCell& eta);

}  // namespace qsplit
