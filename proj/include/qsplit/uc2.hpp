/*
 * uc2: 0-cells (Bratteli sequences), 1-cells with unitary connections,
 * 2-cells satisfying the exchange relation, and duality data, all truncated
 * at a finite depth K.
 *
 * Conventions. A connection of a 1-cell Lambda : Gamma -> Delta at level k is
 * a natural unitary W_k : Delta_k Lambda_{k-1} -> Lambda_k Gamma_k (functor
 * composition written outer-first). The composite of Omega after Lambda uses
 * W_k = (Omega_k W^Lambda_k) o (W^Omega_k Lambda_{k-1}).
 */
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qsplit/funcalc.hpp"
#include "qsplit/report.hpp"

namespace qsplit {

struct ZeroCell {
    std::string name;
    std::vector<SCatPtr> cats;    // M_0 .. M_K
    std::vector<Functor> gammas;  // gammas[k] : M_{k-1} -> M_k, k = 1..K (gammas[0] unused)

    int depth() const { return static_cast<int>(cats.size()) - 1; }
    const Functor& gamma(int k) const;
    void validate() const;
};

using ZeroCellPtr = std::shared_ptr<const ZeroCell>;

ZeroCellPtr make_zero_cell(std::string name, std::vector<SCatPtr> cats, std::vector<IntMatrix> gamma_mults);
bool same_zero_cell(const ZeroCell& a, const ZeroCell& b);

struct OneCell {
    std::string name;
    ZeroCellPtr from, to;
    std::vector<Functor> lambdas;  // Lambda_0 .. Lambda_K
    std::vector<NatTrans> conns;   // conns[k] = W_k for k = 1..K (conns[0] unused)

    int depth() const { return static_cast<int>(lambdas.size()) - 1; }
};

using OneCellPtr = std::shared_ptr<const OneCell>;

OneCellPtr identity_one_cell(const ZeroCellPtr& z);
CheckReport one_cell_check(const OneCell& c, const TolerancePolicy& tol = {});
// o after l (l : Gamma -> Delta, o : Delta -> E).
OneCellPtr one_cell_compose(const OneCellPtr& o, const OneCellPtr& l);

struct TwoCell {
    OneCellPtr from, to;
    int start = 0;
    std::vector<NatTrans> comps;  // indexed by level; entries below start are placeholders

    const NatTrans& at(int k) const;
    int depth() const { return static_cast<int>(comps.size()) - 1; }
};

TwoCell identity_two_cell(const OneCellPtr& c);

double exchange_residual(const NatTrans& eta_k, const NatTrans& eta_k1, const OneCell& src, const OneCell& dst, int k);
// Least-squares solution of the exchange relation for eta_{k+1}; throws NoSolution
// when the best residual exceeds eps_num (relative to the input size).
NatTrans exchange_transport(const NatTrans& eta_k, const OneCell& src, const OneCell& dst, int k,
                            const TolerancePolicy& tol = {}, double* residual_out = nullptr);
// The other direction: eta_k from eta_{k+1}.
NatTrans exchange_transport_back(const NatTrans& eta_k1, const OneCell& src, const OneCell& dst, int k,
                                 const TolerancePolicy& tol = {}, double* residual_out = nullptr);

CheckReport two_cell_check(const TwoCell& eta, const TolerancePolicy& tol = {});

TwoCell two_cell_vertical(const TwoCell& kappa, const TwoCell& eta);
// kappa (x) eta for eta : Lambda => Lambda', kappa : Omega => Omega'. The composite
// 1-cells may be passed in to avoid rebuilding them.
TwoCell two_cell_horizontal(const TwoCell& kappa, const TwoCell& eta, OneCellPtr from = nullptr, OneCellPtr to = nullptr);
TwoCell two_cell_star(const TwoCell& eta);
// Whiskering of a 2-cell by a 1-cell on either side.
TwoCell two_cell_whisker_left(const OneCellPtr& h, const TwoCell& eta, OneCellPtr from = nullptr, OneCellPtr to = nullptr);
TwoCell two_cell_whisker_right(const TwoCell& eta, const OneCellPtr& k, OneCellPtr from = nullptr, OneCellPtr to = nullptr);

struct Eventually {
    bool equal = false;
    int witness = -1;
    double max_diff = 0.0;
};

Eventually equal_eventually(const TwoCell& a, const TwoCell& b, const TolerancePolicy& tol = {});

struct DualityData {
    OneCellPtr cell;  // X : a -> b
    OneCellPtr dual;  // Xbar : b -> a
    TwoCell ev;       // Xbar (x) X => 1_a
    TwoCell coev;     // 1_b => X (x) Xbar
};

// Zig-zags, ev ev* = id and exchange of ev/coev, per level from the common start.
CheckReport duality_check(const DualityData& d, const TolerancePolicy& tol = {});

}  // namespace qsplit
