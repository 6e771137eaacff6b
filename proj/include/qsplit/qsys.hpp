/*
 * qsys: Q-systems over a truncated 0-cell. Axiom residuals, stability level,
 * the d_Q functional calculus, and Q-systems built from a dual pair.
 */
#pragma once

#include <string>
#include <vector>

#include "qsplit/uc2.hpp"

namespace qsplit {

struct QSystem {
    std::string name;
    ZeroCellPtr base;
    OneCellPtr q;    // Q : base -> base
    OneCellPtr qq;   // Q (x) Q, cached
    OneCellPtr one;  // identity 1-cell of base
    TwoCell m;       // Q (x) Q => Q
    TwoCell i;       // 1 => Q
    int l = -1;      // stability level, -1 until detected

    int depth() const { return base->depth(); }
};

// Assembles the cached composites; m and i are taken as given.
QSystem make_qsystem(std::string name, OneCellPtr q, std::vector<NatTrans> m, std::vector<NatTrans> i);
QSystem identity_qsystem(const ZeroCellPtr& base);

struct AxiomResiduals {
    double associativity = 0.0;
    double unitality = 0.0;
    double frobenius = 0.0;
    double separability = 0.0;

    double max() const { return std::max(std::max(associativity, unitality), std::max(frobenius, separability)); }
};

AxiomResiduals axioms_check(const QSystem& q, int k);

struct StabilityReport {
    int l = -1;
    CheckReport report;  // per level: axioms and exchange residuals
};

// Throws NeverStable when no level works.
StabilityReport stability_level(const QSystem& q, const TolerancePolicy& tol = {});

struct DqData {
    int k = 0;
    std::vector<double> d;      // one scalar per simple of M_k
    std::vector<double> d_inv;  // pseudo-inverse
    std::vector<double> s;      // support projection
    double norm = 0.0;
    // PSD residuals (negative part of the minimum eigenvalue, 0 when the inequality holds).
    double f2_lower = 0.0;  // middle - m* m
    double f2_upper = 0.0;  // |d| id - middle
    double f3b = 0.0;       // |d| id - i i*
    double inverse_residual = 0.0;     // |d d_inv - s|
    double projection_residual = 0.0;  // s projection
    bool nondegenerate = true;
    std::vector<std::string> warnings;

    NatTrans as_nat(const Functor& id, const std::vector<double>& v) const;
};

DqData dq_calculus(const QSystem& q, int k, const TolerancePolicy& tol = {});

// Self-duality of Q: ev_Q = i* m, coev_Q = m* i; zig-zag residuals at level k.
double self_duality_residual(const QSystem& q, int k);

// Q = X (x) Xbar with m = X ev Xbar and i = coev.
QSystem from_dual_pair(const DualityData& d, const TolerancePolicy& tol = {}, std::string name = "Q");

}  // namespace qsplit
