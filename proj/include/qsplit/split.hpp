/*
 * split: splitting a Q-system Q on the tower M through the tower of algebras
 * B_k, Q ~ Xbar (x) X with X = Lambda o F : M -> Delta.
 *
 *   Sigma   R(A_k) with the inclusion graphs of M; F : M -> Sigma and its
 *           inverse Fbar are the identity inflations.
 *   Delta   R(B_k), where B_k = S_k = phi1(H_k) for k >= l and, below the
 *           stability level, B_k = {c in C_k : J_{k->l}(c) in S_l}.
 *   Lambda  induction along a |-> Q(a), A_k -> B_k.
 *   Lbar    restriction along B_k in End(Q gen_k). Its connection is built by
 *           one of three formulas depending on the level: a commuting square
 *           through C_k (k < l), the PP-basis intertwiner (k = l), and the mate
 *           of Lambda's connection through ev/coev (k > l).
 *
 * beta : Lbar Lambda F => F Q and gamma : Xbar X => Q are read off from the
 * identity intertwiner on Q gen_k.
 */
#pragma once

#include <string>
#include <vector>

#include "qsplit/corr.hpp"

namespace qsplit {

struct SplitOptions {
    TolerancePolicy tol;
    int depth = -1;  // certificate covers levels l .. depth-1; -1 means the Q-system's depth
    int jobs = 1;
};

struct ConnectionRecord {
    int k = 0;
    std::string range;         // "below", "stable", "mate"
    double agreement = 0.0;    // distance to the connection read off from W^Q
    double unitarity = 0.0;
};

struct SplitResult {
    std::string name;
    int l = 0;
    int depth = 0;  // certificate depth
    ZeroCellPtr sigma, delta;
    std::vector<ConcreteAlgebra> b;  // B_0 .. B_K
    OneCellPtr f, fbar, lambda, lambar, x, xbar;
    DualityData d_f, d_lambda, d_x;
    TwoCell beta, gamma;
    std::vector<ConnectionRecord> connections;  // k = 1 .. K
    CheckReport certificate;                    // levels l .. depth-1
    double eps = 1e-9;
};

SplitResult split_qsystem(const QSystem& q, const SplitOptions& opt = {});

// Q' = Xbar (x) X from the split's duality data.
QSystem rebuild_qsystem(const SplitResult& s, const SplitOptions& opt = {});

}  // namespace qsplit
