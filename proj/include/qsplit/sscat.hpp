/*
 * sscat: finite semisimple C*-categories. Objects are multiplicity vectors
 * over a fixed list of simples and morphisms are one matrix block per simple.
 */
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qsplit/numkit.hpp"

namespace qsplit {

struct SCat {
    std::string name;
    std::vector<std::string> simples;

    std::size_t size() const { return simples.size(); }
    bool operator==(const SCat& o) const { return name == o.name && simples == o.simples; }
};

using SCatPtr = std::shared_ptr<const SCat>;

SCatPtr make_scat(std::string name, std::size_t n_simples);
SCatPtr make_scat(std::string name, std::vector<std::string> labels);
bool same_cat(const SCatPtr& a, const SCatPtr& b);

struct Obj {
    SCatPtr cat;
    std::vector<int> mult;

    std::size_t total() const;
    std::size_t offset(std::size_t simple) const;  // first line of block `simple` in flattened order
    bool operator==(const Obj& o) const { return same_cat(cat, o.cat) && mult == o.mult; }
    bool operator!=(const Obj& o) const { return !(*this == o); }
};

Obj simple_obj(const SCatPtr& cat, std::size_t i);
Obj zero_obj(const SCatPtr& cat);
// The object containing every simple once.
Obj generator_obj(const SCatPtr& cat);
Obj direct_sum(const Obj& a, const Obj& b);

struct Mor {
    Obj src, dst;
    std::vector<CMatrix> blocks;  // block i is dst.mult[i] x src.mult[i]

    static Mor identity(const Obj& x);
    static Mor zero(const Obj& src, const Obj& dst);
    void validate() const;
};

Mor mor_compose(const Mor& g, const Mor& f);
Mor mor_star(const Mor& f);
Mor operator+(const Mor& a, const Mor& b);
Mor operator-(const Mor& a, const Mor& b);
Mor operator*(cplx s, const Mor& a);

// Coordinate isometries simple_i -> x, ordered by simple then copy.
std::vector<Mor> simple_resolution(const Obj& x);

struct MorMetrics {
    double norm = 0.0;
    bool positive = false;
    bool unitary = false;
};

double mor_norm(const Mor& f);
MorMetrics mor_metrics(const Mor& f, const TolerancePolicy& tol = {});
double mor_distance(const Mor& a, const Mor& b);
double mor_unitarity_residual(const Mor& f);

// Block-diagonal embedding into one matrix (lines ordered simple by simple) and back.
CMatrix flatten(const Mor& f);
Mor unflatten(const CMatrix& m, const Obj& src, const Obj& dst);

Mor random_mor(const Obj& src, const Obj& dst, Rng& rng);

}  // namespace qsplit
