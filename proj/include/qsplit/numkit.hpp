/*
 * numkit: dense complex matrices and the handful of kernels the rest of the
 * library is built on (Jacobi eigensolver, spectral calculus, Gram
 * orthonormalization, residual norms).
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qsplit/error.hpp"

namespace qsplit {

using cplx = std::complex<double>;

class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static CMatrix identity(std::size_t n);
    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    static CMatrix diag(const std::vector<double>& d);
    static CMatrix diag(const std::vector<cplx>& d);
    static CMatrix scalar(cplx v) {
        CMatrix m(1, 1);
        m(0, 0) = v;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    bool is_square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix conj() const;

    CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);
    void add_block(std::size_t r0, std::size_t c0, const CMatrix& b, cplx scale = 1.0);
    CMatrix col(std::size_t j) const { return block(0, j, rows_, 1); }

    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    bool operator==(const CMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(CMatrix a, cplx s);
CMatrix operator-(CMatrix a);

// a* b without forming the adjoint explicitly.
CMatrix adjoint_times(const CMatrix& a, const CMatrix& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix direct_sum(const std::vector<CMatrix>& blocks);
CMatrix hstack(const std::vector<CMatrix>& cols);
CMatrix vstack(const std::vector<CMatrix>& rows);
// Frobenius inner product Tr(b* a).
cplx hs_inner(const CMatrix& a, const CMatrix& b);

struct TolerancePolicy {
    double eps_num = 1e-9;
    double tau_rel = 1e-8;  // tau_spec = tau_rel * largest eigenvalue

    double tau_spec(double lambda_max) const { return tau_rel * std::max(lambda_max, 0.0); }
    void validate() const;
};

struct SpectralDecomposition {
    std::vector<double> eigenvalues;  // ascending
    CMatrix basis;                    // columns are eigenvectors
};

SpectralDecomposition hermitian_eig(const CMatrix& a, const TolerancePolicy& tol = {});

enum class SpectralFn { PseudoInverse, SupportProjection, Identity };

// Warnings about eigenvalues near the cutoff are appended to `warnings` when given.
CMatrix apply_spectral_function(const CMatrix& a, SpectralFn f, const TolerancePolicy& tol = {},
                                std::vector<std::string>* warnings = nullptr);

struct GramBasis {
    CMatrix isometry;  // V with V* G V = I_rank
    std::size_t rank = 0;
};

GramBasis gram_orthonormal_basis(const CMatrix& gram, const TolerancePolicy& tol = {});

double op_norm(const CMatrix& a);
double min_eigenvalue(const CMatrix& hermitian);
CMatrix hermitian_part(const CMatrix& a);

enum class ResidualKind { Unitarity, Projection, Positivity, Equality };

double residual(const CMatrix& a, ResidualKind kind, const CMatrix* b = nullptr);
inline double residual_unitarity(const CMatrix& a) { return residual(a, ResidualKind::Unitarity); }
inline double residual_projection(const CMatrix& a) { return residual(a, ResidualKind::Projection); }
inline double residual_positivity(const CMatrix& a) { return residual(a, ResidualKind::Positivity); }
inline double residual_equality(const CMatrix& a, const CMatrix& b) {
    return residual(a, ResidualKind::Equality, &b);
}

// Orthonormal basis (columns) of the kernel of m, using the cutoff from tol.
CMatrix nullspace(const CMatrix& m, const TolerancePolicy& tol = {});
// Orthonormal basis of the column span of m.
CMatrix range_basis(const CMatrix& m, const TolerancePolicy& tol = {});

// Seeded helpers; all randomness in the library goes through these.
using Rng = std::mt19937_64;
CMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng);
CMatrix random_hermitian(std::size_t n, Rng& rng);
CMatrix random_unitary(std::size_t n, Rng& rng);

}  // namespace qsplit
