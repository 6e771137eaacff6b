/*
 * Dense complex kernels. The eigensolver is a cyclic complex Jacobi sweep;
 * everything spectral (norms, pseudo-inverses, Gram bases, kernels) funnels
 * through it so results are reproducible bit for bit.
 */
#include "qsplit/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qsplit {

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << what << ": " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x" << b.cols();
        throw Error(ErrorCode::ShapeMismatch, os.str());
    }
}

// Jacobi on a matrix already known to be Hermitian. Returns unsorted values.
void jacobi_raw(CMatrix a, std::vector<double>& values, CMatrix& vecs) {
    const std::size_t n = a.rows();
    vecs = CMatrix::identity(n);
    values.assign(n, 0.0);
    if (n == 0) return;
    const double fro = a.frobenius_norm();
    if (fro == 0.0) return;
    // Tighter than eps_num on purpose: downstream residual checks sit at 1e-9
    // and need eigenvectors well below that.
    const double target = 1e-15 * fro;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        off = std::sqrt(2.0 * off);
        if (off <= target) break;
        bool rotated = false;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300 || mag < 1e-18 * fro) continue;
                const double app = a(p, p).real(), aqq = a(q, q).real();
                // Skip rotations that cannot change the diagonal in floating point.
                if (sweep > 3 && std::abs(app) + 100.0 * mag == std::abs(app) &&
                    std::abs(aqq) + 100.0 * mag == std::abs(aqq)) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                rotated = true;
                const cplx ph = apq / mag;  // e^{i phi}
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx phc = std::conj(ph);
                // A <- A G with G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * phc * akq;
                    a(k, q) = s * akp + c * phc * akq;
                }
                // A <- G* A.
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * ph * aqk;
                    a(q, k) = s * apk + c * ph * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = vecs(k, p), vkq = vecs(k, q);
                    vecs(k, p) = c * vkp - s * phc * vkq;
                    vecs(k, q) = s * vkp + c * phc * vkq;
                }
            }
        }
        if (!rotated) break;
    }
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i).real();
}

SpectralDecomposition sorted_eig(const CMatrix& herm) {
    std::vector<double> vals;
    CMatrix vecs;
    jacobi_raw(herm, vals, vecs);
    const std::size_t n = vals.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return vals[x] < vals[y]; });
    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.basis = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = vals[order[j]];
        std::size_t lead = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(vecs(i, order[j])) > 1e-12) {
                lead = i;
                break;
            }
        }
        cplx fix = 1.0;
        if (lead < n) fix = std::conj(vecs(lead, order[j])) / std::abs(vecs(lead, order[j]));
        for (std::size_t i = 0; i < n; ++i) out.basis(i, j) = vecs(i, order[j]) * fix;
        if (lead < n) out.basis(lead, j) = out.basis(lead, j).real();
    }
    return out;
}

CMatrix symmetrized(const CMatrix& a) {
    CMatrix h(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return h;
}

void require_hermitian(const CMatrix& a, const TolerancePolicy& tol) {
    if (!a.is_square()) throw Error(ErrorCode::NonSquare, "expected a square matrix");
    double skew = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j) skew += std::norm(a(i, j) - std::conj(a(j, i)));
    skew = std::sqrt(2.0 * skew);
    // Frobenius surrogate for the operator-norm test (cheap, and never looser
    // than sqrt(n) times the operator version).
    if (skew > tol.eps_num * std::max(a.frobenius_norm(), 1e-300) && skew > 1e-300)
        throw Error(ErrorCode::NotHermitian, "skew part has norm " + std::to_string(skew));
}

}  // namespace

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diag(const std::vector<double>& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::diag(const std::vector<cplx>& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

CMatrix CMatrix::conj() const {
    CMatrix m(*this);
    for (auto& v : m.data_) v = std::conj(v);
    return m;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw Error(ErrorCode::ShapeMismatch, "block out of range");
    CMatrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw Error(ErrorCode::ShapeMismatch, "set_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

void CMatrix::add_block(std::size_t r0, std::size_t c0, const CMatrix& b, cplx scale) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw Error(ErrorCode::ShapeMismatch, "add_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) += scale * b(i, j);
}

cplx CMatrix::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double CMatrix::max_abs() const {
    double s = 0.0;
    for (const auto& v : data_) s = std::max(s, std::abs(v));
    return s;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    require_same_shape(*this, o, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    require_same_shape(*this, o, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
CMatrix operator-(CMatrix a) { return a *= -1.0; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream os;
        os << "product " << a.rows() << "x" << a.cols() << " * " << b.rows() << "x" << b.cols();
        throw Error(ErrorCode::ShapeMismatch, os.str());
    }
    CMatrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
    const cplx* bd = b.data();
    cplx* cd = c.data();
    for (std::size_t i = 0; i < n; ++i) {
        cplx* crow = cd + i * p;
        for (std::size_t k = 0; k < m; ++k) {
            const cplx aik = a(i, k);
            if (aik == 0.0) continue;
            const cplx* brow = bd + k * p;
            for (std::size_t j = 0; j < p; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

CMatrix adjoint_times(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "adjoint_times row mismatch");
    CMatrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const cplx aki = std::conj(a(k, i));
            if (aki == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
        }
    }
    return c;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) == 0.0) continue;
            c.add_block(i * b.rows(), j * b.cols(), b, a(i, j));
        }
    return c;
}

CMatrix direct_sum(const std::vector<CMatrix>& blocks) {
    std::size_t r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    CMatrix out(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
        out.set_block(r, c, b);
        r += b.rows();
        c += b.cols();
    }
    return out;
}

CMatrix hstack(const std::vector<CMatrix>& cols) {
    if (cols.empty()) return {};
    std::size_t c = 0;
    for (const auto& b : cols) {
        if (b.rows() != cols.front().rows()) throw Error(ErrorCode::ShapeMismatch, "hstack");
        c += b.cols();
    }
    CMatrix out(cols.front().rows(), c);
    c = 0;
    for (const auto& b : cols) {
        out.set_block(0, c, b);
        c += b.cols();
    }
    return out;
}

CMatrix vstack(const std::vector<CMatrix>& rows) {
    if (rows.empty()) return {};
    std::size_t r = 0;
    for (const auto& b : rows) {
        if (b.cols() != rows.front().cols()) throw Error(ErrorCode::ShapeMismatch, "vstack");
        r += b.rows();
    }
    CMatrix out(r, rows.front().cols());
    r = 0;
    for (const auto& b : rows) {
        out.set_block(r, 0, b);
        r += b.rows();
    }
    return out;
}

cplx hs_inner(const CMatrix& a, const CMatrix& b) {
    require_same_shape(a, b, "hs_inner");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(b.data()[i]) * a.data()[i];
    return s;
}

void TolerancePolicy::validate() const {
    if (!(eps_num > 0.0 && eps_num < 1.0)) throw Error(ErrorCode::ParameterOutOfRange, "eps_num must lie in (0,1)");
    if (!(tau_rel > 0.0)) throw Error(ErrorCode::ParameterOutOfRange, "tau_spec must be positive");
}

SpectralDecomposition hermitian_eig(const CMatrix& a, const TolerancePolicy& tol) {
    require_hermitian(a, tol);
    return sorted_eig(symmetrized(a));
}

CMatrix hermitian_part(const CMatrix& a) {
    if (!a.is_square()) throw Error(ErrorCode::NonSquare, "hermitian_part");
    return symmetrized(a);
}

double min_eigenvalue(const CMatrix& h) {
    if (!h.is_square()) throw Error(ErrorCode::NonSquare, "min_eigenvalue");
    if (h.rows() == 0) return 0.0;
    return sorted_eig(symmetrized(h)).eigenvalues.front();
}

double op_norm(const CMatrix& a) {
    if (a.empty()) return 0.0;
    const double fro = a.frobenius_norm();
    if (fro == 0.0) return 0.0;
    // Row and column vectors: Frobenius and operator norm coincide.
    if (a.rows() == 1 || a.cols() == 1) return fro;
    const CMatrix g = a.rows() <= a.cols() ? a * a.adjoint() : adjoint_times(a, a);
    const auto eig = sorted_eig(symmetrized(g));
    return std::sqrt(std::max(eig.eigenvalues.back(), 0.0));
}

CMatrix apply_spectral_function(const CMatrix& a, SpectralFn f, const TolerancePolicy& tol,
                                std::vector<std::string>* warnings) {
    const auto eig = hermitian_eig(a, tol);
    const std::size_t n = eig.eigenvalues.size();
    if (n == 0) return {};
    const double lmax = eig.eigenvalues.back();
    const double scale = std::max(std::abs(eig.eigenvalues.front()), std::abs(lmax));
    if (eig.eigenvalues.front() < -tol.eps_num * scale)
        throw Error(ErrorCode::NotPositive, "minimum eigenvalue " + std::to_string(eig.eigenvalues.front()));
    const double tau = tol.tau_spec(lmax);
    std::vector<double> fv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lam = eig.eigenvalues[i];
        if (warnings && tau > 0.0 && lam > tau / 10.0 && lam < 10.0 * tau) {
            std::ostringstream os;
            os << "eigenvalue " << lam << " lies within a decade of the spectral cutoff " << tau;
            warnings->push_back(os.str());
        }
        const bool keep = lam > tau && lam > 0.0;
        switch (f) {
        case SpectralFn::PseudoInverse: fv[i] = keep ? 1.0 / lam : 0.0; break;
        case SpectralFn::SupportProjection: fv[i] = keep ? 1.0 : 0.0; break;
        case SpectralFn::Identity: fv[i] = keep ? lam : 0.0; break;
        }
    }
    CMatrix scaled = eig.basis;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= fv[j];
    return scaled * eig.basis.adjoint();
}

GramBasis gram_orthonormal_basis(const CMatrix& gram, const TolerancePolicy& tol) {
    const auto eig = hermitian_eig(gram, tol);
    GramBasis out;
    const std::size_t n = eig.eigenvalues.size();
    if (n == 0) {
        out.isometry = CMatrix(0, 0);
        return out;
    }
    const double lmax = eig.eigenvalues.back();
    const double scale = std::max(std::abs(eig.eigenvalues.front()), std::abs(lmax));
    if (eig.eigenvalues.front() < -tol.eps_num * scale)
        throw Error(ErrorCode::NotPositive, "Gram matrix has a negative eigenvalue");
    const double tau = tol.tau_spec(lmax);
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < n; ++j)
        if (eig.eigenvalues[j] > tau && eig.eigenvalues[j] > 0.0) kept.push_back(j);
    out.rank = kept.size();
    out.isometry = CMatrix(n, kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const double s = 1.0 / std::sqrt(eig.eigenvalues[kept[c]]);
        for (std::size_t i = 0; i < n; ++i) out.isometry(i, c) = eig.basis(i, kept[c]) * s;
    }
    return out;
}

double residual(const CMatrix& a, ResidualKind kind, const CMatrix* b) {
    switch (kind) {
    case ResidualKind::Unitarity: {
        const double r1 = op_norm(adjoint_times(a, a) - CMatrix::identity(a.cols()));
        const double r2 = op_norm(a * a.adjoint() - CMatrix::identity(a.rows()));
        return std::max(r1, r2);
    }
    case ResidualKind::Projection: {
        if (!a.is_square()) throw Error(ErrorCode::ShapeMismatch, "projection residual needs a square matrix");
        return std::max(op_norm(a * a - a), op_norm(a - a.adjoint()));
    }
    case ResidualKind::Positivity: {
        if (!a.is_square()) throw Error(ErrorCode::ShapeMismatch, "positivity residual needs a square matrix");
        if (a.rows() == 0) return 0.0;
        const double skew = op_norm(a - a.adjoint());
        return std::max(skew, std::max(0.0, -min_eigenvalue(a)));
    }
    case ResidualKind::Equality: {
        if (!b) throw Error(ErrorCode::ShapeMismatch, "equality residual needs a second matrix");
        require_same_shape(a, *b, "equality residual");
        return op_norm(a - *b);
    }
    }
    return 0.0;
}

CMatrix nullspace(const CMatrix& m, const TolerancePolicy& tol) {
    const std::size_t n = m.cols();
    if (m.rows() == 0 || m.frobenius_norm() == 0.0) return CMatrix::identity(n);
    const auto eig = sorted_eig(symmetrized(adjoint_times(m, m)));
    const double tau = tol.tau_spec(eig.eigenvalues.back());
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j)
        if (eig.eigenvalues[j] <= tau) cols.push_back(j);
    CMatrix out(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t i = 0; i < n; ++i) out(i, c) = eig.basis(i, cols[c]);
    return out;
}

CMatrix range_basis(const CMatrix& m, const TolerancePolicy& tol) {
    const std::size_t n = m.rows();
    if (m.cols() == 0 || m.frobenius_norm() == 0.0) return CMatrix(n, 0);
    const auto eig = sorted_eig(symmetrized(m * m.adjoint()));
    const double tau = tol.tau_spec(eig.eigenvalues.back());
    std::vector<std::size_t> cols;
    for (std::size_t j = n; j-- > 0;)
        if (eig.eigenvalues[j] > tau) cols.push_back(j);
    CMatrix out(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t i = 0; i < n; ++i) out(i, c) = eig.basis(i, cols[c]);
    return out;
}

CMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}

CMatrix random_hermitian(std::size_t n, Rng& rng) {
    const CMatrix x = random_matrix(n, n, rng);
    return 0.5 * (x + x.adjoint());
}

CMatrix random_unitary(std::size_t n, Rng& rng) {
    // Modified Gram-Schmidt on a Gaussian matrix, twice for stability.
    CMatrix q = random_matrix(n, n, rng);
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < j; ++i) {
                cplx d = 0.0;
                for (std::size_t r = 0; r < n; ++r) d += std::conj(q(r, i)) * q(r, j);
                for (std::size_t r = 0; r < n; ++r) q(r, j) -= d * q(r, i);
            }
            double nrm = 0.0;
            for (std::size_t r = 0; r < n; ++r) nrm += std::norm(q(r, j));
            nrm = std::sqrt(nrm);
            for (std::size_t r = 0; r < n; ++r) q(r, j) /= nrm;
        }
    }
    return q;
}

}  // namespace qsplit
