// Dense kernels: eigen-solver against closed-form roots, spectral calculus,
// Gram bases, residual metrics.
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qsplit/numkit.hpp"

using namespace qsplit;

namespace {

// Roots of the characteristic polynomial of a 2x2 or 3x3 Hermitian matrix.
std::vector<double> char_poly_roots(const CMatrix& a) {
    if (a.rows() == 2) {
        const double p = a(0, 0).real(), q = a(1, 1).real();
        const double off = std::norm(a(0, 1));
        const double disc = std::sqrt((p - q) * (p - q) / 4.0 + off);
        return {(p + q) / 2.0 - disc, (p + q) / 2.0 + disc};
    }
    // Trigonometric solution of the depressed cubic.
    const double tr = a.trace().real();
    const double m = tr / 3.0;
    CMatrix b = a - m * CMatrix::identity(3);
    const double q = (b * b).trace().real() / 6.0;
    const double det = ((b * b) * b).trace().real() / 3.0;  // det(b) for traceless b
    const double phi_arg = std::clamp(det / 2.0 / std::pow(q, 1.5), -1.0, 1.0);
    const double phi = std::acos(phi_arg) / 3.0;
    const double r = 2.0 * std::sqrt(q);
    std::vector<double> out{m + r * std::cos(phi), m + r * std::cos(phi + 2.0 * M_PI / 3.0),
                            m + r * std::cos(phi + 4.0 * M_PI / 3.0)};
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("identity and diagonal eigen-decompositions") {
    auto e = hermitian_eig(CMatrix::identity(3));
    CHECK(e.eigenvalues == std::vector<double>{1, 1, 1});
    CHECK(residual_equality(e.basis, CMatrix::identity(3)) < 1e-15);

    auto d = hermitian_eig(CMatrix::diag(std::vector<double>{2.0, 0.5}));
    CHECK(d.eigenvalues[0] == doctest::Approx(0.5));
    CHECK(d.eigenvalues[1] == doctest::Approx(2.0));
}

TEST_CASE("random Hermitian reconstruction and unitarity") {
    Rng rng(7);
    for (std::size_t n : {1u, 2u, 3u, 6u, 17u}) {
        const CMatrix a = random_hermitian(n, rng);
        const auto e = hermitian_eig(a);
        CHECK(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
        const CMatrix rec = e.basis * CMatrix::diag(e.eigenvalues) * e.basis.adjoint();
        CHECK(residual_equality(rec, a) <= 1e-9 * op_norm(a));
        CHECK(residual_unitarity(e.basis) <= 1e-9);
    }
}

TEST_CASE("eigenvalues agree with characteristic polynomial roots") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        for (std::size_t n : {2u, 3u}) {
            const CMatrix a = random_hermitian(n, rng);
            const auto e = hermitian_eig(a);
            const auto roots = char_poly_roots(a);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e.eigenvalues[i] - roots[i]) < 1e-10);
        }
    }
}

TEST_CASE("eigenvector phase convention") {
    Rng rng(3);
    const auto e = hermitian_eig(random_hermitian(5, rng));
    for (std::size_t j = 0; j < 5; ++j) {
        std::size_t lead = 0;
        while (std::abs(e.basis(lead, j)) <= 1e-12) ++lead;
        CHECK(e.basis(lead, j).imag() == 0.0);
        CHECK(e.basis(lead, j).real() > 0.0);
    }
}

TEST_CASE("eigen-solver rejects bad input") {
    CMatrix a(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eig(a), Error);
    try {
        hermitian_eig(a);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotHermitian);
    }
    try {
        hermitian_eig(CMatrix(2, 3));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonSquare);
    }
}

TEST_CASE("spectral functions") {
    const CMatrix a = CMatrix::diag(std::vector<double>{4.0, 0.0});
    CHECK(residual_equality(apply_spectral_function(a, SpectralFn::PseudoInverse),
                            CMatrix::diag(std::vector<double>{0.25, 0.0})) < 1e-15);
    CHECK(residual_equality(apply_spectral_function(a, SpectralFn::SupportProjection),
                            CMatrix::diag(std::vector<double>{1.0, 0.0})) < 1e-15);

    // Scalar 4: the pseudo-inverse is the ordinary inverse; a f(a) is idempotent.
    const CMatrix four = CMatrix::scalar(4.0);
    const CMatrix inv = apply_spectral_function(four, SpectralFn::PseudoInverse);
    CHECK(inv(0, 0).real() == doctest::Approx(0.25));
    CHECK(residual_projection(four * inv) < 1e-15);

    CHECK_THROWS_AS(apply_spectral_function(CMatrix::diag(std::vector<double>{1.0, -1.0}), SpectralFn::Identity), Error);
}

TEST_CASE("near-cutoff eigenvalues raise a warning") {
    std::vector<std::string> warnings;
    apply_spectral_function(CMatrix::diag(std::vector<double>{1.0, 2e-8}), SpectralFn::PseudoInverse, {}, &warnings);
    CHECK(warnings.size() == 1);
}

TEST_CASE("pseudo-inverse properties on random PSD matrices") {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        // Random rank-deficient PSD.
        const CMatrix x = random_matrix(6, 3, rng);
        const CMatrix a = x * x.adjoint();
        const CMatrix pinv = apply_spectral_function(a, SpectralFn::PseudoInverse);
        const CMatrix supp = apply_spectral_function(a, SpectralFn::SupportProjection);
        const double scale = op_norm(a) * op_norm(pinv);
        CHECK(residual_equality(a * pinv, supp) < 1e-9 * scale);
        CHECK(residual_projection(supp) < 1e-9);
        CHECK(residual_equality(a * pinv, pinv * a) < 1e-9 * scale);
        // Moore-Penrose identities as the oracle.
        CHECK(residual_equality(a * pinv * a, a) < 1e-9 * op_norm(a));
        CHECK(residual_equality(pinv * a * pinv, pinv) < 1e-9 * op_norm(pinv));
        int rank = 0;
        for (double v : hermitian_eig(a).eigenvalues) rank += v > 1e-8 * op_norm(a);
        CHECK(gram_orthonormal_basis(a).rank == static_cast<std::size_t>(rank));
        CHECK(rank == 3);
    }
}

TEST_CASE("Gram orthonormal bases") {
    auto g = gram_orthonormal_basis(CMatrix::identity(2));
    CHECK(g.rank == 2);
    CHECK(residual_unitarity(g.isometry) < 1e-15);

    CMatrix ones(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) ones(i, j) = 1.0;
    auto o = gram_orthonormal_basis(ones);
    CHECK(o.rank == 1);
    CHECK(residual_equality(adjoint_times(o.isometry, ones * o.isometry), CMatrix::identity(1)) < 1e-12);
}

TEST_CASE("balanced tensor C^2 over Mat2 has dimension one") {
    // Semi-inner product <v(x)w, v'(x)w'> = (v' w')^* (v w) on row (x) column vectors.
    CMatrix gram(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int b2 = 0; b2 < 2; ++b2) gram(2 * a2 + b2, 2 * a + b) = (a == b && a2 == b2) ? 1.0 : 0.0;
    const auto basis = gram_orthonormal_basis(gram);

    // Brute force: 4 minus the rank of the balancing relations e_a E_pq (x) e_b - e_a (x) E_pq e_b.
    CMatrix rel(4, 16);
    int col = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q, ++col) {
                    if (a == p) rel(2 * q + b, col) += 1.0;  // (e_a E_pq) = delta_ap e_q
                    if (q == b) rel(2 * a + p, col) -= 1.0;  // (E_pq e_b) = delta_qb e_p
                }
    const std::size_t rel_rank = range_basis(rel).cols();
    CHECK(basis.rank == 1);
    CHECK(4 - rel_rank == 1);
}

TEST_CASE("residual metrics") {
    CHECK(residual_unitarity(CMatrix::identity(3)) == 0.0);
    CHECK(residual_projection(CMatrix::diag(std::vector<double>{1.0, 0.0})) == 0.0);
    // diag(2,1): A*A - I = diag(3, 0), operator norm 3.
    CHECK(residual_unitarity(CMatrix::diag(std::vector<double>{2.0, 1.0})) == doctest::Approx(3.0));
    CHECK(residual_positivity(CMatrix::diag(std::vector<double>{1.0, -0.5})) == doctest::Approx(0.5));
    CHECK_THROWS_AS(residual_equality(CMatrix(2, 2), CMatrix(3, 3)), Error);
}

TEST_CASE("operations are bit-reproducible") {
    Rng r1(99), r2(99);
    const CMatrix a = random_hermitian(9, r1), b = random_hermitian(9, r2);
    const auto e1 = hermitian_eig(a), e2 = hermitian_eig(b);
    CHECK(e1.eigenvalues == e2.eigenvalues);
    CHECK(e1.basis == e2.basis);
}

TEST_CASE("adjoint is an involution and kernels are kernels") {
    Rng rng(1);
    const CMatrix a = random_matrix(4, 7, rng);
    CHECK(a.adjoint().adjoint() == a);
    const CMatrix k = nullspace(a);
    CHECK(k.cols() == 3);
    CHECK(op_norm(a * k) < 1e-9 * op_norm(a));
    CHECK(residual_equality(adjoint_times(k, k), CMatrix::identity(3)) < 1e-12);
}
