// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <secswipt/numerics.hpp>

#include <random>

using namespace secswipt;

namespace {

std::mt19937 rng(12345);

ComplexMatrix random_complex(int r, int c) {
    std::normal_distribution<double> g;
    ComplexMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

ComplexMatrix random_hermitian(int n) {
    ComplexMatrix a = random_complex(n, n);
    return (a + a.adjoint()) / 2.0;
}

ComplexMatrix random_psd(int n) {
    ComplexMatrix a = random_complex(n, n);
    return a * a.adjoint();
}

}  // namespace

TEST_CASE("kron identities") {
    ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    REQUIRE((kron(i2, i2) - ComplexMatrix::Identity(4, 4)).norm() == 0.0);

    ComplexMatrix scal(1, 1);
    scal(0, 0) = 2.0;
    ComplexMatrix b = random_complex(3, 2);
    REQUIRE((kron(scal, b) - 2.0 * b).norm() == 0.0);
}

TEST_CASE("vec definition and kron-vec identity") {
    ComplexMatrix a(2, 2);
    a << 1.0, 3.0, 2.0, 4.0;
    ComplexVector v = vec(a);
    REQUIRE(v(0) == cplx(1));
    REQUIRE(v(1) == cplx(2));
    REQUIRE(v(2) == cplx(3));
    REQUIRE(v(3) == cplx(4));

    REQUIRE(vec(ComplexMatrix::Zero(2, 2)).norm() == 0.0);

    // vec(M1*M2*M3) = (M3^T kron M1) vec(M2), oracle is the direct product
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m1 = random_complex(2, 2), m2 = random_complex(2, 2), m3 = random_complex(2, 2);
        ComplexVector lhs = vec(m1 * m2 * m3);
        ComplexVector rhs = kron(m3.transpose(), m1) * vec(m2);
        REQUIRE((lhs - rhs).norm() < 1e-12 * std::max(1.0, lhs.norm()));
    }
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m1 = random_complex(3, 4), m2 = random_complex(4, 2), m3 = random_complex(2, 3);
        ComplexVector lhs = vec(m1 * m2 * m3);
        ComplexVector rhs = kron(m3.transpose(), m1) * vec(m2);
        REQUIRE((lhs - rhs).norm() < 1e-12 * std::max(1.0, lhs.norm()));
    }
}

TEST_CASE("eigh basics") {
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    auto r = eigh(d);
    REQUIRE(r.values(0) == Catch::Approx(3.0));
    REQUIRE(r.values(1) == Catch::Approx(1.0));

    ComplexVector q(2);
    q << cplx(1, 0), cplx(0, 1);
    q /= std::sqrt(2.0);
    auto rq = eigh(q * q.adjoint());
    REQUIRE(rq.values(0) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(rq.values(1) == Catch::Approx(0.0).margin(1e-12));
    // leading eigenvector proportional to q (up to phase)
    cplx phase = rq.vectors.col(0).dot(q);
    REQUIRE(std::abs(std::abs(phase) - 1.0) < 1e-10);
}

TEST_CASE("eigh reconstruction and orthonormality on random input") {
    for (int trial = 0; trial < 25; ++trial) {
        ComplexMatrix h = random_hermitian(4);
        auto r = eigh(h);
        ComplexMatrix lam = r.values.cast<cplx>().asDiagonal();
        REQUIRE((h * r.vectors - r.vectors * lam).norm() <= 1e-10 * std::max(1.0, h.norm()));
        REQUIRE((r.vectors.adjoint() * r.vectors - ComplexMatrix::Identity(4, 4)).norm() <= 1e-10 * 4);
        for (int i = 1; i < 4; ++i) REQUIRE(r.values(i) <= r.values(i - 1));
    }
}

TEST_CASE("eigh rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    REQUIRE_THROWS_AS(eigh(m), std::invalid_argument);
}

TEST_CASE("real_embed identity and spectrum doubling") {
    REQUIRE((real_embed(ComplexMatrix::Identity(2, 2)) - RealMatrix::Identity(4, 4)).norm() == 0.0);

    ComplexMatrix h(2, 2);
    h << cplx(1, 0), cplx(0, 1), cplx(0, -1), cplx(1, 0);  // eigenvalues 0 and 2
    RealMatrix e = real_embed(h);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(e);  // independent dense oracle
    RealVector ev = es.eigenvalues();
    REQUIRE(ev(0) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(ev(1) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(ev(2) == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(ev(3) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("real_embed preserves definiteness sign") {
    for (int trial = 0; trial < 1000; ++trial) {
        ComplexMatrix h = (trial % 2 == 0) ? random_hermitian(3) : ComplexMatrix(random_psd(3));
        RealMatrix e = real_embed(h);
        double min_h = eigh(h).values.minCoeff();
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(e);
        double min_e = es.eigenvalues().minCoeff();
        if (min_h > 1e-9) REQUIRE(min_e > -1e-12);
        if (min_h < -1e-9) REQUIRE(min_e < 1e-12);
        if (h == ComplexMatrix(random_psd(3) * 0.0)) REQUIRE(min_e == 0.0);
    }
    for (int trial = 0; trial < 50; ++trial) {
        RealMatrix e = real_embed(random_psd(3));
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(e);
        REQUIRE(es.eigenvalues().minCoeff() >= -1e-12);
    }
}

TEST_CASE("logdet_psd values and eig oracle") {
    REQUIRE(logdet_psd(ComplexMatrix::Identity(4, 4)) == Catch::Approx(0.0).margin(1e-14));

    ComplexMatrix d = 2.0 * ComplexMatrix::Identity(2, 2);
    REQUIRE(logdet_psd(d) == Catch::Approx(2.0));

    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix p = random_psd(3) + 0.1 * ComplexMatrix::Identity(3, 3);
        auto ev = eigh(p).values;
        double expect = 0.0;
        for (int i = 0; i < 3; ++i) expect += std::log2(ev(i));
        REQUIRE(std::abs(logdet_psd(p) - expect) < 1e-10);
    }

    ComplexMatrix neg = -ComplexMatrix::Identity(2, 2);
    REQUIRE_THROWS_AS(logdet_psd(neg), std::domain_error);
}

TEST_CASE("svec/smat roundtrip and trace inner product") {
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + trial % 4;
        RealMatrix a(n, n), b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                a(i, j) = g(rng);
                b(i, j) = g(rng);
            }
        RealMatrix sa = (a + a.transpose()) / 2, sb = (b + b.transpose()) / 2;
        REQUIRE((smat(svec(sa), n) - sa).norm() < 1e-14 * std::max(1.0, sa.norm()));
        REQUIRE(svec(sa).dot(svec(sb)) == Catch::Approx((sa * sb).trace()).margin(1e-12));
    }
}
