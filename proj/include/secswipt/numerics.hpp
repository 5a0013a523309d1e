// SPDX-License-Identifier: Apache-2.0
//
// secswipt — secure SWIPT transmit designs (beamforming, artificial noise,
// power splitting) under secrecy and energy-harvesting constraints.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace secswipt {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Entrywise Hermitian check, |M - M^H| <= tol.
inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline void require_hermitian(const ComplexMatrix& m, const char* what) {
    double scale = std::max(1.0, m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0);
    if (!is_hermitian(m, 1e-12 * scale))
        throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

/// Kronecker product, (rA*rB) x (cA*cB).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Column-major stacking of a matrix into a vector.
inline ComplexVector vec(const ComplexMatrix& a) {
    return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

struct EighResult {
    RealVector values;      // descending
    ComplexMatrix vectors;  // unitary, column i pairs with values[i]
};

/// Hermitian eigendecomposition with eigenvalues sorted descending.
inline EighResult eigh(const ComplexMatrix& h) {
    require_hermitian(h, "eigh");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver failed");
    const Eigen::Index n = h.rows();
    EighResult r;
    r.values.resize(n);
    r.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {  // Eigen sorts ascending
        r.values(i) = es.eigenvalues()(n - 1 - i);
        r.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return r;
}

/// Real-symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian H.
/// H >= 0 iff the embedding >= 0; each eigenvalue of H appears twice.
inline RealMatrix real_embed(const ComplexMatrix& h) {
    require_hermitian(h, "real_embed");
    const Eigen::Index n = h.rows();
    RealMatrix e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = h.real();
    e.topRightCorner(n, n) = -h.imag();
    e.bottomLeftCorner(n, n) = h.imag();
    e.bottomRightCorner(n, n) = h.real();
    return e;
}

/// Base-2 log-determinant of a Hermitian positive definite matrix via Cholesky.
inline double logdet_psd(const ComplexMatrix& h) {
    require_hermitian(h, "logdet_psd");
    Eigen::LLT<ComplexMatrix> llt(h);
    if (llt.info() != Eigen::Success) throw std::domain_error("logdet_psd: matrix is not positive definite");
    double acc = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double d = l(i, i).real();
        if (!(d > 0.0)) throw std::domain_error("logdet_psd: matrix is not positive definite");
        acc += std::log2(d);
    }
    return 2.0 * acc;
}

// --- scaled symmetric vectorization (real symmetric <-> packed) ---
// Lower-triangular column-major packing with sqrt(2) on off-diagonal entries,
// so that dot(svec(X), svec(Y)) = tr(X*Y).

inline Eigen::Index svec_len(Eigen::Index n) { return n * (n + 1) / 2; }

inline RealVector svec(const RealMatrix& s) {
    const Eigen::Index n = s.rows();
    static const double rt2 = std::sqrt(2.0);
    RealVector v(svec_len(n));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        v(k++) = s(j, j);
        for (Eigen::Index i = j + 1; i < n; ++i) v(k++) = rt2 * s(i, j);
    }
    return v;
}

inline RealMatrix smat(const RealVector& v, Eigen::Index n) {
    static const double irt2 = 1.0 / std::sqrt(2.0);
    RealMatrix s(n, n);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        s(j, j) = v(k++);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            s(i, j) = irt2 * v(k);
            s(j, i) = s(i, j);
            ++k;
        }
    }
    return s;
}

}  // namespace secswipt
