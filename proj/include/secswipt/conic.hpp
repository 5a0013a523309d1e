// SPDX-License-Identifier: Apache-2.0
//
// Conic program representation: scalar variables, a linear objective, and
// constraint blocks (nonnegative rows, second-order cones, PSD cones).
// Complex Hermitian LMIs enter through the real symmetric embedding; duals
// are mapped back to Hermitian form when read out.

#pragma once

#include <secswipt/numerics.hpp>

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace secswipt::conic {

enum class Cone { nonneg, soc, psd };

enum class Status { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        default: return "numerical-failure";
    }
}

/// Sparse affine scalar expression  constant + sum_j coeff_j * x_j.
struct LinExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    /*implicit*/ LinExpr(double c) : constant(c) {}

    static LinExpr variable(int idx, double coeff = 1.0) {
        LinExpr e;
        e.terms.emplace_back(idx, coeff);
        return e;
    }
    LinExpr& add(int idx, double coeff) {
        if (coeff != 0.0) terms.emplace_back(idx, coeff);
        return *this;
    }
    LinExpr& operator+=(const LinExpr& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        constant += o.constant;
        return *this;
    }
    LinExpr& operator-=(const LinExpr& o) {
        for (const auto& [i, c] : o.terms) terms.emplace_back(i, -c);
        constant -= o.constant;
        return *this;
    }
    LinExpr& operator*=(double a) {
        for (auto& [i, c] : terms) c *= a;
        constant *= a;
        return *this;
    }
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator*(double a, LinExpr e) { return e *= a; }
    friend LinExpr operator-(LinExpr e) { return e *= -1.0; }
};

/// Complex-matrix-valued affine expression  constant + sum_j x_j * C_j.
struct MatExpr {
    Eigen::Index rows = 0, cols = 0;
    ComplexMatrix constant;
    std::vector<std::pair<int, ComplexMatrix>> coeffs;

    static MatExpr zero(Eigen::Index r, Eigen::Index c) {
        MatExpr m;
        m.rows = r;
        m.cols = c;
        m.constant = ComplexMatrix::Zero(r, c);
        return m;
    }
    static MatExpr constant_term(const ComplexMatrix& c) {
        MatExpr m;
        m.rows = c.rows();
        m.cols = c.cols();
        m.constant = c;
        return m;
    }
    /// dim x dim expression  coeff * x_idx * I.
    static MatExpr scaled_identity(int idx, Eigen::Index dim, double coeff = 1.0) {
        MatExpr m = zero(dim, dim);
        m.coeffs.emplace_back(idx, coeff * ComplexMatrix::Identity(dim, dim));
        return m;
    }
    /// 1x1 block from a scalar affine expression.
    static MatExpr from_scalar(const LinExpr& e) {
        MatExpr m = zero(1, 1);
        m.constant(0, 0) = e.constant;
        for (const auto& [i, c] : e.terms) {
            ComplexMatrix cm(1, 1);
            cm(0, 0) = c;
            m.coeffs.emplace_back(i, cm);
        }
        return m;
    }

    MatExpr& add(int idx, const ComplexMatrix& c) {
        coeffs.emplace_back(idx, c);
        return *this;
    }
    MatExpr& operator+=(const MatExpr& o) {
        constant += o.constant;
        coeffs.insert(coeffs.end(), o.coeffs.begin(), o.coeffs.end());
        return *this;
    }
    MatExpr& operator*=(double a) {
        constant *= a;
        for (auto& [i, c] : coeffs) c *= a;
        return *this;
    }
    friend MatExpr operator+(MatExpr a, const MatExpr& b) { return a += b; }
    friend MatExpr operator*(double a, MatExpr m) { return m *= a; }
    friend MatExpr operator-(MatExpr m) { return m *= -1.0; }

    /// L * M(x) * R for fixed matrices.
    MatExpr transformed(const ComplexMatrix& l, const ComplexMatrix& r) const {
        MatExpr out;
        out.rows = l.rows();
        out.cols = r.cols();
        out.constant = l * constant * r;
        out.coeffs.reserve(coeffs.size());
        for (const auto& [i, c] : coeffs) out.coeffs.emplace_back(i, ComplexMatrix(l * c * r));
        return out;
    }
    /// B^H M(x) B congruence.
    MatExpr congruence(const ComplexMatrix& b) const { return transformed(b.adjoint(), b); }
    MatExpr adjoint() const {
        MatExpr out;
        out.rows = cols;
        out.cols = rows;
        out.constant = constant.adjoint();
        for (const auto& [i, c] : coeffs) out.coeffs.emplace_back(i, ComplexMatrix(c.adjoint()));
        return out;
    }
    /// I_n kron M(x).
    MatExpr kron_identity_left(Eigen::Index n) const {
        MatExpr out;
        out.rows = n * rows;
        out.cols = n * cols;
        out.constant = kron(ComplexMatrix::Identity(n, n), constant);
        for (const auto& [i, c] : coeffs)
            out.coeffs.emplace_back(i, kron(ComplexMatrix::Identity(n, n), c));
        return out;
    }
    /// Real scalar expression v^H M(x) v (M must be Hermitian-valued).
    LinExpr quad_form(const ComplexVector& v) const {
        LinExpr e;
        e.constant = (v.adjoint() * constant * v)(0).real();
        for (const auto& [i, c] : coeffs) e.add(i, (v.adjoint() * c * v)(0).real());
        return e;
    }
    /// Real scalar expression tr(M(x)) (M must be Hermitian-valued).
    LinExpr trace() const {
        LinExpr e;
        e.constant = constant.trace().real();
        for (const auto& [i, c] : coeffs) e.add(i, c.trace().real());
        return e;
    }
};

/// [[A, B], [B^H, C]] block assembly; A, C Hermitian-valued.
inline MatExpr block2(const MatExpr& a, const MatExpr& b, const MatExpr& c) {
    const Eigen::Index na = a.rows, nc = c.rows, n = na + nc;
    auto place = [&](const ComplexMatrix& m, Eigen::Index r0, Eigen::Index c0) {
        ComplexMatrix full = ComplexMatrix::Zero(n, n);
        full.block(r0, c0, m.rows(), m.cols()) = m;
        return full;
    };
    MatExpr out = MatExpr::zero(n, n);
    out.constant = place(a.constant, 0, 0) + place(c.constant, na, na) + place(b.constant, 0, na) +
                   place(b.constant.adjoint(), na, 0);
    for (const auto& [i, m] : a.coeffs) out.coeffs.emplace_back(i, place(m, 0, 0));
    for (const auto& [i, m] : c.coeffs) out.coeffs.emplace_back(i, place(m, na, na));
    for (const auto& [i, m] : b.coeffs)
        out.coeffs.emplace_back(i, place(m, 0, na) + place(ComplexMatrix(m.adjoint()), na, 0));
    return out;
}

struct BlockRef {
    int index = -1;
};

/// A Hermitian matrix of scalar decision variables (dim real diagonal entries
/// plus re/im pairs below the diagonal).
struct HermitianVar {
    Eigen::Index dim = 0;
    int base = -1;  // first variable index; dim*dim consecutive reals

    int var_count() const { return static_cast<int>(dim * dim); }

    /// Variable index of the k-th real parameter and its basis matrix.
    /// Ordering: diagonal first, then (re, im) per lower off-diagonal pair.
    ComplexMatrix basis(int k) const {
        ComplexMatrix b = ComplexMatrix::Zero(dim, dim);
        if (k < dim) {
            b(k, k) = 1.0;
            return b;
        }
        int t = k - static_cast<int>(dim);
        int pair = t / 2;
        bool imag_part = t % 2;
        // enumerate (i, j), i > j in column-major order
        int count = 0;
        for (Eigen::Index j = 0; j < dim; ++j)
            for (Eigen::Index i = j + 1; i < dim; ++i, ++count)
                if (count == pair) {
                    if (imag_part) {
                        b(i, j) = cplx(0, 1);
                        b(j, i) = cplx(0, -1);
                    } else {
                        b(i, j) = 1.0;
                        b(j, i) = 1.0;
                    }
                    return b;
                }
        throw std::out_of_range("HermitianVar::basis");
    }

    MatExpr expr() const {
        MatExpr m = MatExpr::zero(dim, dim);
        for (int k = 0; k < var_count(); ++k) m.coeffs.emplace_back(base + k, basis(k));
        return m;
    }
    /// Reconstruct the matrix value from a solution vector.
    ComplexMatrix value(const RealVector& x) const {
        ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
        for (int k = 0; k < var_count(); ++k) m += x(base + k) * basis(k);
        return m;
    }
    LinExpr trace_expr() const {
        LinExpr e;
        for (int k = 0; k < dim; ++k) e.add(base + k, 1.0);
        return e;
    }
};

/// A complex vector of decision variables (re/im interleaved per entry).
struct ComplexVecVar {
    Eigen::Index dim = 0;
    int base = -1;  // 2*dim consecutive reals: (re_0, im_0, re_1, im_1, ...)

    int re(Eigen::Index i) const { return base + 2 * static_cast<int>(i); }
    int im(Eigen::Index i) const { return base + 2 * static_cast<int>(i) + 1; }

    /// Column expression as a dim x 1 MatExpr.
    MatExpr expr() const {
        MatExpr m = MatExpr::zero(dim, 1);
        for (Eigen::Index i = 0; i < dim; ++i) {
            ComplexMatrix cr = ComplexMatrix::Zero(dim, 1), ci = ComplexMatrix::Zero(dim, 1);
            cr(i, 0) = 1.0;
            ci(i, 0) = cplx(0, 1);
            m.coeffs.emplace_back(re(i), cr);
            m.coeffs.emplace_back(im(i), ci);
        }
        return m;
    }
    ComplexVector value(const RealVector& x) const {
        ComplexVector v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = cplx(x(re(i)), x(im(i)));
        return v;
    }
    /// Real part of a^H v as a scalar affine expression.
    LinExpr inner_re(const ComplexVector& a) const {
        LinExpr e;
        for (Eigen::Index i = 0; i < dim; ++i) {
            e.add(re(i), a(i).real());
            e.add(im(i), a(i).imag());
        }
        return e;
    }
    /// Imag part of a^H v.
    LinExpr inner_im(const ComplexVector& a) const {
        LinExpr e;
        for (Eigen::Index i = 0; i < dim; ++i) {
            e.add(re(i), -a(i).imag());
            e.add(im(i), a(i).real());
        }
        return e;
    }
};

struct Block {
    Cone cone = Cone::nonneg;
    int len = 0;       // entries in the s-vector
    int mat_dim = 0;   // psd: real matrix dimension
    int herm_dim = 0;  // psd from a Hermitian embedding: complex dimension
    std::string role;
    int offset = 0;  // filled at assembly
    std::vector<LinExpr> rows;
};

class Problem {
 public:
    int add_var() { return num_vars_++; }
    std::vector<int> add_vars(int n) {
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = add_var();
        return idx;
    }
    HermitianVar add_hermitian_var(Eigen::Index dim) {
        HermitianVar v;
        v.dim = dim;
        v.base = num_vars_;
        num_vars_ += v.var_count();
        return v;
    }
    ComplexVecVar add_cvec_var(Eigen::Index dim) {
        ComplexVecVar v;
        v.dim = dim;
        v.base = num_vars_;
        num_vars_ += 2 * static_cast<int>(dim);
        return v;
    }

    void objective_add(int var, double coeff) { objective_.add(var, coeff); }
    void objective_add(const LinExpr& e) { objective_ += e; }
    const LinExpr& objective() const { return objective_; }

    /// expr(x) >= 0
    BlockRef add_nonneg(LinExpr e, std::string role = {}) {
        check_expr(e);
        Block b;
        b.cone = Cone::nonneg;
        b.len = 1;
        b.role = std::move(role);
        b.rows.push_back(std::move(e));
        blocks_.push_back(std::move(b));
        return {static_cast<int>(blocks_.size()) - 1};
    }
    /// entries[0] >= || entries[1..] ||
    BlockRef add_soc(std::vector<LinExpr> entries, std::string role = {}) {
        if (entries.size() < 2) throw std::invalid_argument("add_soc: need at least 2 entries");
        for (const auto& e : entries) check_expr(e);
        Block b;
        b.cone = Cone::soc;
        b.len = static_cast<int>(entries.size());
        b.role = std::move(role);
        b.rows = std::move(entries);
        blocks_.push_back(std::move(b));
        return {static_cast<int>(blocks_.size()) - 1};
    }
    /// u*v >= w^2, u,v >= 0 as the cone (u+v, 2w, u-v).
    BlockRef add_rotated_soc(const LinExpr& u, const LinExpr& v, const LinExpr& w, std::string role = {}) {
        std::vector<LinExpr> e;
        e.push_back(u + v);
        e.push_back(2.0 * w);
        e.push_back(u - v);
        return add_soc(std::move(e), std::move(role));
    }

    /// M(x) >= 0 for a Hermitian-matrix-valued affine expression, registered
    /// through the real symmetric embedding (real dimension doubles).
    BlockRef add_hermitian_psd(const MatExpr& m, std::string role = {}) {
        if (m.rows != m.cols) throw std::invalid_argument("add_hermitian_psd: square expression required");
        const Eigen::Index d = m.rows, rd = 2 * d;
        require_hermitian(m.constant, "add_hermitian_psd constant");
        Block b;
        b.cone = Cone::psd;
        b.mat_dim = static_cast<int>(rd);
        b.herm_dim = static_cast<int>(d);
        b.len = static_cast<int>(svec_len(rd));
        b.role = std::move(role);
        b.rows.assign(b.len, LinExpr{});
        RealVector sv = svec(real_embed(m.constant));
        for (int r = 0; r < b.len; ++r) b.rows[r].constant = sv(r);
        for (const auto& [idx, c] : m.coeffs) {
            if (idx < 0 || idx >= num_vars_) throw std::invalid_argument("add_hermitian_psd: bad variable");
            require_hermitian(c, "add_hermitian_psd coefficient");
            RealVector cv = svec(real_embed(c));
            for (int r = 0; r < b.len; ++r)
                if (cv(r) != 0.0) b.rows[r].add(idx, cv(r));
        }
        blocks_.push_back(std::move(b));
        return {static_cast<int>(blocks_.size()) - 1};
    }

    int num_vars() const { return num_vars_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& block(BlockRef r) const { return blocks_.at(r.index); }

    int cone_rows() const {
        int m = 0;
        for (const auto& b : blocks_) m += b.len;
        return m;
    }

    /// Dense assembly G x + s = h, s in K (per-block rows stacked in order).
    void assemble(RealMatrix& g, RealVector& h, RealVector& c) {
        const int m = cone_rows();
        g = RealMatrix::Zero(m, num_vars_);
        h = RealVector::Zero(m);
        c = RealVector::Zero(num_vars_);
        int off = 0;
        for (auto& b : blocks_) {
            b.offset = off;
            for (int r = 0; r < b.len; ++r) {
                h(off + r) = b.rows[r].constant;
                for (const auto& [j, v] : b.rows[r].terms) g(off + r, j) -= v;  // s = h - Gx
            }
            off += b.len;
        }
        for (const auto& [j, v] : objective_.terms) c(j) += v;
    }

    /// Self-describing dump (variables, cones, sparse affine entries) for
    /// cross-solver replay.
    std::string dump() const {
        std::ostringstream os;
        os << "conic-problem v1\n";
        os << "vars " << num_vars_ << "\n";
        os << "objective";
        for (const auto& [j, v] : objective_.terms) os << " " << j << ":" << v;
        os << "\n";
        os << "blocks " << blocks_.size() << "\n";
        for (const auto& b : blocks_) {
            os << (b.cone == Cone::nonneg ? "nonneg" : b.cone == Cone::soc ? "soc" : "psd");
            os << " len=" << b.len;
            if (b.cone == Cone::psd) os << " matdim=" << b.mat_dim << " hermdim=" << b.herm_dim;
            if (!b.role.empty()) os << " role=" << b.role;
            os << "\n";
            for (int r = 0; r < b.len; ++r) {
                os << "  row " << r << " const=" << b.rows[r].constant;
                for (const auto& [j, v] : b.rows[r].terms) os << " " << j << ":" << v;
                os << "\n";
            }
        }
        return os.str();
    }

 private:
    void check_expr(const LinExpr& e) const {
        for (const auto& [j, v] : e.terms) {
            (void)v;
            if (j < 0 || j >= num_vars_) throw std::invalid_argument("expression references unknown variable");
        }
    }

    int num_vars_ = 0;
    LinExpr objective_;
    std::vector<Block> blocks_;
};

}  // namespace secswipt::conic
