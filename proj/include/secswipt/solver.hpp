// SPDX-License-Identifier: Apache-2.0
//
// Dense homogeneous self-dual interior-point solver for the conic programs
// built by the designers:  min c'x  s.t.  Gx + s = h,  s in K,
// K a product of nonnegative rays, second-order cones and PSD cones.
// Nesterov-Todd scaling with a Mehrotra predictor-corrector step; the KKT
// system is solved through the normal equations G' (W'W)^{-1} G, which is
// well conditioned at these sizes (tens of variables, cone dimension in the
// hundreds).

#pragma once

#include <secswipt/conic.hpp>

#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <optional>

namespace secswipt::conic {

struct SolverSettings {
    double feastol = 1e-7;
    double abstol = 1e-9;
    double reltol = 1e-6;
    int max_iter = 200;
    double step_fraction = 0.985;
    int refinement = 1;
    bool equilibrate = true;
    bool trace = false;  // per-iteration progress on stderr
};

struct Report {
    Status status = Status::numerical_failure;
    RealVector x;  // primal variables
    RealVector s;  // cone slacks, block-stacked
    RealVector z;  // cone duals, block-stacked
    double objective = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    double wall_time_s = 0.0;
    double primal_residual = std::numeric_limits<double>::infinity();
    double dual_residual = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    double relative_gap = std::numeric_limits<double>::infinity();

    bool ok() const { return status == Status::optimal; }
};

/// Dual slice of one block.
inline RealVector block_dual(const Problem& p, const Report& r, BlockRef ref) {
    const Block& b = p.block(ref);
    return r.z.segment(b.offset, b.len);
}
inline RealVector block_slack(const Problem& p, const Report& r, BlockRef ref) {
    const Block& b = p.block(ref);
    return r.s.segment(b.offset, b.len);
}

/// Hermitian dual of a Hermitian PSD block: the real symmetric dual S is
/// folded back through the embedding adjoint, Z = (S11+S22) + i(S12-S12^T),
/// so that <z, svec(embed(C))> = tr(C Z) for every Hermitian C.
inline ComplexMatrix hermitian_dual(const Problem& p, const Report& r, BlockRef ref) {
    const Block& b = p.block(ref);
    if (b.cone != Cone::psd || b.herm_dim == 0)
        throw std::invalid_argument("hermitian_dual: block is not a Hermitian PSD block");
    RealMatrix s = smat(r.z.segment(b.offset, b.len), b.mat_dim);
    const Eigen::Index d = b.herm_dim;
    RealMatrix s11 = s.topLeftCorner(d, d), s12 = s.topRightCorner(d, d), s22 = s.bottomRightCorner(d, d);
    ComplexMatrix z(d, d);
    z.real() = s11 + s22;
    z.imag() = s12 - s12.transpose();
    return z;
}

namespace detail {

struct ConeLayout {
    struct Entry {
        Cone cone;
        int offset, len, mat_dim;
    };
    std::vector<Entry> entries;
    int total = 0;
    int degree = 0;

    static ConeLayout from(const Problem& p) {
        ConeLayout l;
        int off = 0;
        for (const auto& b : p.blocks()) {
            l.entries.push_back({b.cone, off, b.len, b.mat_dim});
            off += b.len;
            switch (b.cone) {
                case Cone::nonneg: l.degree += 1; break;
                case Cone::soc: l.degree += 1; break;
                case Cone::psd: l.degree += b.mat_dim; break;
            }
        }
        l.total = off;
        return l;
    }

    RealVector identity() const {
        RealVector e = RealVector::Zero(total);
        for (const auto& en : entries) {
            if (en.cone == Cone::nonneg) e(en.offset) = 1.0;
            else if (en.cone == Cone::soc) e(en.offset) = 1.0;
            else e.segment(en.offset, en.len) = svec(RealMatrix::Identity(en.mat_dim, en.mat_dim));
        }
        return e;
    }

    /// Smallest "eigenvalue" of u with respect to the cone.
    double min_eig(const RealVector& u) const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& en : entries) {
            if (en.cone == Cone::nonneg) {
                m = std::min(m, u(en.offset));
            } else if (en.cone == Cone::soc) {
                m = std::min(m, u(en.offset) - u.segment(en.offset + 1, en.len - 1).norm());
            } else {
                RealMatrix mm = smat(u.segment(en.offset, en.len), en.mat_dim);
                Eigen::SelfAdjointEigenSolver<RealMatrix> es(mm, Eigen::EigenvaluesOnly);
                m = std::min(m, es.eigenvalues().minCoeff());
            }
        }
        return m;
    }
};

inline void soc_apply(double beta, const RealVector& v, const RealVector& u, RealVector& out, bool inverse) {
    // W u = beta (2 v (v'u) - J u); W^{-1} u = (1/beta)(2 Jv (v'Ju) - J u)
    const Eigen::Index n = u.size();
    RealVector ju(n);
    ju(0) = u(0);
    ju.tail(n - 1) = -u.tail(n - 1);
    if (!inverse) {
        double d = v.dot(u);
        out = 2.0 * d * v - ju;
        out *= beta;
    } else {
        RealVector jv(n);
        jv(0) = v(0);
        jv.tail(n - 1) = -v.tail(n - 1);
        double d = jv.dot(u);
        out = 2.0 * d * jv - ju;
        out /= beta;
    }
}

struct Scaling {
    struct LpS {
        double w;  // sqrt(s/z)
    };
    struct SocS {
        double beta;
        RealVector v;
    };
    struct PsdS {
        RealMatrix r, rinv;   // NT factor and its inverse
        RealMatrix rrt, p;    // R R' and (R R')^{-1}
        RealVector sig;       // scaled spectrum, mat(lambda) = diag(sig)
    };
    std::vector<LpS> lp;
    std::vector<SocS> soc;
    std::vector<PsdS> psd;
    RealVector lambda;

    // indices parallel to layout entries
    std::vector<int> kind_index;
};

/// Nesterov-Todd scaling so that lambda = W z = W^{-T} s.
inline std::optional<Scaling> compute_scaling(const ConeLayout& L, const RealVector& s, const RealVector& z) {
    Scaling sc;
    sc.lambda.resize(L.total);
    sc.kind_index.resize(L.entries.size());
    for (size_t bi = 0; bi < L.entries.size(); ++bi) {
        const auto& en = L.entries[bi];
        if (en.cone == Cone::nonneg) {
            double sv = s(en.offset), zv = z(en.offset);
            if (!(sv > 0.0) || !(zv > 0.0)) return std::nullopt;
            sc.kind_index[bi] = static_cast<int>(sc.lp.size());
            sc.lp.push_back({std::sqrt(sv / zv)});
            sc.lambda(en.offset) = std::sqrt(sv * zv);
        } else if (en.cone == Cone::soc) {
            RealVector sv = s.segment(en.offset, en.len), zv = z.segment(en.offset, en.len);
            double as2 = sv(0) * sv(0) - sv.tail(en.len - 1).squaredNorm();
            double az2 = zv(0) * zv(0) - zv.tail(en.len - 1).squaredNorm();
            if (!(as2 > 0.0) || !(az2 > 0.0) || !(sv(0) > 0.0) || !(zv(0) > 0.0)) return std::nullopt;
            double as = std::sqrt(as2), az = std::sqrt(az2);
            RealVector sb = sv / as, zb = zv / az;
            double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
            RealVector jzb(en.len);
            jzb(0) = zb(0);
            jzb.tail(en.len - 1) = -zb.tail(en.len - 1);
            RealVector wbar = (sb + jzb) / (2.0 * gamma);
            // half-angle vector: W = beta (2 v v' - J) squares to the NT map
            Scaling::SocS ss;
            ss.v.resize(en.len);
            ss.v(0) = std::sqrt((1.0 + wbar(0)) / 2.0);
            ss.v.tail(en.len - 1) = wbar.tail(en.len - 1) / (2.0 * ss.v(0));
            ss.beta = std::sqrt(as / az);
            RealVector lam(en.len);
            soc_apply(ss.beta, ss.v, zv, lam, false);
            sc.lambda.segment(en.offset, en.len) = lam;
            sc.kind_index[bi] = static_cast<int>(sc.soc.size());
            sc.soc.push_back(std::move(ss));
        } else {
            RealMatrix sm = smat(s.segment(en.offset, en.len), en.mat_dim);
            RealMatrix zm = smat(z.segment(en.offset, en.len), en.mat_dim);
            Eigen::LLT<RealMatrix> ls(sm), lz(zm);
            if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return std::nullopt;
            RealMatrix lsm = ls.matrixL(), lzm = lz.matrixL();
            Eigen::JacobiSVD<RealMatrix> svd(lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
            RealVector sig = svd.singularValues();
            if (sig.minCoeff() <= 0.0) return std::nullopt;
            RealVector sighalf = sig.cwiseSqrt();
            Scaling::PsdS ps;
            ps.r = lsm * svd.matrixV() * sighalf.cwiseInverse().asDiagonal();
            ps.rinv = sighalf.cwiseInverse().asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
            ps.rrt = ps.r * ps.r.transpose();
            ps.p = ps.rinv.transpose() * ps.rinv;  // (R R')^{-1}
            ps.sig = sig;
            sc.lambda.segment(en.offset, en.len) = svec(RealMatrix(sig.asDiagonal()));
            sc.kind_index[bi] = static_cast<int>(sc.psd.size());
            sc.psd.push_back(std::move(ps));
        }
    }
    return sc;
}

enum class Op { w, wt, winv, winvt, wtw_inv, wtw };

/// Apply a scaling operator blockwise; for lp and soc cones W is symmetric.
inline RealVector apply_scaling(const ConeLayout& L, const Scaling& sc, const RealVector& u, Op op) {
    RealVector out(L.total);
    for (size_t bi = 0; bi < L.entries.size(); ++bi) {
        const auto& en = L.entries[bi];
        if (en.cone == Cone::nonneg) {
            double w = sc.lp[sc.kind_index[bi]].w;
            double f = 1.0;
            switch (op) {
                case Op::w:
                case Op::wt: f = w; break;
                case Op::winv:
                case Op::winvt: f = 1.0 / w; break;
                case Op::wtw: f = w * w; break;
                case Op::wtw_inv: f = 1.0 / (w * w); break;
            }
            out(en.offset) = f * u(en.offset);
        } else if (en.cone == Cone::soc) {
            const auto& ss = sc.soc[sc.kind_index[bi]];
            RealVector seg = u.segment(en.offset, en.len), tmp(en.len);
            switch (op) {
                case Op::w:
                case Op::wt: soc_apply(ss.beta, ss.v, seg, tmp, false); break;
                case Op::winv:
                case Op::winvt: soc_apply(ss.beta, ss.v, seg, tmp, true); break;
                case Op::wtw:
                    soc_apply(ss.beta, ss.v, seg, tmp, false);
                    seg = tmp;
                    soc_apply(ss.beta, ss.v, seg, tmp, false);
                    break;
                case Op::wtw_inv:
                    soc_apply(ss.beta, ss.v, seg, tmp, true);
                    seg = tmp;
                    soc_apply(ss.beta, ss.v, seg, tmp, true);
                    break;
            }
            out.segment(en.offset, en.len) = tmp;
        } else {
            const auto& ps = sc.psd[sc.kind_index[bi]];
            RealMatrix m = smat(u.segment(en.offset, en.len), en.mat_dim), res;
            switch (op) {
                case Op::w: res = ps.r.transpose() * m * ps.r; break;
                case Op::wt: res = ps.r * m * ps.r.transpose(); break;
                case Op::winv: res = ps.rinv.transpose() * m * ps.rinv; break;
                case Op::winvt: res = ps.rinv * m * ps.rinv.transpose(); break;
                case Op::wtw: res = ps.rrt * m * ps.rrt; break;
                case Op::wtw_inv: res = ps.p * m * ps.p; break;
            }
            res = ((res + res.transpose()) * 0.5).eval();
            out.segment(en.offset, en.len) = svec(res);
        }
    }
    return out;
}

/// Jordan product u o v.
inline RealVector jordan_prod(const ConeLayout& L, const RealVector& u, const RealVector& v) {
    RealVector out(L.total);
    for (const auto& en : L.entries) {
        if (en.cone == Cone::nonneg) {
            out(en.offset) = u(en.offset) * v(en.offset);
        } else if (en.cone == Cone::soc) {
            auto us = u.segment(en.offset, en.len), vs = v.segment(en.offset, en.len);
            out(en.offset) = us.dot(vs);
            out.segment(en.offset + 1, en.len - 1) =
                us(0) * vs.tail(en.len - 1) + vs(0) * us.tail(en.len - 1);
        } else {
            RealMatrix um = smat(u.segment(en.offset, en.len), en.mat_dim);
            RealMatrix vm = smat(v.segment(en.offset, en.len), en.mat_dim);
            out.segment(en.offset, en.len) = svec(RealMatrix(0.5 * (um * vm + vm * um)));
        }
    }
    return out;
}

/// Solve lambda o x = d. For PSD blocks lambda is diagonal by construction.
inline RealVector jordan_div(const ConeLayout& L, const Scaling& sc, const RealVector& d) {
    RealVector out(L.total);
    for (size_t bi = 0; bi < L.entries.size(); ++bi) {
        const auto& en = L.entries[bi];
        const RealVector lam = sc.lambda.segment(en.offset, en.len);
        if (en.cone == Cone::nonneg) {
            out(en.offset) = d(en.offset) / lam(0);
        } else if (en.cone == Cone::soc) {
            double l0 = lam(0);
            auto l1 = lam.tail(en.len - 1);
            double denom = l0 * l0 - l1.squaredNorm();
            double x0 = (l0 * d(en.offset) - l1.dot(d.segment(en.offset + 1, en.len - 1))) / denom;
            out(en.offset) = x0;
            out.segment(en.offset + 1, en.len - 1) =
                (d.segment(en.offset + 1, en.len - 1) - x0 * l1) / l0;
        } else {
            const auto& sig = sc.psd[sc.kind_index[bi]].sig;
            RealMatrix dm = smat(d.segment(en.offset, en.len), en.mat_dim);
            RealMatrix xm(en.mat_dim, en.mat_dim);
            for (int i = 0; i < en.mat_dim; ++i)
                for (int j = 0; j < en.mat_dim; ++j) xm(i, j) = 2.0 * dm(i, j) / (sig(i) + sig(j));
            out.segment(en.offset, en.len) = svec(xm);
        }
    }
    return out;
}

/// Largest alpha >= 0 with lambda + alpha d in K (inf when unbounded).
inline double max_step(const ConeLayout& L, const Scaling& sc, const RealVector& d) {
    double amax = std::numeric_limits<double>::infinity();
    for (size_t bi = 0; bi < L.entries.size(); ++bi) {
        const auto& en = L.entries[bi];
        const RealVector lam = sc.lambda.segment(en.offset, en.len);
        if (en.cone == Cone::nonneg) {
            double dv = d(en.offset);
            if (dv < 0.0) amax = std::min(amax, -lam(0) / dv);
        } else if (en.cone == Cone::soc) {
            double l0 = lam(0), d0 = d(en.offset);
            auto l1 = lam.tail(en.len - 1);
            auto d1 = d.segment(en.offset + 1, en.len - 1);
            double a = d0 * d0 - d1.squaredNorm();
            double b = 2.0 * (l0 * d0 - l1.dot(d1));
            double cc = l0 * l0 - l1.squaredNorm();  // > 0 in the interior
            double root = std::numeric_limits<double>::infinity();
            if (std::abs(a) < 1e-300) {
                if (b < 0.0) root = -cc / b;
            } else {
                double disc = b * b - 4.0 * a * cc;
                if (disc >= 0.0) {
                    double sq = std::sqrt(disc);
                    double q = -0.5 * (b + (b >= 0 ? sq : -sq));
                    double r1 = q / a, r2 = (q != 0.0) ? cc / q : std::numeric_limits<double>::infinity();
                    if (r1 > 0.0) root = std::min(root, r1);
                    if (r2 > 0.0) root = std::min(root, r2);
                }
            }
            if (d0 < 0.0) root = std::min(root, -l0 / d0);
            amax = std::min(amax, root);
        } else {
            const auto& sig = sc.psd[sc.kind_index[bi]].sig;
            RealMatrix dm = smat(d.segment(en.offset, en.len), en.mat_dim);
            RealVector is = sig.cwiseSqrt().cwiseInverse();
            RealMatrix m = is.asDiagonal() * dm * is.asDiagonal();
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
            double nu = es.eigenvalues().minCoeff();
            if (nu < 0.0) amax = std::min(amax, -1.0 / nu);
        }
    }
    return amax;
}

}  // namespace detail

class Solver {
 public:
    Solver(Problem& p, SolverSettings st = {}) : settings_(st) {
        p.assemble(g0_, h0_, c0_);
        layout_ = detail::ConeLayout::from(p);
        n_ = static_cast<int>(g0_.cols());
        m_ = static_cast<int>(g0_.rows());
    }

    /// Two-phase solve: when the optimal value sits far from unit scale in
    /// the equilibrated problem, the absolute duality-gap floor of double
    /// precision is hit before the relative tolerance, so a second pass
    /// rescales the objective by the first-pass estimate.
    Report solve() {
        auto t0 = std::chrono::steady_clock::now();
        extra_cscale_ = 1.0;
        Report rep = run();
        if (rep.status == Status::numerical_failure && std::isfinite(rep.objective) &&
            rep.primal_residual < 1e2 * settings_.feastol && rep.dual_residual < 1e2 * settings_.feastol) {
            double pcost_t = std::abs(rep.objective) / (rho_c_ * rho_h_);
            double gap_t = rep.gap / (rho_c_ * rho_h_);
            double est = std::max({pcost_t, gap_t, 1e-10});
            if (est < 1e-2 || est > 1e2) {
                extra_cscale_ = std::clamp(est, 1e-12, 1e12);
                Report rep2 = run();
                rep2.iterations += rep.iterations;
                if (rep2.status == Status::optimal || rep2.relative_gap < rep.relative_gap)
                    rep = std::move(rep2);
            }
        }
        rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }

 private:

    using Layout = detail::ConeLayout;
    using Scaling = detail::Scaling;
    using Op = detail::Op;

    SolverSettings settings_;
    RealMatrix g0_, g_;
    RealVector h0_, c0_, h_, c_;
    Layout layout_;
    int n_ = 0, m_ = 0;

    // equilibration state
    RealVector dcol_, erow_;
    double rho_c_ = 1.0, rho_h_ = 1.0;
    double extra_cscale_ = 1.0;

    Eigen::LLT<RealMatrix> mchol_;
    Eigen::PartialPivLU<RealMatrix> lu_;
    RealVector lu_scale_;
    bool use_lu_ = false;
    double reg_ = 0.0;

    void equilibrate() {
        dcol_ = RealVector::Ones(n_);
        erow_ = RealVector::Ones(m_);
        if (!settings_.equilibrate) return;
        for (int pass = 0; pass < 3; ++pass) {
            // block-uniform row scaling (keeps cone membership)
            for (const auto& en : layout_.entries) {
                double mx = 0.0;
                for (int r = 0; r < en.len; ++r) {
                    mx = std::max(mx, g_.row(en.offset + r).cwiseAbs().maxCoeff());
                    mx = std::max(mx, std::abs(h_(en.offset + r)));
                }
                if (mx <= 0.0) continue;
                double f = 1.0 / std::sqrt(std::clamp(mx, 1e-8, 1e8));
                g_.middleRows(en.offset, en.len) *= f;
                h_.segment(en.offset, en.len) *= f;
                erow_.segment(en.offset, en.len) *= f;
            }
            for (int j = 0; j < n_; ++j) {
                double mx = g_.col(j).cwiseAbs().maxCoeff();
                if (mx <= 0.0) continue;
                double f = 1.0 / std::sqrt(std::clamp(mx, 1e-8, 1e8));
                g_.col(j) *= f;
                dcol_(j) *= f;
            }
        }
        c_ = dcol_.asDiagonal() * c_;
        rho_c_ = std::max(1.0, c_.norm()) * extra_cscale_;
        rho_h_ = std::max(1.0, h_.norm());
        c_ /= rho_c_;
        h_ /= rho_h_;
    }

    bool factor_normal(const Scaling& sc) {
        // Gram form M = (W^{-T} G)' (W^{-T} G): exactly symmetric PSD, so the
        // Cholesky stays healthy even when the scaling is extreme.
        RealMatrix scaled(m_, n_);
        for (int j = 0; j < n_; ++j)
            scaled.col(j) = detail::apply_scaling(layout_, sc, g_.col(j), Op::winvt);
        RealMatrix mmat = scaled.transpose() * scaled;
        double base = std::max(1.0, mmat.diagonal().cwiseAbs().maxCoeff());
        for (int attempt = 0; attempt < 4; ++attempt) {
            reg_ = base * 1e-15 * std::pow(1000.0, attempt);
            RealMatrix mreg = mmat + reg_ * RealMatrix::Identity(n_, n_);
            mchol_.compute(mreg);
            if (mchol_.info() == Eigen::Success) break;
            if (attempt == 3) return false;
        }
        // endgame safeguard on small systems: exact augmented factorization
        // with a symmetric diagonal rebalance of the scaling block, which
        // keeps partial pivoting healthy when W'W spans many decades
        use_lu_ = false;
        if (m_ + n_ <= 600) {
            RealMatrix wtw(m_, m_);
            for (int j = 0; j < m_; ++j) {
                RealVector e = RealVector::Zero(m_);
                e(j) = 1.0;
                wtw.col(j) = detail::apply_scaling(layout_, sc, e, Op::wtw);
            }
            double wmax = 0.0, wmin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                double v = std::max(std::abs(wtw(i, i)), 1e-300);
                wmax = std::max(wmax, v);
                wmin = std::min(wmin, v);
            }
            if (wmax / wmin > 1e8) {
                lu_scale_.resize(m_);
                for (int i = 0; i < m_; ++i)
                    lu_scale_(i) = 1.0 / std::sqrt(1.0 + wtw.row(i).cwiseAbs().maxCoeff());
                RealMatrix aug = RealMatrix::Zero(n_ + m_, n_ + m_);
                aug.topRightCorner(n_, m_) = g_.transpose() * lu_scale_.asDiagonal();
                aug.bottomLeftCorner(m_, n_) = lu_scale_.asDiagonal() * g_;
                aug.bottomRightCorner(m_, m_) =
                    -(lu_scale_.asDiagonal() * wtw * lu_scale_.asDiagonal());
                lu_.compute(aug);
                use_lu_ = true;
            }
        }
        return true;
    }

    // [0 G'; G -W'W][x;z] = [bx;bz]
    void solve_kkt(const Scaling& sc, const RealVector& bx, const RealVector& bz, RealVector& x,
                   RealVector& z) const {
        if (use_lu_) {
            RealVector rhs(n_ + m_);
            rhs.head(n_) = bx;
            rhs.tail(m_) = lu_scale_.asDiagonal() * bz;
            RealVector sol = lu_.solve(rhs);
            x = sol.head(n_);
            z = lu_scale_.asDiagonal() * sol.tail(m_);
        } else {
            RealVector t = detail::apply_scaling(layout_, sc, bz, Op::wtw_inv);
            x = mchol_.solve(bx + g_.transpose() * t);
            z = detail::apply_scaling(layout_, sc, g_ * x - bz, Op::wtw_inv);
        }
        const double rhs_scale = std::max(1.0, std::max(bx.cwiseAbs().maxCoeff(), bz.cwiseAbs().maxCoeff()));
        for (int r = 0; r < settings_.refinement; ++r) {
            RealVector res_x = g_.transpose() * z - bx;
            RealVector res_z = g_ * x - detail::apply_scaling(layout_, sc, z, Op::wtw) - bz;
            if (res_x.cwiseAbs().maxCoeff() + res_z.cwiseAbs().maxCoeff() < 1e-14 * rhs_scale) break;
            RealVector cx(n_), cz(m_);
            if (use_lu_) {
                RealVector rhs(n_ + m_);
                rhs.head(n_) = -res_x;
                rhs.tail(m_) = lu_scale_.asDiagonal() * (-res_z);
                RealVector sol = lu_.solve(rhs);
                cx = sol.head(n_);
                cz = lu_scale_.asDiagonal() * sol.tail(m_);
            } else {
                RealVector tt = detail::apply_scaling(layout_, sc, -res_z, Op::wtw_inv);
                cx = mchol_.solve(-res_x + g_.transpose() * tt);
                cz = detail::apply_scaling(layout_, sc, g_ * cx + res_z, Op::wtw_inv);
            }
            x += cx;
            z += cz;
        }
    }

    Report run() {
        Report rep;
        g_ = g0_;
        h_ = h0_;
        c_ = c0_;
        equilibrate();

        if (m_ == 0 || n_ == 0) {
            rep.status = Status::numerical_failure;
            return rep;
        }

        // initial point with identity scaling
        RealMatrix m0 = g_.transpose() * g_ + 1e-10 * RealMatrix::Identity(n_, n_);
        Eigen::LLT<RealMatrix> llt0(m0);
        if (llt0.info() != Eigen::Success) {
            rep.status = Status::numerical_failure;
            return rep;
        }
        RealVector e = layout_.identity();
        RealVector x = llt0.solve(g_.transpose() * h_);
        RealVector s = h_ - g_ * x;
        double nu = layout_.min_eig(s);
        if (nu < 1e-8) s += (1.0 + std::abs(nu)) * e;
        RealVector xd = llt0.solve(-c_);
        RealVector z = g_ * xd;
        nu = layout_.min_eig(z);
        if (nu < 1e-8) z += (1.0 + std::abs(nu)) * e;
        double tau = 1.0, kappa = 1.0;

        const double resx0 = std::max(1.0, c_.norm());
        const double resz0 = std::max(1.0, h_.norm());
        const int deg = layout_.degree + 1;

        RealVector x1(n_), z1(m_), x2(n_), z2(m_);

        // best iterate seen so far, by worst-normalized-criterion score
        RealVector bx_ = x, bs_ = s, bz_ = z;
        double btau_ = tau, bkappa_ = kappa;
        double best_score = std::numeric_limits<double>::infinity();
        double best_exit_score = std::numeric_limits<double>::infinity();
        int worse_streak = 0;

        for (int it = 0; it <= settings_.max_iter; ++it) {
            RealVector rx = g_.transpose() * z + c_ * tau;
            RealVector rz = g_ * x + s - h_ * tau;
            double cx = c_.dot(x), hz = h_.dot(z), sz = s.dot(z);
            double rt = kappa + cx + hz;

            double pcost = cx / tau, dcost = -hz / tau;
            double gap_n = sz / (tau * tau);
            double relgap = std::numeric_limits<double>::infinity();
            if (pcost < 0.0) relgap = gap_n / (-pcost);
            else if (dcost > 0.0) relgap = gap_n / dcost;
            double pres = rz.norm() / tau / resz0;
            double dres = rx.norm() / tau / resx0;

            rep.iterations = it;
            if (settings_.trace)
                std::fprintf(stderr, "it %3d pres %.3e dres %.3e gap %.3e relgap %.3e tau %.3e kappa %.3e\n",
                             it, pres, dres, gap_n, relgap, tau, kappa);

            double score = std::max({pres / settings_.feastol, dres / settings_.feastol,
                                     std::min(gap_n / settings_.abstol, relgap / settings_.reltol)});
            if (score < best_score) {
                best_score = score;
                bx_ = x;
                bs_ = s;
                bz_ = z;
                btau_ = tau;
                bkappa_ = kappa;
                rep.primal_residual = pres;
                rep.dual_residual = dres;
                rep.gap = gap_n * rho_c_ * rho_h_;
                rep.relative_gap = relgap;
            }

            if (score <= 1.0) {
                rep.status = Status::optimal;
                finalize(rep, x, s, z, tau);
                return rep;
            }
            // certificates of infeasibility from the homogeneous embedding
            double pinf = std::numeric_limits<double>::infinity();
            double dinf = std::numeric_limits<double>::infinity();
            if (hz < 0.0) {
                pinf = (g_.transpose() * z).norm() / resx0 / (-hz);
                if (pinf <= settings_.feastol) {
                    rep.status = Status::infeasible;
                    finalize_cert(rep, x, s, z, tau);
                    return rep;
                }
            }
            if (cx < 0.0) {
                dinf = (g_ * x + s).norm() / resz0 / (-cx);
                if (dinf <= settings_.feastol) {
                    rep.status = Status::unbounded;
                    finalize_cert(rep, x, s, z, tau);
                    return rep;
                }
            }
            // progress on any of the three exit criteria resets the stall count
            double exit_score =
                std::min({score, pinf / settings_.feastol, dinf / settings_.feastol});
            if (exit_score < best_exit_score * (1.0 - 1e-3)) {
                best_exit_score = exit_score;
                worse_streak = 0;
            } else {
                ++worse_streak;
            }
            if (it == settings_.max_iter || worse_streak >= 12) break;

            auto sc_opt = detail::compute_scaling(layout_, s, z);
            if (!sc_opt) break;
            const Scaling& sc = *sc_opt;
            if (!factor_normal(sc)) break;

            solve_kkt(sc, -c_, h_, x1, z1);
            double denom = c_.dot(x1) + h_.dot(z1) - kappa / tau;
            if (std::abs(denom) < 1e-300) break;

            double mu = (sz + tau * kappa) / deg;

            // affine (predictor) direction
            RealVector lam_div = -sc.lambda;  // lambda \ (-lambda o lambda)
            RealVector bx = -rx;
            RealVector bz = -rz - detail::apply_scaling(layout_, sc, lam_div, Op::wt);
            double dkap_rhs = -tau * kappa;
            double bt = -rt - dkap_rhs / tau;
            solve_kkt(sc, bx, bz, x2, z2);
            double dtau = (bt - c_.dot(x2) - h_.dot(z2)) / denom;
            RealVector dx = x2 + dtau * x1;
            RealVector dz = z2 + dtau * z1;
            RealVector dz_sc = detail::apply_scaling(layout_, sc, dz, Op::w);
            RealVector ds_sc = lam_div - dz_sc;
            double dkap = (dkap_rhs - kappa * dtau) / tau;

            double astep = std::min({detail::max_step(layout_, sc, ds_sc),
                                     detail::max_step(layout_, sc, dz_sc),
                                     dtau < 0 ? -tau / dtau : std::numeric_limits<double>::infinity(),
                                     dkap < 0 ? -kappa / dkap : std::numeric_limits<double>::infinity()});
            double alpha_aff = std::min(1.0, astep);
            double sigma = std::pow(1.0 - alpha_aff, 3.0);
            sigma = std::clamp(sigma, 0.0, 1.0);

            // combined (corrector) direction
            RealVector corr = detail::jordan_prod(layout_, ds_sc, dz_sc);
            RealVector ds_target = -detail::jordan_prod(layout_, sc.lambda, sc.lambda) - corr;
            RealVector eye = layout_.identity();
            ds_target += sigma * mu * eye;
            double dkap_t = sigma * mu - tau * kappa - dtau * dkap;

            lam_div = detail::jordan_div(layout_, sc, ds_target);
            bx = -(1.0 - sigma) * rx;
            bz = -(1.0 - sigma) * rz - detail::apply_scaling(layout_, sc, lam_div, Op::wt);
            bt = -(1.0 - sigma) * rt - dkap_t / tau;
            solve_kkt(sc, bx, bz, x2, z2);
            dtau = (bt - c_.dot(x2) - h_.dot(z2)) / denom;
            dx = x2 + dtau * x1;
            dz = z2 + dtau * z1;
            dz_sc = detail::apply_scaling(layout_, sc, dz, Op::w);
            ds_sc = lam_div - dz_sc;
            RealVector ds = detail::apply_scaling(layout_, sc, ds_sc, Op::wt);
            dkap = (dkap_t - kappa * dtau) / tau;

            astep = std::min({detail::max_step(layout_, sc, ds_sc),
                              detail::max_step(layout_, sc, dz_sc),
                              dtau < 0 ? -tau / dtau : std::numeric_limits<double>::infinity(),
                              dkap < 0 ? -kappa / dkap : std::numeric_limits<double>::infinity()});
            double step = std::min(1.0, settings_.step_fraction * astep);
            if (!(step > 1e-10)) break;

            x += step * dx;
            s += step * ds;
            z += step * dz;
            tau += step * dtau;
            kappa += step * dkap;
            if (!(tau > 0.0) || !(kappa > 0.0)) break;
        }

        rep.status = Status::numerical_failure;
        finalize(rep, bx_, bs_, bz_, btau_);
        return rep;
    }

    void finalize(Report& rep, const RealVector& x, const RealVector& s, const RealVector& z, double tau) {
        rep.x = rho_h_ * (dcol_.asDiagonal() * (x / tau));
        RealVector ss = rho_h_ * (s / tau), zz = rho_c_ * (z / tau);
        unscale_cone(ss, zz);
        rep.s = ss;
        rep.z = zz;
        rep.objective = rho_c_ * rho_h_ * c_.dot(x) / tau;
    }

    void finalize_cert(Report& rep, const RealVector& x, const RealVector& s, const RealVector& z, double) {
        rep.x = rho_h_ * (dcol_.asDiagonal() * x);
        RealVector ss = rho_h_ * s, zz = rho_c_ * z;
        unscale_cone(ss, zz);
        rep.s = ss;
        rep.z = zz;
        rep.objective = std::numeric_limits<double>::quiet_NaN();
    }

    // rows were scaled by erow_, so s_orig = s~ / erow and z_orig = erow * z~
    void unscale_cone(RealVector& s, RealVector& z) const {
        for (int r = 0; r < m_; ++r) {
            s(r) /= erow_(r);
            z(r) *= erow_(r);
        }
    }
};

inline Report solve(Problem& p, SolverSettings st = {}) { return Solver(p, st).solve(); }

}  // namespace secswipt::conic
