// SPDX-License-Identifier: Apache-2.0
//
// Sequential parametric convex approximation core shared by the perfect-CSI
// and robust designers: the quadratic-over-linear Taylor surrogate, the
// all-SOC subproblem builder, and the outer iteration with an elastic
// feasibility-repair phase.

#pragma once

#include <secswipt/design.hpp>
#include <secswipt/solver.hpp>
#include <secswipt/verify.hpp>

#include <optional>

namespace secswipt {

/// First-order surrogate of f(w,t) = w^H A w / (t - a) at (wt, tt):
/// F = 2 Re{wt^H A w}/(tt-a) - (wt^H A wt)(t-a)/(tt-a)^2.
/// Global under-estimator of f when A >= 0 and t > a.
inline double taylor_qol(const ComplexMatrix& a_mat, double a, const ComplexVector& w, double t,
                         const ComplexVector& wt, double tt) {
    if (!(tt > a)) throw std::domain_error("taylor_qol: expansion point must satisfy t~ > a");
    double lin = 2.0 * (wt.adjoint() * a_mat * w)(0).real() / (tt - a);
    double anchor = (wt.adjoint() * a_mat * wt)(0).real();
    return lin - anchor * (t - a) / ((tt - a) * (tt - a));
}

struct SpcaState {
    ComplexVector q_anchor, w_anchor;
    double r1_anchor = 2.0;  // rate product slack, > 1 (r3 in the robust form)
    double r2_anchor = 0.5;  // eavesdropper slack, in (0,1]  (r4 robust)
    std::vector<double> rho;
    std::vector<double> history;  // objective tr(Q) per iteration
};

struct DesignOptions {
    bool an_enabled = true;
    std::optional<double> fixed_rho;
    int grid_size = 100;
    double refine_rel_width = 1e-3;
    double spca_tol = 1e-4;
    int spca_max_iter = 50;
    int workers = 0;  // 0: use hardware concurrency
    conic::SolverSettings solver{
        .feastol = 1e-7, .abstol = 1e-12, .reltol = 5e-7, .max_iter = 200, .refinement = 2};
    // the SPCA subproblems tolerate a slightly looser solve: iterates are
    // re-anchored every round and the final design is verified exactly
    conic::SolverSettings spca_solver{
        .feastol = 4e-7, .abstol = 1e-12, .reltol = 1e-6, .max_iter = 200, .refinement = 2};
};

namespace detail_spca {

/// Matrices defining one SPCA family. The perfect-CSI problem uses the plain
/// channel Grams; the robust problem the shifted ones from the norm bounds.
struct SpcaMatrices {
    // per CR: Gram on the AN (maximized) side, Gram inside the Taylor term,
    // and a thin factor F with F F^H equal to the AN-side Gram
    std::vector<ComplexMatrix> cr_gram_lhs, cr_gram_taylor;
    std::vector<ComplexMatrix> cr_factor;
    // per ER: same roles for the q/w quadratics of the eavesdropper-rate SOC
    std::vector<ComplexMatrix> er_gram_lhs, er_gram_taylor;
    std::vector<ComplexMatrix> er_factor;
    // per CR / ER: Gram used in the linearized harvested-power rows
    std::vector<ComplexMatrix> cr_gram_eh, er_gram_eh;
    bool clamped = false;  // a shifted Gram had to be projected to PSD
};

/// Thin factor F (n x r) with F F^H = M for Hermitian PSD M.
inline ComplexMatrix psd_factor(const ComplexMatrix& m) {
    EighResult e = eigh(m);
    double lmax = std::max(e.values(0), 0.0);
    int r = 0;
    for (int i = 0; i < e.values.size(); ++i)
        if (e.values(i) > std::max(1e-14 * lmax, 0.0)) ++r;
    ComplexMatrix f(m.rows(), std::max(r, 1));
    f.setZero();
    for (int i = 0; i < r; ++i) f.col(i) = std::sqrt(e.values(i)) * e.vectors.col(i);
    return f;
}

/// PSD part (negative eigenvalues dropped); sets *changed when it moved.
inline ComplexMatrix clamp_psd(const ComplexMatrix& m, bool* changed) {
    EighResult e = eigh(m);
    if (e.values(e.values.size() - 1) >= -1e-14 * std::max(1.0, std::abs(e.values(0)))) return m;
    ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
    for (int i = 0; i < e.values.size(); ++i)
        if (e.values(i) > 0.0) out += e.values(i) * e.vectors.col(i) * e.vectors.col(i).adjoint();
    if (changed) *changed = true;
    return out;
}

inline SpcaMatrices perfect_matrices(const Scenario& s, const std::vector<ComplexVector>& h_c,
                                     const std::vector<ComplexMatrix>& h_e) {
    SpcaMatrices m;
    for (int l = 0; l < s.L; ++l) {
        ComplexMatrix gram = h_c[l] * h_c[l].adjoint();
        m.cr_gram_lhs.push_back(gram);
        m.cr_gram_taylor.push_back(gram);
        m.cr_factor.push_back(h_c[l]);
        m.cr_gram_eh.push_back(gram);
    }
    for (int k = 0; k < s.K; ++k) {
        ComplexMatrix gram = h_e[k] * h_e[k].adjoint();
        m.er_gram_lhs.push_back(gram);
        m.er_gram_taylor.push_back(gram);
        m.er_factor.push_back(h_e[k]);
        m.er_gram_eh.push_back(gram);
    }
    return m;
}

struct Subproblem {
    conic::Problem problem;
    conic::ComplexVecVar q, w;
    std::vector<int> rho, u, v;
    int r1 = -1, r2 = -1, obj = -1, elastic = -1;
    // internal variable scalings: the solver sees q/q_scale, (r1-1)/r1_scale
    double q_scale = 1.0, w_scale = 1.0, r1_scale = 1.0;

    ComplexVector q_value(const RealVector& x) const { return q_scale * q.value(x); }
    ComplexVector w_value(const RealVector& x) const { return w_scale * w.value(x); }
    double r1_value(const RealVector& x) const { return 1.0 + r1_scale * x(r1); }
    double r2_value(const RealVector& x) const { return x(r2); }
};

/// Build the all-SOC subproblem around the state's anchors. The beam, AN and
/// rate-slack variables are normalized by their anchor magnitudes so each
/// subproblem is solved at unit scale regardless of how far the outer
/// iteration still has to travel. With an elastic variable every constraint
/// is relaxed by it and the objective becomes the violation (repair phase).
inline Subproblem build_subproblem(const Scenario& s, const SpcaMatrices& mats, const SpcaState& st,
                                   const DesignOptions& opts, bool elastic_phase) {
    using conic::LinExpr;
    if (!(st.r1_anchor > 1.0)) throw std::invalid_argument("spca: anchor r1 must exceed 1");
    if (!(st.r2_anchor > 0.0 && st.r2_anchor <= 1.0))
        throw std::invalid_argument("spca: anchor r2 must lie in (0,1]");

    Subproblem sp;
    auto& p = sp.problem;
    sp.q_scale = std::max(st.q_anchor.norm(), 1e-6 * std::sqrt(s.P));
    sp.w_scale = opts.an_enabled ? std::max(st.w_anchor.norm(), 1e-4 * std::sqrt(s.P)) : 1.0;
    sp.r1_scale = st.r1_anchor - 1.0;
    sp.q = p.add_cvec_var(s.N_T);
    if (opts.an_enabled) sp.w = p.add_cvec_var(s.N_T);
    sp.r1 = p.add_var();  // holds (r1 - 1)/r1_scale; 1 at the anchor
    sp.r2 = p.add_var();
    sp.obj = p.add_var();  // holds ||q|| / q_scale
    const bool free_rho = !opts.fixed_rho.has_value();
    sp.rho.assign(s.L, -1);
    sp.u.assign(s.L, -1);
    sp.v.assign(s.L, -1);
    const double rho_fixed = opts.fixed_rho.value_or(0.5);
    for (int l = 0; l < s.L; ++l) {
        if (!free_rho) continue;
        sp.rho[l] = p.add_var();
        sp.u[l] = p.add_var();
        if (s.E_bar_c[l] > 0.0) sp.v[l] = p.add_var();
    }
    LinExpr viol;  // elastic slack, zero in the normal phase
    if (elastic_phase) {
        sp.elastic = p.add_var();
        viol = LinExpr::variable(sp.elastic);
        p.objective_add(sp.elastic, 1.0);
        p.objective_add(sp.obj, 1e-4);  // lean tie-break among zero-violation points
        p.add_nonneg(viol, "elastic_lb");
    } else {
        p.objective_add(sp.obj, 1.0);
    }

    auto u_term = [&](int l) {
        return free_rho ? LinExpr::variable(sp.u[l]) : LinExpr(1.0 / rho_fixed);
    };
    auto v_term = [&](int l) {
        return free_rho ? LinExpr::variable(sp.v[l]) : LinExpr(1.0 / (1.0 - rho_fixed));
    };
    // expressions against the true (unscaled) q and w
    auto q_inner_re = [&](const ComplexVector& a) { return sp.q.inner_re(sp.q_scale * a); };
    auto q_inner_im = [&](const ComplexVector& a) { return sp.q.inner_im(sp.q_scale * a); };
    auto w_inner_re = [&](const ComplexVector& a) {
        return opts.an_enabled ? sp.w.inner_re(sp.w_scale * a) : LinExpr(0.0);
    };
    auto w_inner_im = [&](const ComplexVector& a) {
        return opts.an_enabled ? sp.w.inner_im(sp.w_scale * a) : LinExpr(0.0);
    };
    auto r1_expr = [&]() {  // true r1 = 1 + r1_scale * r1hat
        return LinExpr(1.0) + LinExpr::variable(sp.r1, sp.r1_scale);
    };

    for (int l = 0; l < s.L; ++l) {
        // rate product r1 r2 >= 2^{R}: || [sqrt(2^{R+2}), r1-r2] || <= r1+r2
        std::vector<LinExpr> prod;
        prod.push_back(r1_expr() + LinExpr::variable(sp.r2) + viol);
        prod.push_back(LinExpr(std::sqrt(std::exp2(s.R_bar[l] + 2.0))));
        prod.push_back(r1_expr() - LinExpr::variable(sp.r2));
        p.add_soc(std::move(prod), "rate_prod_soc");

        // CR rate: sigma_c2 + w^H G w + sigma_p2/rho <= F_{T,1}(q, r1)
        const ComplexMatrix& taylor = mats.cr_gram_taylor[l];
        double denom = st.r1_anchor - 1.0;  // = r1_scale
        ComplexVector gq = taylor * st.q_anchor;
        double anchor_val = (st.q_anchor.adjoint() * taylor * st.q_anchor)(0).real();
        LinExpr f_expr =
            (2.0 / denom) * q_inner_re(gq) - LinExpr::variable(sp.r1, anchor_val / denom);
        LinExpr g1 = f_expr - LinExpr(s.sigma_c2[l]) - s.sigma_p2[l] * u_term(l);
        const ComplexMatrix& fac = mats.cr_factor[l];
        std::vector<LinExpr> soc;
        soc.push_back(g1 + LinExpr(1.0) + viol);
        for (int c = 0; c < fac.cols(); ++c) {
            ComplexVector col = fac.col(c);
            soc.push_back(2.0 * w_inner_re(col));
            soc.push_back(2.0 * w_inner_im(col));
        }
        soc.push_back(g1 - LinExpr(1.0));
        p.add_soc(std::move(soc), "cr_rate_soc");
    }

    for (int k = 0; k < s.K; ++k) {
        // eavesdropper rate slack via the trace surrogate:
        // sigma^2 + w^H G w + q^H G q <= sigma^2(2/r2~ - r2/r2~^2) + F_{T,0}(w, r2)
        const double se2 = s.sigma_e2[k];
        const ComplexMatrix& taylor = mats.er_gram_taylor[k];
        double ra = st.r2_anchor;
        ComplexVector gw = taylor * st.w_anchor;
        double anchor_val = (st.w_anchor.adjoint() * taylor * st.w_anchor)(0).real();
        LinExpr f_expr = opts.an_enabled ? (2.0 / ra) * w_inner_re(gw) -
                                               (anchor_val / (ra * ra)) * LinExpr::variable(sp.r2)
                                         : LinExpr(0.0);
        LinExpr g2 = LinExpr(2.0 * se2 / ra) - (se2 / (ra * ra)) * LinExpr::variable(sp.r2) + f_expr -
                     LinExpr(se2);
        const ComplexMatrix& fac = mats.er_factor[k];
        std::vector<LinExpr> soc;
        soc.push_back(g2 + LinExpr(1.0) + viol);
        for (int c = 0; c < fac.cols(); ++c) {
            ComplexVector col = fac.col(c);
            soc.push_back(2.0 * w_inner_re(col));
            soc.push_back(2.0 * w_inner_im(col));
            soc.push_back(2.0 * q_inner_re(col));
            soc.push_back(2.0 * q_inner_im(col));
        }
        soc.push_back(g2 - LinExpr(1.0));
        p.add_soc(std::move(soc), "er_rate_soc");
    }

    // linearized harvested-power rows
    for (int l = 0; l < s.L; ++l) {
        if (!(s.E_bar_c[l] > 0.0)) continue;
        const ComplexMatrix& m = mats.cr_gram_eh[l];
        double cq = (st.q_anchor.adjoint() * m * st.q_anchor)(0).real();
        double cw = opts.an_enabled ? (st.w_anchor.adjoint() * m * st.w_anchor)(0).real() : 0.0;
        LinExpr row = LinExpr(-cq - cw + s.sigma_c2[l]) + 2.0 * q_inner_re(m * st.q_anchor) +
                      2.0 * w_inner_re(m * st.w_anchor) - (s.E_bar_c[l] / s.eta_c[l]) * v_term(l) + viol;
        p.add_nonneg(std::move(row), "cr_eh_row");
    }
    for (int k = 0; k < s.K; ++k) {
        if (!(s.E_bar_e[k] > 0.0)) continue;
        const ComplexMatrix& m = mats.er_gram_eh[k];
        double cq = (st.q_anchor.adjoint() * m * st.q_anchor)(0).real();
        double cw = opts.an_enabled ? (st.w_anchor.adjoint() * m * st.w_anchor)(0).real() : 0.0;
        LinExpr row = LinExpr(-cq - cw + s.N_R * s.sigma_e2[k] - s.E_bar_e[k] / s.eta_e[k]) +
                      2.0 * q_inner_re(m * st.q_anchor) + 2.0 * w_inner_re(m * st.w_anchor) + viol;
        p.add_nonneg(std::move(row), "er_eh_row");
    }

    // total power: || [q; w] || <= sqrt(P)
    {
        std::vector<LinExpr> soc;
        soc.push_back(LinExpr(std::sqrt(s.P)) + viol);
        for (int i = 0; i < s.N_T; ++i) {
            soc.push_back(LinExpr::variable(sp.q.re(i), sp.q_scale));
            soc.push_back(LinExpr::variable(sp.q.im(i), sp.q_scale));
        }
        if (opts.an_enabled)
            for (int i = 0; i < s.N_T; ++i) {
                soc.push_back(LinExpr::variable(sp.w.re(i), sp.w_scale));
                soc.push_back(LinExpr::variable(sp.w.im(i), sp.w_scale));
            }
        p.add_soc(std::move(soc), "power_soc");
    }

    // objective epigraph || q || <= q_scale * obj (obj and q-hat share scale)
    {
        std::vector<LinExpr> soc;
        soc.push_back(LinExpr::variable(sp.obj));
        for (int i = 0; i < s.N_T; ++i) {
            soc.push_back(LinExpr::variable(sp.q.re(i)));
            soc.push_back(LinExpr::variable(sp.q.im(i)));
        }
        p.add_soc(std::move(soc), "objective_soc");
    }

    if (free_rho)
        for (int l = 0; l < s.L; ++l) {
            p.add_rotated_soc(LinExpr::variable(sp.u[l]), LinExpr::variable(sp.rho[l]), LinExpr(1.0),
                              "rho_inv_cone");
            if (sp.v[l] >= 0)
                p.add_rotated_soc(LinExpr::variable(sp.v[l]), LinExpr(1.0) - LinExpr::variable(sp.rho[l]),
                                  LinExpr(1.0), "rho_comp_cone");
            p.add_nonneg(LinExpr::variable(sp.rho[l]) - LinExpr(1e-6), "rho_lb");
            p.add_nonneg(LinExpr(1.0 - 1e-6) - LinExpr::variable(sp.rho[l]), "rho_ub");
        }

    p.add_nonneg(LinExpr::variable(sp.r1, sp.r1_scale) - LinExpr(1e-9) + viol, "r1_lb");
    p.add_nonneg(LinExpr::variable(sp.r2) - LinExpr(1e-9) + viol, "r2_lb");
    p.add_nonneg(LinExpr(1.0) - LinExpr::variable(sp.r2) + viol, "r2_ub");
    return sp;
}

/// Anchor slacks consistent with the subproblem surrogates, so that a
/// feasible anchor stays feasible for its own subproblem.
inline void refresh_anchor_slacks(const Scenario& s, const SpcaMatrices& mats, SpcaState& st,
                                  const DesignOptions& opts) {
    double r1 = std::numeric_limits<double>::infinity();
    for (int l = 0; l < s.L; ++l) {
        double sig = (st.q_anchor.adjoint() * mats.cr_gram_taylor[l] * st.q_anchor)(0).real();
        double jam = (st.w_anchor.adjoint() * mats.cr_gram_lhs[l] * st.w_anchor)(0).real();
        double rho = st.rho[l];
        double denom = s.sigma_c2[l] + jam + s.sigma_p2[l] / rho;
        r1 = std::min(r1, 1.0 + std::max(sig, 0.0) / denom);
    }
    st.r1_anchor = std::clamp(r1, 1.0 + 1e-6, 1e9);
    double r2 = 1.0;
    for (int k = 0; k < s.K; ++k) {
        double num = s.sigma_e2[k] + (st.w_anchor.adjoint() * mats.er_gram_taylor[k] * st.w_anchor)(0).real();
        double den = s.sigma_e2[k] + (st.w_anchor.adjoint() * mats.er_gram_lhs[k] * st.w_anchor)(0).real() +
                     (st.q_anchor.adjoint() * mats.er_gram_lhs[k] * st.q_anchor)(0).real();
        if (den > 0.0) r2 = std::min(r2, num / den);
    }
    st.r2_anchor = std::clamp(r2, 1e-6, 1.0);
}

/// Deterministic starting point: MRT toward the strongest CR, AN isotropic
/// in the orthogonal complement of the CR span at half power. The MRT power
/// is sized from the rate and CR-harvesting needs rather than pinned to P/2:
/// anchoring far above the optimum puts the Taylor expansion so far out that
/// the subproblem degenerates in double precision, and the AN cannot feed
/// the CR harvesters from the null space, so q must carry their target.
inline SpcaState initial_state(const Scenario& s, const SpcaMatrices& mats,
                               const std::vector<ComplexVector>& h_c, const DesignOptions& opts) {
    SpcaState st;
    int best = 0;
    for (int l = 1; l < s.L; ++l)
        if (h_c[l].norm() > h_c[best].norm()) best = l;
    ComplexVector dir = h_c[best] / h_c[best].norm();
    const double rho0 = opts.fixed_rho.value_or(0.5);
    double p_need = s.P * 1e-9;
    for (int l = 0; l < s.L; ++l) {
        double gain = std::norm(h_c[l].dot(dir));
        if (gain < 1e-12 * h_c[l].squaredNorm()) continue;  // repair phase covers this CR
        double rate = (std::exp2(s.R_bar[l]) - 1.0) * (s.sigma_c2[l] + s.sigma_p2[l] / rho0) / gain;
        p_need = std::max(p_need, 4.0 * rate);
        if (s.E_bar_c[l] > 0.0) {
            double eh = (s.E_bar_c[l] / s.eta_c[l] / (1.0 - rho0) - s.sigma_c2[l]) / gain;
            p_need = std::max(p_need, 1.1 * eh);
        }
    }
    st.q_anchor = std::sqrt(std::min(s.P / 2.0, p_need)) * dir;

    st.w_anchor = ComplexVector::Zero(s.N_T);
    if (opts.an_enabled) {
        ComplexMatrix u(s.N_T, s.L);
        for (int l = 0; l < s.L; ++l) u.col(l) = h_c[l];
        // projector onto the complement of span{h_c}
        Eigen::JacobiSVD<ComplexMatrix> svd(u, Eigen::ComputeFullU);
        int rank = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-12 * svd.singularValues()(0)) ++rank;
        ComplexVector dir = ComplexVector::Zero(s.N_T);
        if (rank < s.N_T) {
            dir = svd.matrixU().col(s.N_T - 1);
        } else {
            ComplexMatrix acc = ComplexMatrix::Zero(s.N_T, s.N_T);
            for (int l = 0; l < s.L; ++l) acc += h_c[l] * h_c[l].adjoint();
            EighResult e = eigh(acc);
            dir = e.vectors.col(s.N_T - 1);  // least-dominant direction
        }
        st.w_anchor = std::sqrt(s.P / 2.0) * dir;
    }
    st.rho.assign(s.L, opts.fixed_rho.value_or(0.5));
    refresh_anchor_slacks(s, mats, st, opts);
    return st;
}

struct SpcaOutcome {
    conic::Status status = conic::Status::numerical_failure;
    SpcaState state;
    int iterations = 0;
    int solves = 0;
    bool clamped = false;
};

/// Worst violation of the true (anchor-exact) constraints at the anchor.
/// The anchor slacks are tight by construction, so only the rate product,
/// power budget and harvested-power rows can be violated.
inline double anchor_violation(const Scenario& s, const SpcaMatrices& mats, const SpcaState& st,
                               const DesignOptions& opts) {
    double v = st.q_anchor.squaredNorm() + st.w_anchor.squaredNorm() - s.P;
    for (int l = 0; l < s.L; ++l)
        v = std::max(v, std::exp2(s.R_bar[l]) - st.r1_anchor * st.r2_anchor);
    for (int l = 0; l < s.L; ++l) {
        if (!(s.E_bar_c[l] > 0.0)) continue;
        const ComplexMatrix& m = mats.cr_gram_eh[l];
        double got = (st.q_anchor.adjoint() * m * st.q_anchor)(0).real() +
                     (st.w_anchor.adjoint() * m * st.w_anchor)(0).real() + s.sigma_c2[l];
        v = std::max(v, s.E_bar_c[l] / s.eta_c[l] / (1.0 - st.rho[l]) - got);
    }
    for (int k = 0; k < s.K; ++k) {
        if (!(s.E_bar_e[k] > 0.0)) continue;
        const ComplexMatrix& m = mats.er_gram_eh[k];
        double got = (st.q_anchor.adjoint() * m * st.q_anchor)(0).real() +
                     (st.w_anchor.adjoint() * m * st.w_anchor)(0).real() + s.N_R * s.sigma_e2[k];
        v = std::max(v, s.E_bar_e[k] / s.eta_e[k] - got);
    }
    return v;
}

inline SpcaOutcome run_spca(const Scenario& s, const SpcaMatrices& mats,
                            const std::vector<ComplexVector>& h_c, const DesignOptions& opts) {
    SpcaOutcome out;
    out.clamped = mats.clamped;
    SpcaState st = initial_state(s, mats, h_c, opts);

    auto pull = [&](const Subproblem& sp, const conic::Report& rep) {
        st.q_anchor = sp.q_value(rep.x);
        if (opts.an_enabled) st.w_anchor = sp.w_value(rep.x);
        if (!opts.fixed_rho)
            for (int l = 0; l < s.L; ++l)
                st.rho[l] = std::clamp(rep.x(sp.rho[l]), 1e-6, 1.0 - 1e-6);
        st.r1_anchor = std::max(sp.r1_value(rep.x), 1.0 + 1e-9);
        st.r2_anchor = std::clamp(sp.r2_value(rep.x), 1e-9, 1.0);
    };

    // a failed subproblem solve is retried once at looser tolerances; the
    // outer loop guards monotonicity, so a loose iterate cannot regress
    auto sub_solve = [&](conic::Problem& prob) {
        conic::Report rep = conic::solve(prob, opts.spca_solver);
        ++out.solves;
        if (!rep.ok()) {
            conic::SolverSettings loose = opts.spca_solver;
            loose.feastol = 1e-6;
            loose.abstol = 1e-10;
            loose.reltol = 1e-5;
            rep = conic::solve(prob, loose);
            ++out.solves;
        }
        return rep;
    };

    // repair phase (skipped when the start is already feasible): minimize the
    // common violation until an anchor satisfies the true constraints
    bool feasible_anchor = anchor_violation(s, mats, st, opts) <= 1e-12;
    for (int round = 0; round < 6 && !feasible_anchor; ++round) {
        Subproblem sp = build_subproblem(s, mats, st, opts, true);
        conic::Report rep = sub_solve(sp.problem);
        if (!rep.ok()) return out;
        double v = rep.x(sp.elastic);
        pull(sp, rep);
        refresh_anchor_slacks(s, mats, st, opts);
        if (v <= 1e-9 && anchor_violation(s, mats, st, opts) <= 1e-9) feasible_anchor = true;
    }
    if (!feasible_anchor) {
        out.status = conic::Status::infeasible;
        return out;
    }

    double prev = std::numeric_limits<double>::infinity();
    SpcaState last_good = st;
    for (int it = 1; it <= opts.spca_max_iter; ++it) {
        Subproblem sp = build_subproblem(s, mats, st, opts, false);
        conic::Report rep = sub_solve(sp.problem);
        if (!rep.ok()) {
            if (st.history.empty()) {
                out.status = rep.status;
                return out;
            }
            break;  // keep the last feasible iterate
        }
        last_good = st;
        pull(sp, rep);
        double obj = st.q_anchor.squaredNorm();
        if (!st.history.empty() && obj > st.history.back() * (1.0 + 1e-9) + 1e-15) {
            st = last_good;  // numerical regression; stop at the better point
            break;
        }
        st.history.push_back(obj);
        out.iterations = it;
        if (it >= 2 && std::abs(prev - obj) <= opts.spca_tol * std::max(prev, 1e-12)) break;
        prev = obj;
    }
    if (st.history.empty()) return out;
    out.state = std::move(st);
    out.status = conic::Status::optimal;
    return out;
}

}  // namespace detail_spca

}  // namespace secswipt
