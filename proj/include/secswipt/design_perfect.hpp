// SPDX-License-Identifier: Apache-2.0
//
// Perfect-CSI power-minimization designers: the semidefinite relaxation of
// the inner problem with a one-dimensional line search over the
// eavesdropper-rate slack t, and the low-complexity SPCA/SOCP iteration.

#pragma once

#include <secswipt/design_spca.hpp>
#include <secswipt/parallel.hpp>

#include <mutex>

namespace secswipt {

/// Line-search interval: t_max = 1, t_min = min_l (1 + P ||h_l||^2 /
/// (sigma_c2 + sigma_p2))^{-1}.
inline std::pair<double, double> t_bounds(const Scenario& s, const std::vector<ComplexVector>& h_c) {
    double tmin = 1.0;
    for (size_t l = 0; l < h_c.size(); ++l) {
        double v = 1.0 / (1.0 + s.P * h_c[l].squaredNorm() / (s.sigma_c2[l] + s.sigma_p2[l]));
        tmin = std::min(tmin, v);
    }
    return {tmin, 1.0};
}

struct InnerSdp {
    conic::Problem problem;
    conic::HermitianVar Q, W;
    std::vector<int> rho, u, v;  // -1 when absent
    std::vector<conic::BlockRef> rate_rows, cr_eh_rows, er_eh_rows, eve_lmis;
    conic::BlockRef power_row, q_psd, w_psd;
    int table_n = 0;  // decision-variable count in the Table-I convention
};

/// Inner SDP at fixed slack t (the semidefinite relaxation: the rank-one
/// constraint is dropped). The splitting ratio enters through epigraph
/// variables u >= 1/rho and v >= 1/(1-rho), both exact at binding optima.
inline InnerSdp build_inner_sdp(const Scenario& s, const std::vector<ComplexVector>& h_c,
                                const std::vector<ComplexMatrix>& h_e, double t,
                                const DesignOptions& opts = {}) {
    using conic::LinExpr;
    using conic::MatExpr;
    if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("build_inner_sdp: t must lie in (0,1]");

    InnerSdp b;
    auto& p = b.problem;
    b.Q = p.add_hermitian_var(s.N_T);
    if (opts.an_enabled) b.W = p.add_hermitian_var(s.N_T);
    const bool free_rho = !opts.fixed_rho.has_value();
    const double rho_fixed = opts.fixed_rho.value_or(0.5);
    b.rho.assign(s.L, -1);
    b.u.assign(s.L, -1);
    b.v.assign(s.L, -1);
    if (free_rho)
        for (int l = 0; l < s.L; ++l) {
            b.rho[l] = p.add_var();
            b.u[l] = p.add_var();
            if (s.E_bar_c[l] > 0.0) b.v[l] = p.add_var();
        }
    p.objective_add(b.Q.trace_expr());
    b.table_n = 2 * s.N_T * s.N_T + s.L;

    MatExpr q_expr = b.Q.expr();
    MatExpr w_expr = opts.an_enabled ? b.W.expr() : MatExpr::zero(s.N_T, s.N_T);

    for (int l = 0; l < s.L; ++l) {
        const ComplexVector& h = h_c[l];
        const double gap = std::exp2(s.R_bar[l]) - t;  // 2^R - t >= 0 for t <= 1
        LinExpr u_term = free_rho ? LinExpr::variable(b.u[l]) : LinExpr(1.0 / rho_fixed);
        LinExpr row = t * q_expr.quad_form(h) - gap * w_expr.quad_form(h) - LinExpr(gap * s.sigma_c2[l]) -
                      gap * s.sigma_p2[l] * u_term;
        b.rate_rows.push_back(p.add_nonneg(std::move(row), "secrecy_row"));
    }

    for (int k = 0; k < s.K; ++k) {
        const double inv = 1.0 / t - 1.0;
        MatExpr lmi = inv * w_expr.congruence(h_e[k]) +
                      MatExpr::constant_term(inv * s.sigma_e2[k] *
                                             ComplexMatrix::Identity(s.N_R, s.N_R)) +
                      (-1.0) * q_expr.congruence(h_e[k]);
        b.eve_lmis.push_back(p.add_hermitian_psd(lmi, "eve_lmi"));
    }

    {
        LinExpr row = LinExpr(s.P) - b.Q.trace_expr();
        if (opts.an_enabled) row -= b.W.trace_expr();
        b.power_row = p.add_nonneg(std::move(row), "power_row");
    }

    for (int l = 0; l < s.L; ++l) {
        if (!(s.E_bar_c[l] > 0.0)) continue;
        LinExpr v_term = free_rho ? LinExpr::variable(b.v[l]) : LinExpr(1.0 / (1.0 - rho_fixed));
        LinExpr row = (q_expr + w_expr).quad_form(h_c[l]) + LinExpr(s.sigma_c2[l]) -
                      (s.E_bar_c[l] / s.eta_c[l]) * v_term;
        b.cr_eh_rows.push_back(p.add_nonneg(std::move(row), "cr_eh_row"));
    }
    for (int k = 0; k < s.K; ++k) {
        if (!(s.E_bar_e[k] > 0.0)) continue;
        LinExpr row = (q_expr + w_expr).congruence(h_e[k]).trace() +
                      LinExpr(s.N_R * s.sigma_e2[k] - s.E_bar_e[k] / s.eta_e[k]);
        b.er_eh_rows.push_back(p.add_nonneg(std::move(row), "er_eh_row"));
    }

    b.q_psd = p.add_hermitian_psd(q_expr, "q_psd");
    if (opts.an_enabled) b.w_psd = p.add_hermitian_psd(w_expr, "w_psd");

    if (free_rho)
        for (int l = 0; l < s.L; ++l) {
            p.add_rotated_soc(LinExpr::variable(b.u[l]), LinExpr::variable(b.rho[l]), LinExpr(1.0),
                              "rho_inv_cone");
            if (b.v[l] >= 0)
                p.add_rotated_soc(LinExpr::variable(b.v[l]), LinExpr(1.0) - LinExpr::variable(b.rho[l]),
                                  LinExpr(1.0), "rho_comp_cone");
            p.add_nonneg(LinExpr::variable(b.rho[l]) - LinExpr(1e-6), "rho_lb");
            p.add_nonneg(LinExpr(1.0 - 1e-6) - LinExpr::variable(b.rho[l]), "rho_ub");
        }
    return b;
}

namespace detail_1d {

template <typename Built>
struct SearchOutcome {
    conic::Status status = conic::Status::infeasible;
    double objective = std::numeric_limits<double>::infinity();
    double t_star = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> trace;  // f over the coarse grid
    int solves = 0;
    std::optional<std::pair<Built, conic::Report>> best;
};

/// Uniform grid over [tmin, tmax] followed by golden-section refinement
/// around the incumbent; infeasible points count as f(t) = +inf and the
/// incumbent never worsens.
template <typename BuildFn>
auto line_search(double tmin, double tmax, const DesignOptions& opts, BuildFn&& build)
    -> SearchOutcome<std::invoke_result_t<BuildFn, double>> {
    using Built = std::invoke_result_t<BuildFn, double>;
    SearchOutcome<Built> out;
    std::mutex m;

    auto eval = [&](double t) -> double {
        Built built = build(t);
        conic::Report rep = conic::solve(built.problem, opts.solver);
        std::lock_guard<std::mutex> g(m);
        ++out.solves;
        if (rep.status != conic::Status::optimal) return std::numeric_limits<double>::infinity();
        double obj = rep.objective;
        if (obj < out.objective) {
            out.objective = obj;
            out.t_star = t;
            out.best.emplace(std::move(built), std::move(rep));
        }
        return obj;
    };

    const int d = std::max(2, opts.grid_size);
    std::vector<double> grid(d);
    out.trace.resize(d);
    for (int i = 0; i < d; ++i) grid[i] = tmin + (tmax - tmin) * i / (d - 1);
    parallel_for(d, opts.workers, [&](int i) { out.trace[i] = eval(grid[i]); });

    int ibest = -1;
    for (int i = 0; i < d; ++i)
        if (std::isfinite(out.trace[i]) && (ibest < 0 || out.trace[i] < out.trace[ibest])) ibest = i;
    if (ibest < 0) return out;

    double lo = grid[std::max(0, ibest - 1)], hi = grid[std::min(d - 1, ibest + 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    const double width_target = opts.refine_rel_width * (tmax - tmin);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = eval(x1), f2 = eval(x2);
    int guard = 0;
    while (hi - lo > width_target && guard++ < 60) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = eval(x2);
        }
    }
    out.status = conic::Status::optimal;
    return out;
}

}  // namespace detail_1d

inline void attach_certificates(const Scenario& s, const std::vector<ComplexVector>& h_c,
                                const std::vector<ComplexMatrix>& h_e, DesignResult& r) {
    if (!r.feasible()) return;
    auto sec = secrecy_rate(s, r.design, h_c, h_e);
    r.min_secrecy_slack = std::numeric_limits<double>::infinity();
    for (int l = 0; l < s.L; ++l)
        r.min_secrecy_slack = std::min(r.min_secrecy_slack, sec.per_cr[l] - s.R_bar[l]);
    auto harv = harvested_power(s, r.design, h_c, h_e);
    r.min_eh_slack_cr = std::numeric_limits<double>::infinity();
    for (int l = 0; l < s.L; ++l)
        if (s.E_bar_c[l] > 0.0) r.min_eh_slack_cr = std::min(r.min_eh_slack_cr, harv.cr[l] - s.E_bar_c[l]);
    r.min_eh_slack_er = std::numeric_limits<double>::infinity();
    for (int k = 0; k < s.K; ++k)
        if (s.E_bar_e[k] > 0.0) r.min_eh_slack_er = std::min(r.min_eh_slack_er, harv.er[k] - s.E_bar_e[k]);
    r.power_slack = s.P - (r.design.Q + r.design.W).trace().real();
    if (r.design.Q.norm() > 0.0) r.rank_gap = rank_one_gap(r.design.Q);
    r.secrecy_shortfall = r.min_secrecy_slack < -1e-3;
}

namespace detail_1d {

struct SdpPayloadTag {};

inline DesignResult finish_from_inner(const Scenario& s, DesignResult res, InnerSdp built,
                                      conic::Report rep, const DesignOptions& opts,
                                      const std::vector<ComplexVector>& h_c,
                                      const std::vector<ComplexMatrix>& h_e) {
    BeamformingDesign d;
    d.Q = built.Q.value(rep.x);
    d.W = opts.an_enabled ? built.W.value(rep.x) : ComplexMatrix::Zero(s.N_T, s.N_T);
    d.rho.resize(s.L);
    for (int l = 0; l < s.L; ++l)
        d.rho[l] = opts.fixed_rho ? *opts.fixed_rho : std::clamp(rep.x(built.rho[l]), 1e-6, 1.0 - 1e-6);
    auto beam = extract_beamformer(d.Q);
    d.q = beam.q;
    d.rank_warning = beam.rank_warning;
    res.design = std::move(d);

    std::vector<double> xi, mu;
    for (auto ref : built.rate_rows) xi.push_back(conic::block_dual(built.problem, rep, ref)(0));
    for (auto ref : built.cr_eh_rows) mu.push_back(conic::block_dual(built.problem, rep, ref)(0));
    if (!xi.empty()) res.duals["xi_l"] = xi;
    if (!mu.empty()) res.duals["mu_l"] = mu;

    attach_certificates(s, h_c, h_e, res);
    return res;
}

}  // namespace detail_1d

/// PM with 1-D search (Sec. III-B scheme): evaluate the inner SDP over a
/// uniform grid on [t_min, 1], refine with golden section, return the best
/// design with the inner duals recorded at t*.
inline DesignResult solve_pm_1d(const Scenario& s, const ChannelSet& ch, const DesignOptions& opts = {}) {
    auto t0 = std::chrono::steady_clock::now();
    auto [tmin, tmax] = t_bounds(s, ch.h_c);
    auto out = detail_1d::line_search(tmin, tmax, opts,
                                      [&](double t) { return build_inner_sdp(s, ch.h_c, ch.H_e, t, opts); });
    DesignResult res;
    res.solves = out.solves;
    res.iterations = out.solves;
    res.objective_trace = std::move(out.trace);
    res.status = out.status;
    if (out.best) {
        res.objective = out.objective;
        res.t_star = out.t_star;
        res = detail_1d::finish_from_inner(s, std::move(res), std::move(out.best->first),
                                           std::move(out.best->second), opts, ch.h_c, ch.H_e);
    }
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/// Build one SPCA subproblem at the given state (exposed for inspection).
inline detail_spca::Subproblem build_spca_subproblem(const Scenario& s,
                                                     const std::vector<ComplexVector>& h_c,
                                                     const std::vector<ComplexMatrix>& h_e,
                                                     const SpcaState& st, const DesignOptions& opts = {}) {
    auto mats = detail_spca::perfect_matrices(s, h_c, h_e);
    return detail_spca::build_subproblem(s, mats, st, opts, false);
}

/// Low-complexity SPCA design (problem (16) analogue): iterate the all-SOC
/// subproblem until the objective settles. Returns a rank-one design by
/// construction (Q = q q^H, W = w w^H).
inline DesignResult solve_pm_spca(const Scenario& s, const ChannelSet& ch, const DesignOptions& opts = {}) {
    auto t0 = std::chrono::steady_clock::now();
    auto mats = detail_spca::perfect_matrices(s, ch.h_c, ch.H_e);
    auto out = detail_spca::run_spca(s, mats, ch.h_c, opts);
    DesignResult res;
    res.status = out.status;
    res.iterations = out.iterations;
    res.solves = out.solves;
    if (out.status == conic::Status::optimal) {
        BeamformingDesign d;
        d.q = out.state.q_anchor;
        d.Q = d.q * d.q.adjoint();
        ComplexVector w = out.state.w_anchor;
        d.W = w * w.adjoint();
        d.rho = out.state.rho;
        res.design = std::move(d);
        res.objective = out.state.q_anchor.squaredNorm();
        res.objective_trace = out.state.history;
        attach_certificates(s, ch.h_c, ch.H_e, res);
        res.rank_gap = 0.0;  // rank-one by construction
    }
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/// No-AN baseline: the 1-D designer with W pinned to zero.
inline DesignResult baseline_no_an(const Scenario& s, const ChannelSet& ch, DesignOptions opts = {}) {
    opts.an_enabled = false;
    return solve_pm_1d(s, ch, opts);
}

/// Fixed splitting-ratio baseline (rho = 0.5 unless overridden).
inline DesignResult baseline_fixed_rho(const Scenario& s, const ChannelSet& ch, double rho = 0.5,
                                       DesignOptions opts = {}) {
    opts.fixed_rho = rho;
    return solve_pm_1d(s, ch, opts);
}

}  // namespace secswipt
