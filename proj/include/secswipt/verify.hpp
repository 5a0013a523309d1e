// SPDX-License-Identifier: Apache-2.0
//
// Ground-truth evaluation of designs: exact secrecy rate, harvested power,
// rank-one certificates, worst-case CSI-error audits, and the brute-force
// oracle used by the acceptance suite.

#pragma once

#include <secswipt/design.hpp>

#include <optional>

namespace secswipt {

struct SecrecyReport {
    std::vector<double> per_cr;  // clamped at zero
    double min_rate = 0.0;
    std::vector<double> eve_rate;  // per ER, of the max-rate expression
};

/// Exact secrecy rate: CR rate minus the strongest eavesdropper log-det,
/// clamped at zero, per CR.
inline SecrecyReport secrecy_rate(const Scenario& s, const BeamformingDesign& d,
                                  const std::vector<ComplexVector>& h_c,
                                  const std::vector<ComplexMatrix>& h_e) {
    SecrecyReport rep;
    double eve_max = 0.0;
    rep.eve_rate.resize(h_e.size());
    for (size_t k = 0; k < h_e.size(); ++k) {
        const ComplexMatrix& he = h_e[k];
        ComplexMatrix noise = s.sigma_e2[k] * ComplexMatrix::Identity(s.N_R, s.N_R) + he.adjoint() * d.W * he;
        ComplexMatrix full = noise + he.adjoint() * d.Q * he;
        // log det(I + noise^{-1} signal), evaluated as a difference of PD log-dets
        ComplexMatrix noise_h = (noise + noise.adjoint()) / 2.0;
        ComplexMatrix full_h = (full + full.adjoint()) / 2.0;
        rep.eve_rate[k] = logdet_psd(full_h) - logdet_psd(noise_h);
        eve_max = std::max(eve_max, rep.eve_rate[k]);
    }
    rep.min_rate = std::numeric_limits<double>::infinity();
    for (size_t l = 0; l < h_c.size(); ++l) {
        const ComplexVector& h = h_c[l];
        double sig = (h.adjoint() * d.Q * h)(0).real();
        double junk = (h.adjoint() * d.W * h)(0).real();
        double rho = d.rho[l];
        double sinr = rho * sig / (rho * (s.sigma_c2[l] + junk) + s.sigma_p2[l]);
        double rate = std::max(0.0, std::log2(1.0 + sinr) - eve_max);
        rep.per_cr.push_back(rate);
        rep.min_rate = std::min(rep.min_rate, rate);
    }
    return rep;
}

struct HarvestReport {
    std::vector<double> cr;  // [W]
    std::vector<double> er;  // [W]
};

inline HarvestReport harvested_power(const Scenario& s, const BeamformingDesign& d,
                                     const std::vector<ComplexVector>& h_c,
                                     const std::vector<ComplexMatrix>& h_e) {
    HarvestReport rep;
    ComplexMatrix qw = d.Q + d.W;
    for (size_t l = 0; l < h_c.size(); ++l) {
        double recv = (h_c[l].adjoint() * qw * h_c[l])(0).real();
        rep.cr.push_back(s.eta_c[l] * (1.0 - d.rho[l]) * (recv + s.sigma_c2[l]));
    }
    for (size_t k = 0; k < h_e.size(); ++k) {
        double recv = (h_e[k].adjoint() * qw * h_e[k]).trace().real();
        rep.er.push_back(s.eta_e[k] * (recv + s.N_R * s.sigma_e2[k]));
    }
    return rep;
}

/// lambda2 / lambda1 of a PSD matrix, in [0,1]; the rank-one certificate.
inline double rank_one_gap(const ComplexMatrix& q) {
    if (q.norm() == 0.0) throw std::domain_error("rank_one_gap: zero matrix");
    EighResult e = eigh(q);
    double l1 = e.values(0);
    if (!(l1 > 0.0)) throw std::domain_error("rank_one_gap: matrix is not PSD");
    if (e.values.size() == 1) return 0.0;
    return std::clamp(e.values(1) / l1, 0.0, 1.0);
}

struct SatisfactionReport {
    int n_samples = 0;
    double frac_all = 0.0;
    double frac_secrecy = 0.0;
    double frac_cr_eh = 0.0;
    double frac_er_eh = 0.0;
    double worst_secrecy_slack = std::numeric_limits<double>::infinity();  // bps/Hz
    double worst_cr_eh_slack = std::numeric_limits<double>::infinity();    // W
    double worst_er_eh_slack = std::numeric_limits<double>::infinity();    // W
    struct Exemplar {
        int sample;
        const char* family;
        double slack;
    };
    std::vector<Exemplar> exemplars;  // first few violating draws
};

/// Samples CSI errors around the estimates (boundary-weighted: 90% of the
/// draws sit on the sphere where the quadratic constraints bind) and counts
/// how often the design still meets secrecy and harvested-power targets.
inline SatisfactionReport worst_case_check(const Scenario& s, const BeamformingDesign& d,
                                           const std::vector<ComplexVector>& h_est,
                                           const std::vector<ComplexMatrix>& h_e_est, int n_samples,
                                           std::uint64_t seed, double slack_tol = 1e-7) {
    std::mt19937_64 rng(seed);
    SatisfactionReport rep;
    rep.n_samples = n_samples;
    int ok_all = 0, ok_sec = 0, ok_cr = 0, ok_er = 0;
    std::vector<ComplexVector> h(s.L);
    std::vector<ComplexMatrix> he(s.K);
    for (int i = 0; i < n_samples; ++i) {
        bool boundary = (i % 10) != 0;
        for (int l = 0; l < s.L; ++l) h[l] = h_est[l] + sample_error_ball(s.N_T, s.eps_c[l], rng, boundary);
        for (int k = 0; k < s.K; ++k)
            he[k] = h_e_est[k] + sample_error_ball_mat(s.N_T, s.N_R, s.eps_e[k], rng, boundary);
        SecrecyReport sec = secrecy_rate(s, d, h, he);
        HarvestReport harv = harvested_power(s, d, h, he);
        double sec_slack = std::numeric_limits<double>::infinity();
        for (int l = 0; l < s.L; ++l) sec_slack = std::min(sec_slack, sec.per_cr[l] - s.R_bar[l]);
        double cr_slack = std::numeric_limits<double>::infinity();
        for (int l = 0; l < s.L; ++l) cr_slack = std::min(cr_slack, harv.cr[l] - s.E_bar_c[l]);
        double er_slack = std::numeric_limits<double>::infinity();
        for (int k = 0; k < s.K; ++k) er_slack = std::min(er_slack, harv.er[k] - s.E_bar_e[k]);
        rep.worst_secrecy_slack = std::min(rep.worst_secrecy_slack, sec_slack);
        rep.worst_cr_eh_slack = std::min(rep.worst_cr_eh_slack, cr_slack);
        rep.worst_er_eh_slack = std::min(rep.worst_er_eh_slack, er_slack);
        bool s_ok = sec_slack >= -slack_tol, c_ok = cr_slack >= -slack_tol, e_ok = er_slack >= -slack_tol;
        ok_sec += s_ok;
        ok_cr += c_ok;
        ok_er += e_ok;
        ok_all += (s_ok && c_ok && e_ok);
        if (!(s_ok && c_ok && e_ok) && rep.exemplars.size() < 8) {
            const char* fam = !e_ok ? "er_eh" : (!c_ok ? "cr_eh" : "secrecy");
            double sl = !e_ok ? er_slack : (!c_ok ? cr_slack : sec_slack);
            rep.exemplars.push_back({i, fam, sl});
        }
    }
    rep.frac_all = double(ok_all) / n_samples;
    rep.frac_secrecy = double(ok_sec) / n_samples;
    rep.frac_cr_eh = double(ok_cr) / n_samples;
    rep.frac_er_eh = double(ok_er) / n_samples;
    return rep;
}

struct KktCertificate {
    std::vector<double> xi, mu;        // duals of the rate and CR-EH rows
    std::vector<double> rho_residual;  // |rho_returned - formula|
    std::vector<bool> checked;         // both multipliers above threshold
    double rank_gap = std::numeric_limits<double>::quiet_NaN();
};

/// Appendix-level consistency check: at the optimal t the returned splitting
/// ratio must match rho* = sqrt(xi (2^R - t) sp2) / (sqrt(...) + sqrt(mu E/eta)).
/// Runs only when the designer recorded the inner duals; the formula is
/// checked per CR only when both multipliers are strictly positive.
inline std::optional<KktCertificate> kkt_rho_check(const Scenario& s, const DesignResult& res,
                                                   double threshold = 1e-8) {
    auto xi_it = res.duals.find("xi_l");
    auto mu_it = res.duals.find("mu_l");
    if (xi_it == res.duals.end() || mu_it == res.duals.end()) return std::nullopt;
    if (!(res.t_star > 0.0)) return std::nullopt;
    KktCertificate cert;
    cert.xi = xi_it->second;
    cert.mu = mu_it->second;
    for (int l = 0; l < s.L; ++l) {
        double xi = cert.xi[l], mu = cert.mu[l];
        if (xi < -1e-9 || mu < -1e-9) throw std::runtime_error("kkt_rho_check: negative multiplier");
        double a = std::sqrt(std::max(0.0, xi * (std::exp2(s.R_bar[l]) - res.t_star) * s.sigma_p2[l]));
        double b = std::sqrt(std::max(0.0, mu * s.E_bar_c[l] / s.eta_c[l]));
        bool use = xi > threshold && mu > threshold && a + b > 0.0;
        cert.checked.push_back(use);
        cert.rho_residual.push_back(use ? std::abs(res.design.rho[l] - a / (a + b))
                                        : std::numeric_limits<double>::quiet_NaN());
    }
    cert.rank_gap = res.rank_gap;
    return cert;
}

/// Exhaustive-grid oracle for tiny instances (N_T = 2, L = 1, K <= 1,
/// N_R = 1): beam directions on the unit sphere, AN power along the
/// zero-forcing direction, and the splitting ratio are gridded; the
/// information power is resolved in closed form per grid point. Returns the
/// minimal feasible tr(Q), +inf when the grid finds nothing feasible.
inline double brute_force_pm(const Scenario& s, const ChannelSet& ch, double resolution) {
    if (s.N_T != 2 || s.L != 1 || s.K > 1 || (s.K == 1 && s.N_R != 1))
        throw std::invalid_argument("brute_force_pm: oracle supports N_T=2, L=1, K<=1, N_R=1 only");
    const ComplexVector& h = ch.h_c[0];
    const bool has_eve = s.K == 1;
    ComplexVector he(2);
    if (has_eve) he = ch.H_e[0].col(0);

    // zero-forcing AN direction (unique up to phase for N_T = 2)
    ComplexVector u2(2);
    u2 << -std::conj(h(1)), std::conj(h(0));
    u2 /= u2.norm();

    const double sc2 = s.sigma_c2[0], sp2 = s.sigma_p2[0];
    const double rbar = s.R_bar[0], twoR = std::exp2(rbar);
    const double ehat_c = s.E_bar_c[0] / s.eta_c[0];
    const double se2 = has_eve ? s.sigma_e2[0] : 0.0;
    const double ehat_e = has_eve ? s.E_bar_e[0] / s.eta_e[0] : 0.0;
    const double je_unit = has_eve ? std::norm(he.dot(u2)) : 0.0;  // |he^H u2|^2

    const int n_phi = static_cast<int>(std::floor(1.0 / resolution + 1e-9));
    const int n_psi = n_phi;
    std::vector<double> pw_grid;
    for (int i = 0; i <= n_phi; ++i) pw_grid.push_back(s.P * i * resolution);
    for (int j = 0; j <= 12; ++j) pw_grid.push_back(s.P * 1e-6 * std::pow(10.0, 0.5 * j));

    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_phi; ++i) {
        double phi = 0.5 * M_PI * i * resolution;
        for (int j = 0; j < n_psi; ++j) {
            double psi = 2.0 * M_PI * j * resolution;
            ComplexVector qd(2);
            qd << std::cos(phi), std::sin(phi) * std::exp(cplx(0, psi));
            double gc = std::norm(h.dot(qd));  // |h^H q|^2 per unit power
            double ge = has_eve ? std::norm(he.dot(qd)) : 0.0;
            for (int m = 1; m <= n_phi; ++m) {
                double rho = m * resolution;
                if (rho >= 1.0 && ehat_c > 0.0) continue;
                for (double pw : pw_grid) {
                    double lo = 0.0, hi = s.P - pw;
                    if (hi < 0.0) continue;
                    // secrecy: (1 + a p) >= 2^R (1 + b p)
                    double a = rho * gc / (rho * sc2 + sp2);
                    double b = has_eve ? ge / (se2 + je_unit * pw) : 0.0;
                    double coef = a - twoR * b, rhs = twoR - 1.0;
                    if (coef > 0.0) lo = std::max(lo, rhs / coef);
                    else if (rhs > 0.0) continue;  // cannot meet the rate
                    else hi = std::min(hi, 0.0);   // p must stay at zero
                    if (ehat_c > 0.0) {
                        double need = ehat_c / (1.0 - rho) - sc2;  // received power needed
                        if (gc <= 0.0 && need > 0.0) continue;
                        if (need > 0.0) lo = std::max(lo, need / gc);
                    }
                    if (has_eve && ehat_e > 0.0) {
                        double need = ehat_e - s.N_R * se2 - je_unit * pw;
                        if (need > 0.0) {
                            if (ge <= 1e-300) continue;
                            lo = std::max(lo, need / ge);
                        }
                    }
                    if (lo <= hi + 1e-12) best = std::min(best, lo);
                }
            }
        }
    }
    return best;
}

}  // namespace secswipt
