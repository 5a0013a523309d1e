// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration and stochastic channel generation: simplified
// path-loss large-scale fading, Rician small-scale fading with a far-field
// ULA line-of-sight component, and norm-bounded CSI error sampling.

#pragma once

#include <secswipt/numerics.hpp>

#include <random>
#include <stdexcept>
#include <vector>

namespace secswipt {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) {
    if (!(watt > 0.0)) throw std::domain_error("watt_to_dbm: nonpositive power");
    return 10.0 * std::log10(watt) + 30.0;
}

/// (d/d0)^(-alpha) large-scale gain.
inline double path_loss(double d, double d0, double alpha) {
    if (!(d > 0.0) || !(d0 > 0.0)) throw std::domain_error("path_loss: nonpositive distance");
    return std::pow(d / d0, -alpha);
}

/// Far-field uniform linear array response, half-wavelength spacing:
/// entry m = exp(j*pi*(m-1)*sin(theta)), unit-modulus entries.
inline ComplexVector los_steering(int n, double theta) {
    ComplexVector a(n);
    const double phase = M_PI * std::sin(theta);
    for (int m = 0; m < n; ++m) a(m) = std::exp(cplx(0.0, phase * m));
    return a;
}

struct Scenario {
    int N_T = 4, N_R = 2, L = 2, K = 3;
    double P = dbm_to_watt(30.0);  // total transmit power budget [W]

    std::vector<double> R_bar;    // target secrecy rate per CR [bps/Hz]
    std::vector<double> E_bar_c;  // harvested-power target per CR [W]
    std::vector<double> E_bar_e;  // harvested-power target per ER [W]
    std::vector<double> eta_c, eta_e;
    std::vector<double> sigma_c2, sigma_p2;  // CR antenna / PS noise power [W]
    std::vector<double> sigma_e2;            // ER noise power [W]

    double d_c = 40.0, d_e = 20.0, d0 = 10.0;
    double alpha = 3.0;
    double K_R = 3.0;

    std::vector<double> eps_c, eps_e;  // CSI error radii

    // The LOS norm and NLOS covariance admit two consistent readings that
    // differ by a factor N_T in per-receiver energy; "literal" keeps
    // h_nlos ~ CN(0, D_L I) with a matching sqrt(D_L)-per-entry LOS vector.
    enum class ChannelNorm { literal, normalized };
    ChannelNorm channel_norm = ChannelNorm::literal;

    static Scenario defaults() {
        Scenario s;
        s.R_bar.assign(s.L, 1.0);
        s.E_bar_c.assign(s.L, dbm_to_watt(10.0));
        s.E_bar_e.assign(s.K, dbm_to_watt(10.0));
        s.eta_c.assign(s.L, 0.3);
        s.eta_e.assign(s.K, 0.3);
        s.sigma_c2.assign(s.L, dbm_to_watt(-60.0));
        s.sigma_p2.assign(s.L, dbm_to_watt(-50.0));
        s.sigma_e2.assign(s.K, dbm_to_watt(-50.0));
        s.eps_c.assign(s.L, 0.01);
        s.eps_e.assign(s.K, 0.01);
        return s;
    }

    void resize_per_receiver() {
        auto fit = [](std::vector<double>& v, size_t n) {
            if (n == 0) {
                v.clear();
                return;
            }
            if (v.empty()) throw std::invalid_argument("Scenario: missing per-receiver field");
            v.resize(n, v.front());
        };
        fit(R_bar, L);
        fit(E_bar_c, L);
        fit(eta_c, L);
        fit(sigma_c2, L);
        fit(sigma_p2, L);
        fit(eps_c, L);
        fit(E_bar_e, K);
        fit(eta_e, K);
        fit(sigma_e2, K);
        fit(eps_e, K);
    }

    void validate() const {
        if (N_T < 1 || N_R < 1 || L < 1 || K < 0) throw std::invalid_argument("Scenario: bad dimensions");
        if (!(P > 0.0)) throw std::invalid_argument("Scenario: P must be positive");
        auto pos = [](const std::vector<double>& v, const char* n) {
            for (double x : v)
                if (!(x > 0.0)) throw std::invalid_argument(std::string("Scenario: ") + n + " must be positive");
        };
        pos(sigma_c2, "sigma_c2");
        pos(sigma_p2, "sigma_p2");
        pos(sigma_e2, "sigma_e2");
        for (double e : eta_c)
            if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("Scenario: eta_c out of (0,1]");
        for (double e : eta_e)
            if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("Scenario: eta_e out of (0,1]");
        for (double e : eps_c)
            if (e < 0.0) throw std::invalid_argument("Scenario: negative eps_c");
        for (double e : eps_e)
            if (e < 0.0) throw std::invalid_argument("Scenario: negative eps_e");
        if (!(d_c > 0.0 && d_e > 0.0 && d0 > 0.0)) throw std::invalid_argument("Scenario: bad distances");
    }

    double gain_c() const { return path_loss(d_c, d0, alpha); }
    double gain_e() const { return path_loss(d_e, d0, alpha); }
};

struct ChannelSet {
    std::vector<ComplexVector> h_c;      // true CR channels, N_T
    std::vector<ComplexMatrix> H_e;      // true ER channels, N_T x N_R
    std::vector<ComplexVector> h_c_est;  // estimates held by the transmitter
    std::vector<ComplexMatrix> H_e_est;
    std::vector<ComplexVector> e_c;  // realized errors, h = h_est + e
    std::vector<ComplexMatrix> E_e;
};

namespace detail_rng {

inline RealVector gaussian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    RealVector v(n);
    for (int i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

inline ComplexVector circular_gaussian(std::mt19937_64& rng, int n, double var_per_entry) {
    std::normal_distribution<double> g(0.0, std::sqrt(var_per_entry / 2.0));
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) {
        double re = g(rng), im = g(rng);
        v(i) = cplx(re, im);
    }
    return v;
}

}  // namespace detail_rng

/// Uniform draw from the complex Euclidean eps-ball (boundary draw when
/// requested). Interior radii follow r^(2*dim), the volume law of the
/// underlying real ball of dimension 2*dim.
inline ComplexVector sample_error_ball(int dim, double eps, std::mt19937_64& rng, bool boundary = false) {
    if (eps < 0.0) throw std::domain_error("sample_error_ball: negative radius");
    if (eps == 0.0) return ComplexVector::Zero(dim);
    ComplexVector dir = detail_rng::circular_gaussian(rng, dim, 1.0);
    double nrm = dir.norm();
    if (nrm == 0.0) dir(0) = 1.0, nrm = 1.0;
    double radius = eps;
    if (!boundary) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        radius = eps * std::pow(u(rng), 1.0 / (2.0 * dim));
    }
    return dir * (radius / nrm);
}

inline ComplexMatrix sample_error_ball_mat(int rows, int cols, double eps, std::mt19937_64& rng,
                                           bool boundary = false) {
    ComplexVector v = sample_error_ball(rows * cols, eps, rng, boundary);
    return unvec(v, rows, cols);
}

/// One Rician channel vector for a link with large-scale gain dl.
inline ComplexVector sample_rician_vector(const Scenario& s, double dl, double theta, std::mt19937_64& rng) {
    const double los_w = std::sqrt(s.K_R / (1.0 + s.K_R));
    const double nlos_w = std::sqrt(1.0 / (1.0 + s.K_R));
    double los_scale, nlos_var;
    if (s.channel_norm == Scenario::ChannelNorm::literal) {
        los_scale = std::sqrt(dl);   // per-entry sqrt(D_L), norm^2 = D_L * N_T
        nlos_var = dl;               // CN(0, D_L I)
    } else {
        los_scale = std::sqrt(dl / s.N_T);  // norm^2 = D_L
        nlos_var = dl / s.N_T;              // E ||nlos||^2 = D_L
    }
    ComplexVector los = los_scale * los_steering(s.N_T, theta);
    ComplexVector nlos = detail_rng::circular_gaussian(rng, s.N_T, nlos_var);
    return los_w * los + nlos_w * nlos;
}

/// Draw true channels, CSI errors inside the per-receiver balls, and set
/// estimates as true-minus-error. Reproducible from the seed.
inline ChannelSet sample_channel_set(const Scenario& s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    ChannelSet ch;
    const double dl_c = s.gain_c(), dl_e = s.gain_e();
    for (int l = 0; l < s.L; ++l) {
        double theta = angle(rng);
        ComplexVector h = sample_rician_vector(s, dl_c, theta, rng);
        ComplexVector e = sample_error_ball(s.N_T, s.eps_c[l], rng);
        ch.h_c.push_back(h);
        ch.e_c.push_back(e);
        ch.h_c_est.push_back(h - e);
    }
    for (int k = 0; k < s.K; ++k) {
        double theta = angle(rng);  // one departure angle per ER
        ComplexMatrix h(s.N_T, s.N_R);
        for (int j = 0; j < s.N_R; ++j) h.col(j) = sample_rician_vector(s, dl_e, theta, rng);
        ComplexMatrix e = sample_error_ball_mat(s.N_T, s.N_R, s.eps_e[k], rng);
        ch.H_e.push_back(h);
        ch.E_e.push_back(e);
        ch.H_e_est.push_back(h - e);
    }
    return ch;
}

}  // namespace secswipt
