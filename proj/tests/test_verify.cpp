// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <secswipt/verify.hpp>

#include <random>

using namespace secswipt;

namespace {

std::mt19937 rng(2024);

ComplexVector random_cvec(int n) {
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
    return v;
}

ComplexMatrix random_psd(int n, double scale = 1.0) {
    ComplexMatrix a(n, n);
    std::normal_distribution<double> g;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return scale * (a * a.adjoint());
}

Scenario tiny_scenario(int nt, int l, int k, int nr) {
    Scenario s = Scenario::defaults();
    s.N_T = nt;
    s.L = l;
    s.K = k;
    s.N_R = nr;
    s.resize_per_receiver();
    return s;
}

}  // namespace

TEST_CASE("secrecy rate clamps at zero for zero information signal") {
    Scenario s = tiny_scenario(2, 1, 1, 1);
    BeamformingDesign d;
    d.Q = ComplexMatrix::Zero(2, 2);
    d.W = random_psd(2, 0.1);
    d.rho = {0.5};
    ChannelSet ch = sample_channel_set(s, 1);
    auto rep = secrecy_rate(s, d, ch.h_c, ch.H_e);
    REQUIRE(rep.per_cr[0] == 0.0);
}

TEST_CASE("secrecy rate direct substitution") {
    // rho=1, W=0, h^H Q h = 3, sigma_c2 = sigma_p2 = 0.5, no eavesdroppers
    Scenario s = tiny_scenario(2, 1, 0, 1);
    s.sigma_c2 = {0.5};
    s.sigma_p2 = {0.5};
    BeamformingDesign d;
    ComplexVector h(2);
    h << 1.0, 0.0;
    d.Q = 3.0 * h * h.adjoint();
    d.W = ComplexMatrix::Zero(2, 2);
    d.rho = {1.0};
    auto rep = secrecy_rate(s, d, {h}, {});
    REQUIRE(rep.per_cr[0] == Catch::Approx(2.0).margin(1e-12));  // log2(4)
}

TEST_CASE("scalar eavesdropper: log-det path equals the scalar formula") {
    Scenario s = tiny_scenario(3, 1, 1, 1);
    for (int t = 0; t < 25; ++t) {
        BeamformingDesign d;
        d.Q = random_psd(3, 0.5);
        d.W = random_psd(3, 0.5);
        d.rho = {0.7};
        ComplexVector h = random_cvec(3);
        ComplexMatrix he_m = random_cvec(3);
        auto rep = secrecy_rate(s, d, {h}, {he_m});
        ComplexVector he = he_m.col(0);
        double sig = (he.adjoint() * d.Q * he)(0).real();
        double jam = (he.adjoint() * d.W * he)(0).real();
        double scalar_rate = std::log2(1.0 + sig / (s.sigma_e2[0] + jam));
        REQUIRE(std::abs(rep.eve_rate[0] - scalar_rate) < 1e-10);
    }
}

TEST_CASE("harvested power formulas") {
    Scenario s = tiny_scenario(2, 1, 1, 1);
    s.sigma_c2 = {0.0};  // direct-substitution example
    BeamformingDesign d;
    ComplexVector h(2);
    h << 1.0, 0.0;
    d.Q = 0.5 * h * h.adjoint();
    d.W = 0.5 * h * h.adjoint();  // h^H (Q+W) h = 1
    d.rho = {0.5};
    auto rep = harvested_power(s, d, {h}, {ComplexMatrix::Zero(2, 1)});
    REQUIRE(rep.cr[0] == Catch::Approx(0.15).margin(1e-14));  // 0.3 * 0.5 * 1

    d.rho = {1.0};
    rep = harvested_power(s, d, {h}, {ComplexMatrix::Zero(2, 1)});
    REQUIRE(rep.cr[0] == 0.0);
}

TEST_CASE("ER harvest: trace form equals the column sum") {
    Scenario s = tiny_scenario(4, 1, 2, 3);
    ChannelSet ch = sample_channel_set(s, 3);
    BeamformingDesign d;
    d.Q = random_psd(4, 0.3);
    d.W = random_psd(4, 0.3);
    d.rho = {0.5};
    auto rep = harvested_power(s, d, ch.h_c, ch.H_e);
    for (int k = 0; k < s.K; ++k) {
        double acc = 0.0;
        for (int j = 0; j < s.N_R; ++j) {
            ComplexVector col = ch.H_e[k].col(j);
            acc += (col.adjoint() * (d.Q + d.W) * col)(0).real();
        }
        double expect = s.eta_e[k] * (acc + s.N_R * s.sigma_e2[k]);
        REQUIRE(std::abs(rep.er[k] - expect) < 1e-12 * std::max(1.0, expect));
    }
}

TEST_CASE("rank one gap") {
    ComplexVector q = random_cvec(4);
    REQUIRE(rank_one_gap(q * q.adjoint()) == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(rank_one_gap(ComplexMatrix::Identity(4, 4)) == Catch::Approx(1.0));

    ComplexMatrix m = q * q.adjoint() + 1e-8 * ComplexMatrix::Identity(4, 4);
    double expect = 1e-8 / (q.squaredNorm() + 1e-8);  // eig oracle closed form
    REQUIRE(rank_one_gap(m) == Catch::Approx(expect).epsilon(1e-6));

    REQUIRE_THROWS_AS(rank_one_gap(ComplexMatrix::Zero(3, 3)), std::domain_error);
}

TEST_CASE("worst-case check with zero radius accepts any feasible design") {
    Scenario s = tiny_scenario(2, 1, 0, 1);
    s.R_bar = {0.5};
    s.E_bar_c = {1e-6};
    s.eps_c = {0.0};
    ChannelSet ch = sample_channel_set(s, 17);
    BeamformingDesign d;
    d.Q = 0.5 * s.P * ch.h_c[0] * ch.h_c[0].adjoint() / ch.h_c[0].squaredNorm();
    d.W = 0.4 * s.P * ComplexMatrix::Identity(2, 2) / 2.0;
    d.rho = {0.5};
    auto sec = secrecy_rate(s, d, ch.h_c, ch.H_e);
    auto harv = harvested_power(s, d, ch.h_c, ch.H_e);
    REQUIRE(sec.per_cr[0] >= s.R_bar[0]);
    REQUIRE(harv.cr[0] >= s.E_bar_c[0]);

    auto rep = worst_case_check(s, d, ch.h_c_est, ch.H_e_est, 200, 5);
    REQUIRE(rep.frac_all == 1.0);
    REQUIRE(rep.exemplars.empty());
}

TEST_CASE("brute force oracle reproduces the MRT closed form") {
    Scenario s = tiny_scenario(2, 1, 0, 1);
    s.R_bar = {1.0};
    s.E_bar_c = {0.0};  // no EH side
    ChannelSet ch = sample_channel_set(s, 21);
    double cf = (std::exp2(s.R_bar[0]) - 1.0) * (s.sigma_c2[0] + s.sigma_p2[0]) / ch.h_c[0].squaredNorm();
    double oracle = brute_force_pm(s, ch, 0.02);
    REQUIRE(oracle >= cf - 1e-12);
    REQUIRE(oracle <= cf * 1.05);  // within grid resolution of the optimum

    double finer = brute_force_pm(s, ch, 0.01);
    REQUIRE(finer <= oracle + 1e-15);  // refinement never worsens
    REQUIRE_THROWS_AS(brute_force_pm(tiny_scenario(3, 1, 0, 1), ch, 0.1), std::invalid_argument);
}
