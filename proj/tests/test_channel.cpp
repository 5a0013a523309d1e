// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <secswipt/channel.hpp>

#include <algorithm>

using namespace secswipt;

TEST_CASE("path loss formula") {
    REQUIRE(path_loss(10, 10, 3) == Catch::Approx(1.0));
    REQUIRE(path_loss(20, 10, 3) == Catch::Approx(0.125));
    REQUIRE(path_loss(40, 10, 3) == Catch::Approx(0.015625));
    REQUIRE_THROWS_AS(path_loss(-1, 10, 3), std::domain_error);
    REQUIRE_THROWS_AS(path_loss(10, 0, 3), std::domain_error);
}

TEST_CASE("ULA steering vector") {
    ComplexVector a = los_steering(4, 0.0);
    for (int i = 0; i < 4; ++i) REQUIRE(a(i) == cplx(1.0, 0.0));

    ComplexVector b = los_steering(2, M_PI / 2);
    REQUIRE(b(0) == cplx(1.0, 0.0));
    REQUIRE(std::abs(b(1) - cplx(-1.0, 0.0)) < 1e-12);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 2 * M_PI);
    for (int t = 0; t < 20; ++t) {
        int n = 1 + t % 8;
        REQUIRE(los_steering(n, u(rng)).squaredNorm() == Catch::Approx(double(n)));
    }
}

TEST_CASE("dBm conversions") {
    REQUIRE(dbm_to_watt(-60.0) == Catch::Approx(1e-9));
    REQUIRE(dbm_to_watt(30.0) == Catch::Approx(1.0));
    REQUIRE(dbm_to_watt(0.0) == Catch::Approx(1e-3));
    for (double x : {-71.3, -10.0, 0.0, 12.5, 46.0})
        REQUIRE(watt_to_dbm(dbm_to_watt(x)) == Catch::Approx(x).epsilon(1e-12));
    REQUIRE_THROWS_AS(watt_to_dbm(0.0), std::domain_error);
    REQUIRE_THROWS_AS(watt_to_dbm(-2.0), std::domain_error);
}

TEST_CASE("LOS-dominant limit pins the channel norm") {
    Scenario s = Scenario::defaults();
    s.K_R = 1e9;
    double dl = s.gain_c();  // d = 40 -> 1/64
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ChannelSet ch = sample_channel_set(s, seed);
        for (const auto& h : ch.h_c)
            REQUIRE(h.squaredNorm() == Catch::Approx(dl * s.N_T).epsilon(1e-3));  // 0.0625
    }
    REQUIRE(dl * s.N_T == Catch::Approx(0.0625));
}

TEST_CASE("zero error radius gives exact estimates") {
    Scenario s = Scenario::defaults();
    s.eps_c.assign(s.L, 0.0);
    s.eps_e.assign(s.K, 0.0);
    ChannelSet ch = sample_channel_set(s, 42);
    for (int l = 0; l < s.L; ++l) REQUIRE((ch.h_c[l] - ch.h_c_est[l]).norm() == 0.0);
    for (int k = 0; k < s.K; ++k) REQUIRE((ch.H_e[k] - ch.H_e_est[k]).norm() == 0.0);
}

TEST_CASE("NLOS energy: paper-literal and normalized readings") {
    Scenario s = Scenario::defaults();
    s.K_R = 0.0;  // pure NLOS
    double dl = s.gain_c();
    std::mt19937_64 rng(7);

    double acc = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += sample_rician_vector(s, dl, 0.0, rng).squaredNorm();
    REQUIRE(acc / n == Catch::Approx(dl * s.N_T).epsilon(0.03));  // CN(0, D_L I)

    s.channel_norm = Scenario::ChannelNorm::normalized;
    acc = 0.0;
    for (int i = 0; i < n; ++i) acc += sample_rician_vector(s, dl, 0.0, rng).squaredNorm();
    REQUIRE(acc / n == Catch::Approx(dl).epsilon(0.03));  // E||h_nlos||^2 = D_L
}

TEST_CASE("Rician mixture energy matches weighted component variances") {
    Scenario s = Scenario::defaults();  // K_R = 3
    double dl = s.gain_c();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0, 2 * M_PI);
    double acc = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += sample_rician_vector(s, dl, angle(rng), rng).squaredNorm();
    // both components carry energy D_L * N_T under the literal reading
    REQUIRE(acc / n == Catch::Approx(dl * s.N_T).epsilon(0.05));
}

TEST_CASE("error ball invariants") {
    std::mt19937_64 rng(5);
    REQUIRE(sample_error_ball(3, 0.0, rng).norm() == 0.0);

    for (int t = 0; t < 200; ++t) {
        ComplexVector e = sample_error_ball(4, 0.1, rng, true);
        REQUIRE(std::abs(e.norm() - 0.1) < 1e-12);
        ComplexVector ei = sample_error_ball(4, 0.1, rng, false);
        REQUIRE(ei.norm() <= 0.1 + 1e-15);
    }

    Scenario s = Scenario::defaults();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ChannelSet ch = sample_channel_set(s, seed);
        for (int l = 0; l < s.L; ++l) REQUIRE(ch.e_c[l].norm() <= s.eps_c[l] + 1e-15);
        for (int k = 0; k < s.K; ++k) REQUIRE(ch.E_e[k].norm() <= s.eps_e[k] + 1e-15);
    }
}

TEST_CASE("interior radii follow the ball volume law (KS)") {
    std::mt19937_64 rng(9);
    const int dim = 4, n = 10000;
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = sample_error_ball(dim, 1.0, rng).norm();
    std::sort(r.begin(), r.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        double f = std::pow(r[i], 2.0 * dim);  // CDF of the radius
        ks = std::max(ks, std::abs(f - (i + 1.0) / n));
        ks = std::max(ks, std::abs(f - double(i) / n));
    }
    REQUIRE(ks < 0.05);
}

TEST_CASE("same seed reproduces the channel set bitwise") {
    Scenario s = Scenario::defaults();
    ChannelSet a = sample_channel_set(s, 123), b = sample_channel_set(s, 123);
    for (int l = 0; l < s.L; ++l) {
        REQUIRE(a.h_c[l] == b.h_c[l]);
        REQUIRE(a.h_c_est[l] == b.h_c_est[l]);
    }
    for (int k = 0; k < s.K; ++k) {
        REQUIRE(a.H_e[k] == b.H_e[k]);
        REQUIRE(a.E_e[k] == b.E_e[k]);
    }
    ChannelSet c = sample_channel_set(s, 124);
    REQUIRE(a.h_c[0] != c.h_c[0]);
}

TEST_CASE("scenario validation") {
    Scenario s = Scenario::defaults();
    REQUIRE_NOTHROW(s.validate());
    s.P = 0.0;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
    s = Scenario::defaults();
    s.eta_c[0] = 1.5;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
    s = Scenario::defaults();
    s.eps_e[1] = -0.1;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
}
