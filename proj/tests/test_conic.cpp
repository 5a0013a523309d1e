// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <secswipt/solver.hpp>

#include <random>

using namespace secswipt;
using namespace secswipt::conic;

namespace {

std::mt19937 rng(777);

ComplexVector random_cvec(int n) {
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
    return v;
}

ComplexMatrix random_hermitian(int n) {
    std::normal_distribution<double> g;
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return (a + a.adjoint()) / 2.0;
}

double block_compl_slack(const Problem& p, const Report& r, const Block& b) {
    return std::abs(r.s.segment(b.offset, b.len).dot(r.z.segment(b.offset, b.len)));
}

}  // namespace

TEST_CASE("trivial lp: min x s.t. x >= 1") {
    Problem p;
    int x = p.add_var();
    p.objective_add(x, 1.0);
    p.add_nonneg(LinExpr::variable(x) - LinExpr(1.0));
    auto rep = solve(p);
    REQUIRE(rep.status == Status::optimal);
    REQUIRE(rep.x(x) == Catch::Approx(1.0).margin(1e-7));
    REQUIRE(rep.objective == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("rank-one MRT optimum: min tr Q s.t. h^H Q h >= 1, Q >= 0") {
    Problem p;
    auto q = p.add_hermitian_var(2);
    p.objective_add(q.trace_expr());
    ComplexVector h(2);
    h << 1.0, 0.0;
    p.add_nonneg(q.expr().quad_form(h) - LinExpr(1.0), "gain");
    auto psd = p.add_hermitian_psd(q.expr(), "q_psd");
    auto rep = solve(p);
    REQUIRE(rep.status == Status::optimal);
    REQUIRE(rep.objective == Catch::Approx(1.0).margin(1e-6));
    ComplexMatrix qv = q.value(rep.x);
    REQUIRE(std::abs(qv(0, 0).real() - 1.0) < 1e-5);
    REQUIRE(std::abs(qv(1, 1)) < 1e-5);

    // analytic duals: xi = 1 for the gain row, Z = I - h h^H for the PSD block
    const auto& blocks = p.blocks();
    RealVector zrow = block_dual(p, rep, BlockRef{0});
    REQUIRE(zrow(0) == Catch::Approx(1.0).margin(1e-5));
    ComplexMatrix zdual = hermitian_dual(p, rep, psd);
    ComplexMatrix expect = ComplexMatrix::Identity(2, 2) - h * h.adjoint();
    REQUIRE((zdual - expect).norm() < 1e-4);
    REQUIRE(blocks[psd.index].mat_dim == 4);
}

TEST_CASE("complex MRT with random channel") {
    for (int trial = 0; trial < 10; ++trial) {
        ComplexVector h = random_cvec(3);
        Problem p;
        auto q = p.add_hermitian_var(3);
        p.objective_add(q.trace_expr());
        p.add_nonneg(q.expr().quad_form(h) - LinExpr(1.0));
        p.add_hermitian_psd(q.expr());
        auto rep = solve(p);
        REQUIRE(rep.status == Status::optimal);
        REQUIRE(rep.objective == Catch::Approx(1.0 / h.squaredNorm()).epsilon(1e-5));
    }
}

TEST_CASE("largest eigenvalue via LMI: min t s.t. tI - H >= 0") {
    for (int trial = 0; trial < 10; ++trial) {
        ComplexMatrix h = random_hermitian(4);
        double lmax = eigh(h).values(0);  // independent oracle
        Problem p;
        int t = p.add_var();
        p.objective_add(t, 1.0);
        MatExpr m = MatExpr::scaled_identity(t, 4) + MatExpr::constant_term(-h);
        p.add_hermitian_psd(m);
        auto rep = solve(p);
        REQUIRE(rep.status == Status::optimal);
        REQUIRE(rep.objective == Catch::Approx(lmax).margin(1e-6 * std::max(1.0, std::abs(lmax))));
    }
}

TEST_CASE("projection onto a ball (SOCP closed form)") {
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4;
        RealVector x0(n);
        for (int i = 0; i < n; ++i) x0(i) = 2.0 * g(rng);
        double radius = std::abs(g(rng)) + 0.2;
        double expect = std::max(0.0, x0.norm() - radius);

        Problem p;
        auto xs = p.add_vars(n);
        int t = p.add_var();
        p.objective_add(t, 1.0);
        std::vector<LinExpr> dist;
        dist.push_back(LinExpr::variable(t));
        for (int i = 0; i < n; ++i) dist.push_back(LinExpr::variable(xs[i]) - LinExpr(x0(i)));
        p.add_soc(dist, "distance");
        std::vector<LinExpr> ball;
        ball.push_back(LinExpr(radius));
        for (int i = 0; i < n; ++i) ball.push_back(LinExpr::variable(xs[i]));
        p.add_soc(ball, "ball");
        auto rep = solve(p);
        REQUIRE(rep.status == Status::optimal);
        REQUIRE(rep.objective == Catch::Approx(expect).margin(1e-6));
    }
}

TEST_CASE("rotated cone: min u+v s.t. uv >= 1") {
    Problem p;
    int u = p.add_var(), v = p.add_var();
    p.objective_add(u, 1.0);
    p.objective_add(v, 1.0);
    p.add_rotated_soc(LinExpr::variable(u), LinExpr::variable(v), LinExpr(1.0));
    auto rep = solve(p);
    REQUIRE(rep.status == Status::optimal);
    REQUIRE(rep.objective == Catch::Approx(2.0).margin(1e-6));
    REQUIRE(rep.x(u) == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("infeasible toy problem reports infeasible") {
    Problem p;
    int x = p.add_var();
    p.objective_add(x, 1.0);
    p.add_nonneg(LinExpr::variable(x) - LinExpr(1.0));  // x >= 1
    p.add_nonneg(-LinExpr::variable(x));                // x <= 0
    auto rep = solve(p);
    REQUIRE(rep.status == Status::infeasible);
}

TEST_CASE("unbounded problem reports unbounded") {
    Problem p;
    int x = p.add_var();
    p.objective_add(x, 1.0);
    p.add_nonneg(-LinExpr::variable(x));  // x <= 0, min x unbounded below
    auto rep = solve(p);
    REQUIRE(rep.status == Status::unbounded);
}

TEST_CASE("determinism: identical problems give identical objectives") {
    auto build_and_solve = []() {
        Problem p;
        auto q = p.add_hermitian_var(3);
        p.objective_add(q.trace_expr());
        ComplexVector h(3);
        h << cplx(0.3, 0.1), cplx(-0.2, 0.7), cplx(0.5, -0.4);
        p.add_nonneg(q.expr().quad_form(h) - LinExpr(1.0));
        p.add_hermitian_psd(q.expr());
        return solve(p);
    };
    auto r1 = build_and_solve();
    auto r2 = build_and_solve();
    REQUIRE(r1.status == Status::optimal);
    REQUIRE(std::abs(r1.objective - r2.objective) <= 1e-9 * std::max(1.0, std::abs(r1.objective)));
    REQUIRE(r1.iterations == r2.iterations);
}

TEST_CASE("complementary slackness per block at optimum") {
    ComplexVector h = random_cvec(3);
    Problem p;
    auto q = p.add_hermitian_var(3);
    auto w = p.add_hermitian_var(3);
    p.objective_add(q.trace_expr());
    p.add_nonneg(q.expr().quad_form(h) - LinExpr(2.0), "gain");
    p.add_nonneg(LinExpr(5.0) - q.trace_expr() - w.trace_expr(), "power");
    p.add_nonneg((q.expr() + w.expr()).quad_form(h) - LinExpr(3.0), "eh");
    p.add_hermitian_psd(q.expr(), "q_psd");
    p.add_hermitian_psd(w.expr(), "w_psd");
    auto rep = solve(p);
    REQUIRE(rep.status == Status::optimal);
    double scale = std::max(1.0, std::abs(rep.objective));
    for (const auto& b : p.blocks()) REQUIRE(block_compl_slack(p, rep, b) <= 1e-6 * scale);
    // duality gap
    REQUIRE(rep.relative_gap <= 1e-6);
}

TEST_CASE("hermitian block dimensions follow the real embedding") {
    Problem p;
    auto q = p.add_hermitian_var(4);
    p.objective_add(q.trace_expr());
    auto b1 = p.add_hermitian_psd(q.expr(), "q_psd");
    REQUIRE(p.block(b1).mat_dim == 8);
    REQUIRE(p.block(b1).herm_dim == 4);

    // Hermitian dim N_R + N_T = 6 -> real dim 12
    MatExpr m = MatExpr::constant_term(ComplexMatrix::Identity(6, 6));
    auto b2 = p.add_hermitian_psd(m, "lemma2");
    REQUIRE(p.block(b2).mat_dim == 12);

    // zero affine map is trivially satisfiable
    auto b3 = p.add_hermitian_psd(MatExpr::zero(2, 2), "zero");
    p.add_nonneg(LinExpr::variable(0) - LinExpr(0.1));
    auto rep = solve(p);
    REQUIRE(rep.status == Status::optimal);
    (void)b3;
}

TEST_CASE("dump is self-describing") {
    Problem p;
    auto q = p.add_hermitian_var(2);
    p.objective_add(q.trace_expr());
    p.add_hermitian_psd(q.expr(), "q_psd");
    p.add_nonneg(q.trace_expr() - LinExpr(1.0), "row");
    std::string d = p.dump();
    REQUIRE(d.find("conic-problem") != std::string::npos);
    REQUIRE(d.find("psd") != std::string::npos);
    REQUIRE(d.find("nonneg") != std::string::npos);
    REQUIRE(d.find("role=q_psd") != std::string::npos);
}

TEST_CASE("mixed lp+soc: distance to an orthant shift") {
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3;
        RealVector a(n);
        for (int i = 0; i < n; ++i) a(i) = g(rng);
        // min ||x|| s.t. x_i >= a_i; optimum || max(a, 0) ||
        double expect = 0.0;
        for (int i = 0; i < n; ++i) expect += std::pow(std::max(a(i), 0.0), 2);
        expect = std::sqrt(expect);

        Problem p;
        auto xs = p.add_vars(n);
        int t = p.add_var();
        p.objective_add(t, 1.0);
        std::vector<LinExpr> soc{LinExpr::variable(t)};
        for (int i = 0; i < n; ++i) {
            soc.push_back(LinExpr::variable(xs[i]));
            p.add_nonneg(LinExpr::variable(xs[i]) - LinExpr(a(i)));
        }
        p.add_soc(soc);
        auto rep = solve(p);
        REQUIRE(rep.status == Status::optimal);
        REQUIRE(rep.objective == Catch::Approx(expect).margin(1e-6));
    }
}
