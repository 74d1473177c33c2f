#include <gtest/gtest.h>

#include <random>

#include "amenable/lp.hpp"

using namespace amenable;
using namespace amenable::lp;

namespace {

Polytope unit_square() {
    Polytope p;
    p.dimension = 2;
    p.ineq_rows = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    p.ineq_rhs = {1, 1, 0, 0};
    return p;
}

// 2x2 doubly stochastic tables, variables (a,b,c,d) row-major.
Polytope birkhoff2() {
    Polytope p;
    p.dimension = 4;
    p.eq_rows = {{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}};
    p.eq_rhs = {1, 1, 1, 1};
    for (std::size_t j = 0; j < 4; ++j) {
        Vector r(4, 0.0);
        r[j] = -1.0;
        p.ineq_rows.push_back(r);
        p.ineq_rhs.push_back(0.0);
    }
    return p;
}

// Is v a convex combination of the other points?
bool in_hull_of_others(const std::vector<Vector>& pts, std::size_t skip) {
    const std::size_t k = pts.size() - 1;
    LinearProgram prog(k);
    const std::size_t d = pts[skip].size();
    for (std::size_t r = 0; r < d; ++r) {
        Vector row;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != skip) row.push_back(pts[i][r]);
        prog.add_row(row, Relation::Equal, pts[skip][r]);
    }
    prog.add_row(Vector(k, 1.0), Relation::Equal, 1.0);
    return solve_lp(prog).optimal();
}

}  // namespace

TEST(SolveLP, SingleConstraint) {
    LinearProgram prog(1, Sense::Maximize);
    prog.objective = {1};
    prog.add_row({1}, Relation::LessEqual, 3);
    const auto sol = solve_lp(prog);
    ASSERT_EQ(sol.status, Status::Optimal);
    EXPECT_NEAR(sol.objective, 3.0, 1e-12);
    EXPECT_NEAR(sol.dual[0], 1.0, 1e-12);
    EXPECT_TRUE(verify_solution(prog, sol).ok());
}

TEST(SolveLP, Transport2x2) {
    LinearProgram prog(4);
    prog.objective = {0, 1, 1, 0};
    prog.add_row({1, 1, 0, 0}, Relation::Equal, 0.5);
    prog.add_row({0, 0, 1, 1}, Relation::Equal, 0.5);
    prog.add_row({1, 0, 1, 0}, Relation::Equal, 0.5);
    prog.add_row({0, 1, 0, 1}, Relation::Equal, 0.5);
    const auto sol = solve_lp(prog);
    ASSERT_EQ(sol.status, Status::Optimal);
    EXPECT_NEAR(sol.objective, 0.0, 1e-12);
    // oracle: the objective over the two Birkhoff vertices scaled by 1/2
    const double v1 = 0.5 * (0 + 0), v2 = 0.5 * (1 + 1);
    EXPECT_NEAR(sol.objective, std::min(v1, v2), 1e-12);
    EXPECT_TRUE(verify_solution(prog, sol).ok());
}

TEST(SolveLP, Infeasible) {
    LinearProgram prog(1);
    prog.objective = {1};
    prog.add_row({1}, Relation::LessEqual, -1);
    EXPECT_EQ(solve_lp(prog).status, Status::Infeasible);
}

TEST(SolveLP, FarkasCertificate) {
    // x1 + 2 x2 = -1 and x1 - x2 = 3 with x >= 0: y^T A <= 0 < y^T b certifies emptiness.
    LinearProgram prog(2);
    prog.add_row({1, 2}, Relation::Equal, -1);
    prog.add_row({1, -1}, Relation::Equal, 3);
    const auto sol = solve_lp(prog);
    ASSERT_EQ(sol.status, Status::Infeasible);
    ASSERT_EQ(sol.farkas.size(), 2u);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_LE(sol.farkas[0] * prog.rows[0][j] + sol.farkas[1] * prog.rows[1][j], 1e-12);
    EXPECT_GT(sol.farkas[0] * prog.rhs[0] + sol.farkas[1] * prog.rhs[1], 1e-9);
}

TEST(SolveLP, Unbounded) {
    LinearProgram prog(2, Sense::Maximize);
    prog.objective = {1, 1};
    prog.add_row({1, -1}, Relation::LessEqual, 1);
    EXPECT_EQ(solve_lp(prog).status, Status::Unbounded);
}

TEST(SolveLP, FreeAndBoundedVariables) {
    // max x + 2y, -2 <= x <= 2, y free, x + y <= 5, y - x <= 3
    LinearProgram prog(2, Sense::Maximize);
    prog.objective = {1, 2};
    prog.lower[0] = -2;
    prog.upper[0] = 2;
    prog.set_free(1);
    prog.add_row({1, 1}, Relation::LessEqual, 5);
    prog.add_row({-1, 1}, Relation::LessEqual, 3);
    const auto sol = solve_lp(prog);
    ASSERT_EQ(sol.status, Status::Optimal);
    EXPECT_NEAR(sol.objective, 1 + 2 * 4, 1e-10);
    EXPECT_TRUE(verify_solution(prog, sol).ok());
}

TEST(SolveLP, SizeLimit) {
    Limits lim = default_limits;
    lim.lp_variables = 3;
    LinearProgram prog(4);
    prog.objective = {1, 1, 1, 1};
    EXPECT_THROW(solve_lp(prog, default_tolerances, lim), LimitError);
}

TEST(SolveLP, RandomAgainstVertexOracle) {
    // min c·x over a random bounded polytope in R^3: the optimum is attained at a vertex.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    for (int rep = 0; rep < 60; ++rep) {
        Polytope p;
        p.dimension = 3;
        for (std::size_t j = 0; j < 3; ++j) {
            Vector lo(3, 0.0), hi(3, 0.0);
            lo[j] = -1.0;
            hi[j] = 1.0;
            p.ineq_rows.push_back(lo);
            p.ineq_rhs.push_back(2.0);
            p.ineq_rows.push_back(hi);
            p.ineq_rhs.push_back(2.0);
        }
        for (int k = 0; k < 4; ++k) {
            p.ineq_rows.push_back({u(rng), u(rng), u(rng)});
            p.ineq_rhs.push_back(0.2 + u(rng) * 0.5);
        }
        const Vector c{u(rng), u(rng), u(rng)};
        const auto verts = enumerate_vertices(p);
        const auto prog = p.as_lp(c, Sense::Minimize);
        const auto sol = solve_lp(prog);
        if (verts.empty()) {
            EXPECT_EQ(sol.status, Status::Infeasible);
            continue;
        }
        ASSERT_EQ(sol.status, Status::Optimal);
        double best = inf;
        for (const auto& v : verts) best = std::min(best, dot(c, v));
        EXPECT_NEAR(sol.objective, best, 1e-8);
        EXPECT_TRUE(verify_solution(prog, sol).ok());
        ++checked;
    }
    EXPECT_GT(checked, 20);
}

TEST(SolveLP, RandomTransportDuality) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rep % 4);
        Vector p(n), q(n);
        double sp = 0, sq = 0;
        for (auto& v : p) sp += (v = u(rng) + 0.05);
        for (auto& v : q) sq += (v = u(rng) + 0.05);
        for (auto& v : p) v /= sp;
        for (auto& v : q) v /= sq;
        LinearProgram prog(n * n);
        for (auto& c : prog.objective) c = u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            Vector r(n * n, 0.0);
            for (std::size_t j = 0; j < n; ++j) r[i * n + j] = 1;
            prog.add_row(r, Relation::Equal, p[i]);
        }
        for (std::size_t j = 0; j < n; ++j) {
            Vector r(n * n, 0.0);
            for (std::size_t i = 0; i < n; ++i) r[i * n + j] = 1;
            prog.add_row(r, Relation::Equal, q[j]);
        }
        const auto sol = solve_lp(prog);
        ASSERT_EQ(sol.status, Status::Optimal);
        EXPECT_NEAR(sol.objective, sol.dual_objective, 1e-8);
        const auto chk = verify_solution(prog, sol);
        EXPECT_TRUE(chk.ok()) << chk.primal_residual << " " << chk.dual_residual << " " << chk.slackness_residual;
    }
}

TEST(Vertices, UnitSquare) {
    const auto v = enumerate_vertices(unit_square());
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v[0], (Vector{0, 0}));
    EXPECT_EQ(v[1], (Vector{0, 1}));
    EXPECT_EQ(v[2], (Vector{1, 0}));
    EXPECT_EQ(v[3], (Vector{1, 1}));
}

TEST(Vertices, Birkhoff2x2) {
    const auto v = enumerate_vertices(birkhoff2());
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0], (Vector{0, 1, 1, 0}));
    EXPECT_EQ(v[1], (Vector{1, 0, 0, 1}));
}

TEST(Vertices, ReconstructPolytope) {
    for (const auto& p : {unit_square(), birkhoff2()}) {
        const auto v = enumerate_vertices(p);
        for (std::size_t i = 0; i < v.size(); ++i) {
            EXPECT_TRUE(p.contains(v[i]));
            EXPECT_FALSE(in_hull_of_others(v, i));
        }
    }
}

TEST(Vertices, Errors) {
    Polytope half;
    half.dimension = 1;
    half.ineq_rows = {{-1}};
    half.ineq_rhs = {0};
    EXPECT_THROW(enumerate_vertices(half), InputError);
    Polytope big;
    big.dimension = 13;
    EXPECT_THROW(enumerate_vertices(big), LimitError);
    Polytope empty = unit_square();
    empty.ineq_rows.push_back({1, 1});
    empty.ineq_rhs.push_back(-1);
    EXPECT_TRUE(enumerate_vertices(empty).empty());
}
