#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "amenable/coupling.hpp"

using namespace amenable;

namespace {

Matrix table(std::vector<Vector> rows) { return Matrix::from_rows(rows); }

Vector random_probability(std::mt19937_64& rng, std::size_t m) {
    std::exponential_distribution<double> ed(1.0);
    Vector p(m);
    double s = 0.0;
    for (auto& v : p) s += (v = ed(rng));
    for (auto& v : p) v /= s;
    return p;
}

// Orbit masses drawn at random and spread uniformly over each orbit.
Vector random_invariant_probability(std::mt19937_64& rng, const PointAction& a) {
    const auto orbs = a.orbits();
    const Vector w = random_probability(rng, orbs.size());
    Vector p(a.carrier_size());
    for (std::size_t o = 0; o < orbs.size(); ++o)
        for (auto i : orbs[o]) p[i] = w[o] / static_cast<double>(orbs[o].size());
    return p;
}

// One random value per diagonal orbit class, found by closing each pair under the group.
Matrix random_invariant_cost(std::mt19937_64& rng, const PointAction& a1, const PointAction& a2) {
    const std::size_t n1 = a1.carrier_size(), n2 = a2.carrier_size();
    std::uniform_real_distribution<double> ud(0.0, 5.0);
    Matrix c(n1, n2);
    std::vector<bool> done(n1 * n2, false);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            if (done[i * n2 + j]) continue;
            const double v = ud(rng);
            for (const auto& g : a1.group().elements()) {
                const std::size_t gi = a1.image(g, i), gj = a2.image(g, j);
                c(gi, gj) = v;
                done[gi * n2 + gj] = true;
            }
        }
    return c;
}

// Λ_G in full coordinates P(i,j): marginals, P >= 0 and P(gi,gj) = P(i,j).
lp::Polytope invariant_coupling_polytope(const PointAction& a1, const PointAction& a2, const Vector& p1, const Vector& p2) {
    const std::size_t n1 = a1.carrier_size(), n2 = a2.carrier_size(), d = n1 * n2;
    lp::Polytope poly;
    poly.dimension = d;
    for (std::size_t i = 0; i < n1; ++i) {
        Vector r(d, 0.0);
        for (std::size_t j = 0; j < n2; ++j) r[i * n2 + j] = 1.0;
        poly.eq_rows.push_back(r);
        poly.eq_rhs.push_back(p1[i]);
    }
    for (std::size_t j = 0; j < n2; ++j) {
        Vector r(d, 0.0);
        for (std::size_t i = 0; i < n1; ++i) r[i * n2 + j] = 1.0;
        poly.eq_rows.push_back(r);
        poly.eq_rhs.push_back(p2[j]);
    }
    for (const auto& g : a1.group().generators())
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                const std::size_t k = i * n2 + j, gk = a1.image(g, i) * n2 + a2.image(g, j);
                if (k == gk) continue;
                Vector r(d, 0.0);
                r[k] = 1.0;
                r[gk] = -1.0;
                poly.eq_rows.push_back(r);
                poly.eq_rhs.push_back(0.0);
            }
    for (std::size_t k = 0; k < d; ++k) {
        Vector r(d, 0.0);
        r[k] = -1.0;
        poly.ineq_rows.push_back(r);
        poly.ineq_rhs.push_back(0.0);
    }
    return poly;
}

Matrix as_table(const Vector& v, std::size_t n1, std::size_t n2) {
    Matrix t(n1, n2);
    for (std::size_t k = 0; k < v.size(); ++k) t(k / n2, k % n2) = v[k];
    return t;
}

bool is_listed_vertex(const std::vector<Vector>& verts, const Matrix& p) {
    for (const auto& v : verts)
        if (max_abs_diff(v, p.data()) <= 1e-9) return true;
    return false;
}

double brute_force_min(const std::vector<Vector>& verts, const Matrix& c) {
    double best = lp::inf;
    for (const auto& v : verts) best = std::min(best, dot(v, c.data()));
    return best;
}

}  // namespace

TEST(CostMatrix, RejectsNegativeAndNonFinite) {
    EXPECT_THROW(CostMatrix(table({{0, -1}})), InputError);
    EXPECT_THROW(CostMatrix(table({{0, INFINITY}})), InputError);
}

TEST(CostMatrix, InvarianceFlags) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    const CostMatrix off(table({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}), z3, z3);
    EXPECT_TRUE(off.diagonally_invariant());
    EXPECT_FALSE(off.separately_invariant());
    const CostMatrix flat(table({{2, 2, 2}, {2, 2, 2}, {2, 2, 2}}), z3, z3);
    EXPECT_TRUE(flat.separately_invariant());
    const CostMatrix skew(table({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}), z3, z3);
    EXPECT_FALSE(skew.diagonally_invariant());
}

TEST(SolveMK, ZeroCost) {
    const auto s = solve_mk(CostMatrix(Matrix(2, 3)), Vector{.5, .5}, Vector{.2, .3, .5});
    EXPECT_EQ(s.primal, 0.0);
    EXPECT_LE(s.coupling.marginal_residual(), 1e-10);
}

TEST(SolveMK, SwapCostDiagonalCoupling) {
    const CostMatrix c(table({{0, 1}, {1, 0}}));
    const auto s = solve_mk(c, Vector{.5, .5}, Vector{.5, .5});
    EXPECT_NEAR(s.primal, 0.0, 1e-12);
    EXPECT_NEAR(s.coupling.table(0, 0), .5, 1e-12);
    EXPECT_NEAR(s.coupling.table(1, 1), .5, 1e-12);
    // brute force over P = [[t, .5-t], [.5-t, t]], t ∈ [0, .5]
    double best = lp::inf;
    for (int k = 0; k <= 1000; ++k) {
        const double t = 0.5 * k / 1000.0;
        best = std::min(best, 2 * (0.5 - t));
    }
    EXPECT_NEAR(s.primal, best, 1e-12);
}

TEST(SolveMK, PointMassesForceProduct) {
    const CostMatrix c(table({{3, 7}, {1, 4}}));
    const auto s = solve_mk(c, Vector{1, 0}, Vector{0, 1});
    EXPECT_NEAR(s.primal, 7.0, 1e-12);
    EXPECT_NEAR(s.coupling.table(0, 1), 1.0, 1e-12);
}

TEST(SolveMK, InfeasibleMarginalsRejected) {
    EXPECT_THROW(solve_mk(CostMatrix(Matrix(2, 2)), Vector{.5, .5}, Vector{.7, .7}), InputError);
}

TEST(SolveMK, SizeLimit) {
    Limits lim;
    lim.lp_variables = 3;
    EXPECT_THROW(solve_mk(CostMatrix(Matrix(2, 2)), Vector{.5, .5}, Vector{.5, .5}, default_tolerances, lim), LimitError);
}

TEST(SolveMK, RandomMatchesVertexEnumerationAndDuality) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ud(0.0, 3.0);
    const auto triv = [](std::size_t m) { return PointAction::trivial(trivial_group(), m); };
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n1 = 2 + rep % 2, n2 = 2 + (rep / 2) % 2;
        Matrix c(n1, n2);
        for (auto& v : c.data()) v = ud(rng);
        const Vector p1 = random_probability(rng, n1), p2 = random_probability(rng, n2);
        const auto s = solve_mk(CostMatrix(c), p1, p2);
        const auto verts = lp::enumerate_vertices(invariant_coupling_polytope(triv(n1), triv(n2), p1, p2));
        EXPECT_NEAR(s.primal, brute_force_min(verts, c), 1e-9);
        EXPECT_GE(s.primal, s.dual - 1e-9);
        EXPECT_GE(s.potentials.margin, -1e-9);
        EXPECT_TRUE(s.complementary_slackness);
        for (double v : s.coupling.table.data()) EXPECT_GE(v, 0.0);
        EXPECT_LE(s.coupling.marginal_residual(), 1e-10);
    }
}

TEST(SolveMKInvariant, CyclicDiagonalZeroCost) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    const CostMatrix c(table({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
    const Vector u{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto r = solve_mk_invariant(c, u, u, z3, z3);
    EXPECT_NEAR(r.primal, 0.0, 1e-12);
    EXPECT_NEAR(r.invariant_primal, 0.0, 1e-12);
    EXPECT_NEAR(r.invariant_dual, 0.0, 1e-12);
    EXPECT_TRUE(r.gaps_ok);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.coupling.table(i, i), 1.0 / 3, 1e-12);
    EXPECT_TRUE(r.extreme);
}

TEST(SolveMKInvariant, ProductCouplingIsInvariantAndFeasible) {
    std::mt19937_64 rng(2);
    const auto a = PointAction::natural(dihedral_group(5));
    const Vector p1 = random_invariant_probability(rng, a), p2 = random_invariant_probability(rng, a);
    Coupling prod{Matrix(5, 5), p1, p2};
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) prod.table(i, j) = p1[i] * p2[j];
    EXPECT_LE(prod.marginal_residual(), 1e-12);
    const auto s = symmetrize_coupling(prod, a, a);
    EXPECT_TRUE(s.input_invariant);
}

TEST(SolveMKInvariant, TrivialGroupMatchesUnconstrained) {
    std::mt19937_64 rng(6);
    const auto t4 = PointAction::trivial(trivial_group(), 4);
    Matrix c(4, 4);
    std::uniform_real_distribution<double> ud(0.0, 2.0);
    for (auto& v : c.data()) v = ud(rng);
    const Vector p1 = random_probability(rng, 4), p2 = random_probability(rng, 4);
    const auto r = solve_mk_invariant(CostMatrix(c), p1, p2, t4, t4);
    const auto s = solve_mk(CostMatrix(c), p1, p2);
    EXPECT_NEAR(r.invariant_primal, s.primal, 1e-9);
    EXPECT_NEAR(r.invariant_dual, s.primal, 1e-9);
    EXPECT_TRUE(r.gaps_ok);
}

TEST(SolveMKInvariant, RejectsNonInvariantInputs) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    const Vector u{1.0 / 3, 1.0 / 3, 1.0 / 3};
    EXPECT_THROW(solve_mk_invariant(CostMatrix(table({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}})), u, u, z3, z3), InputError);
    try {
        solve_mk_invariant(CostMatrix(Matrix(3, 3)), Vector{.5, .25, .25}, u, z3, z3);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("witness"), std::string::npos);
    }
}

TEST(SolveMKInvariant, RandomInstancesHaveNoGaps) {
    std::mt19937_64 rng(41);
    std::vector<Group> groups{cyclic_group(2), cyclic_group(3), cyclic_group(4), cyclic_group(5), cyclic_group(6),
                              dihedral_group(3), dihedral_group(4), dihedral_group(5), dihedral_group(6)};
    int count = 0;
    for (int rep = 0; rep < 4; ++rep)
        for (const auto& g : groups) {
            const auto a = PointAction::natural(g);
            const auto b = rep % 2 ? PointAction::natural(g) : PointAction::trivial(g, 2);
            const Matrix c = random_invariant_cost(rng, a, b);
            const Vector p1 = random_invariant_probability(rng, a), p2 = random_invariant_probability(rng, b);
            const auto r = solve_mk_invariant(CostMatrix(c), p1, p2, a, b);
            EXPECT_LE(r.gap_invariance, 1e-7) << g.name();
            EXPECT_LE(r.gap_duality, 1e-7) << g.name();
            EXPECT_GE(r.potentials.margin, -1e-9);
            EXPECT_LE(r.coupling.marginal_residual(), 1e-10);
            ++count;
        }
    EXPECT_EQ(count, 36);
}

TEST(Extremality, ProductOfUniformBitsIsNotExtreme) {
    const auto t2 = PointAction::trivial(trivial_group(), 2);
    const auto v = is_extreme_invariant_coupling(table({{.25, .25}, {.25, .25}}), t2, t2);
    EXPECT_FALSE(v.extreme);
    EXPECT_EQ(v.nullity, 1u);
    // witness ∝ (-1)^{x+y}, normalised with a positive first entry
    EXPECT_NEAR(v.witness(0, 0), .5, 1e-12);
    EXPECT_NEAR(v.witness(0, 1), -.5, 1e-12);
    EXPECT_NEAR(v.witness(1, 0), -.5, 1e-12);
    EXPECT_NEAR(v.witness(1, 1), .5, 1e-12);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(.25 * v.witness(i, 0) + .25 * v.witness(i, 1), 0.0, 1e-12);
        EXPECT_NEAR(.25 * v.witness(0, i) + .25 * v.witness(1, i), 0.0, 1e-12);
    }
}

TEST(Extremality, PermutationCouplingIsExtreme) {
    const auto t2 = PointAction::trivial(trivial_group(), 2);
    EXPECT_TRUE(is_extreme_invariant_coupling(table({{.5, 0}, {0, .5}}), t2, t2).extreme);
    const Vector u{.5, .5};
    EXPECT_EQ(lp::enumerate_vertices(invariant_coupling_polytope(t2, t2, u, u)).size(), 2u);
}

TEST(Extremality, CyclicDiagonalIsExtremeAndPolytopeHasThreeVertices) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    const double t = 1.0 / 3;
    EXPECT_TRUE(is_extreme_invariant_coupling(table({{t, 0, 0}, {0, t, 0}, {0, 0, t}}), z3, z3).extreme);
    const Vector u{t, t, t};
    EXPECT_EQ(lp::enumerate_vertices(invariant_coupling_polytope(z3, z3, u, u)).size(), 3u);
    EXPECT_EQ(lp::enumerate_vertices(invariant_transport_lp(z3, z3, u, u).polytope()).size(), 3u);
}

TEST(Extremality, RejectsNonInvariantCoupling) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    EXPECT_THROW(is_extreme_invariant_coupling(table({{.5, 0, 0}, {0, .25, 0}, {0, 0, .25}}), z3, z3), InputError);
}

// Every vertex is extreme; midpoints of distinct vertices and interior mixtures are not.
TEST(Extremality, AgreesWithVertexEnumerationOnSmallCarriers) {
    std::mt19937_64 rng(43);
    const auto z3 = cyclic_group(3);
    const auto one = trivial_group();
    auto carrier = [](const Group& g, std::size_t m) {
        return m == 3 && g.degree() == 3 ? PointAction::natural(g) : PointAction::trivial(g, m);
    };
    std::size_t instances = 0;
    for (const auto* g : {&one, &z3})
        for (std::size_t n1 = 1; n1 <= 3; ++n1)
            for (std::size_t n2 = 1; n2 <= 3; ++n2)
                for (int rep = 0; rep < 3; ++rep) {
                    const auto a1 = carrier(*g, n1), a2 = carrier(*g, n2);
                    const Vector p1 = random_invariant_probability(rng, a1), p2 = random_invariant_probability(rng, a2);
                    const auto verts = lp::enumerate_vertices(invariant_coupling_polytope(a1, a2, p1, p2));
                    ASSERT_FALSE(verts.empty());
                    for (const auto& v : verts) {
                        EXPECT_TRUE(is_extreme_invariant_coupling(as_table(v, n1, n2), a1, a2).extreme);
                        ++instances;
                    }
                    for (std::size_t x = 0; x < verts.size(); ++x)
                        for (std::size_t y = x + 1; y < verts.size(); ++y) {
                            const Matrix mid = as_table(scale(add(verts[x], verts[y]), 0.5), n1, n2);
                            EXPECT_FALSE(is_listed_vertex(verts, mid));
                            EXPECT_FALSE(is_extreme_invariant_coupling(mid, a1, a2).extreme);
                            ++instances;
                        }
                }
    EXPECT_GT(instances, 100u);
}

TEST(Symmetrize, InvariantInputUnchanged) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    const double t = 1.0 / 3;
    const Coupling q{table({{t, 0, 0}, {0, t, 0}, {0, 0, t}}), {t, t, t}, {t, t, t}};
    const auto s = symmetrize_coupling(q, z3, z3);
    EXPECT_TRUE(s.input_invariant);
    EXPECT_EQ(s.coupling.table.data(), q.table.data());
}

TEST(Symmetrize, CyclicTranspositionBecomesProduct) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    const double t = 1.0 / 3;
    const Coupling q{table({{0, t, 0}, {t, 0, 0}, {0, 0, t}}), {t, t, t}, {t, t, t}};
    EXPECT_LE(q.marginal_residual(), 1e-15);
    const auto s = symmetrize_coupling(q, z3, z3);
    EXPECT_FALSE(s.input_invariant);
    // entry (i,j) averages q(i+k, j+k) over k: each shifted transposition table hits it once
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double oracle = 0.0;
            for (std::size_t k = 0; k < 3; ++k) oracle += q.table((i + k) % 3, (j + k) % 3);
            EXPECT_NEAR(s.coupling.table(i, j), oracle / 3.0, 1e-15);
            EXPECT_NEAR(s.coupling.table(i, j), 1.0 / 9.0, 1e-15);
        }
}

TEST(Symmetrize, PreservesMarginalsAndRisk) {
    std::mt19937_64 rng(47);
    for (const auto& g : {cyclic_group(4), dihedral_group(4), symmetric_group(3)}) {
        const auto a = PointAction::natural(g);
        const std::size_t n = a.carrier_size();
        const Vector p = random_invariant_probability(rng, a);
        const auto base = solve_mk(CostMatrix(Matrix(n, n)), p, p);
        // a non-invariant coupling of invariant marginals: perturb along a cycle
        Coupling q = base.coupling;
        const double eps = std::min({q.table(0, 0), q.table(1, 1)}) / 2;
        q.table(0, 0) -= eps;
        q.table(1, 1) -= eps;
        q.table(0, 1) += eps;
        q.table(1, 0) += eps;
        const Matrix c = random_invariant_cost(rng, a, a);
        const auto s = symmetrize_coupling(q, a, a);
        EXPECT_LE(s.marginal_residual, 1e-15);
        EXPECT_NEAR(risk(CostMatrix(c), s.coupling.table), risk(CostMatrix(c), q.table), 1e-12);
        for (const auto& e : g.elements())
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    EXPECT_EQ(s.coupling.table(a.image(e, i), a.image(e, j)), s.coupling.table(i, j));
    }
}

TEST(Symmetrize, RejectsNonInvariantMarginals) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    const Coupling q{table({{.5, 0, 0}, {0, .25, 0}, {0, 0, .25}}), {.5, .25, .25}, {.5, .25, .25}};
    EXPECT_THROW(symmetrize_coupling(q, z3, z3), InputError);
}

TEST(ApproxMarginal, InvariantMarginalsReduceToInvariantProblem) {
    const auto z3 = PointAction::natural(cyclic_group(3));
    const Vector u{1.0 / 3, 1.0 / 3, 1.0 / 3};
    Matrix c(3, 3);
    for (auto& v : c.data()) v = 2.5;
    const auto r = approx_marginal_coupling(CostMatrix(c), u, u, z3, z3);
    const auto inv = solve_mk_invariant(CostMatrix(c), u, u, z3, z3);
    EXPECT_NEAR(r.primal, inv.invariant_primal, 1e-9);
    EXPECT_TRUE(r.gap_ok);
}

TEST(ApproxMarginal, ConstantCostOnSwap) {
    const auto swap = PointAction::natural(cyclic_group(2));
    const auto r = approx_marginal_coupling(CostMatrix(table({{1, 1}, {1, 1}})), Vector{.7, .3}, Vector{.4, .6}, swap, swap);
    EXPECT_NEAR(r.primal, 1.0, 1e-12);
    EXPECT_NEAR(r.invariant_dual, 1.0, 1e-12);
    EXPECT_TRUE(r.gap_ok);
}

TEST(ApproxMarginal, RejectsCostThatIsOnlyDiagonallyInvariant) {
    const auto swap = PointAction::natural(cyclic_group(2));
    EXPECT_THROW(approx_marginal_coupling(CostMatrix(table({{0, 1}, {1, 0}})), Vector{.7, .3}, Vector{.4, .6}, swap, swap),
                 InputError);
}

// Swap of {0,1} with 2 fixed: separate invariance allows one value per (orbit, orbit) block.
TEST(ApproxMarginal, BlockConstantCostHasNoGap) {
    const auto g = cyclic_group(2);
    const auto a = PointAction::from_permutations(g, 3, {{0, 1, 2}, {1, 0, 2}});
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ud(0.0, 4.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double b00 = ud(rng), b01 = ud(rng), b10 = ud(rng), b11 = ud(rng);
        const Matrix c = table({{b00, b00, b01}, {b00, b00, b01}, {b10, b10, b11}});
        const Vector q1 = random_probability(rng, 3), q2 = random_probability(rng, 3);
        const auto r = approx_marginal_coupling(CostMatrix(c), q1, q2, a, a);
        EXPECT_LE(r.gap, 1e-7);
        EXPECT_GE(r.potentials.margin, -1e-9);
        // oracle: 2x2 transport between orbit masses
        const Vector m1{q1[0] + q1[1], q1[2]}, m2{q2[0] + q2[1], q2[2]};
        const auto t = lp::enumerate_vertices(invariant_coupling_polytope(PointAction::trivial(trivial_group(), 2),
                                                                          PointAction::trivial(trivial_group(), 2), m1, m2));
        EXPECT_NEAR(r.primal, brute_force_min(t, table({{b00, b01}, {b10, b11}})), 1e-9);
    }
}
