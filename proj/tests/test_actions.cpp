#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "amenable/action.hpp"

using namespace amenable;

namespace {

Vector random_vector(std::mt19937_64& rng, std::size_t d) {
    std::normal_distribution<double> nd;
    Vector v(d);
    for (auto& x : v) x = nd(rng);
    return v;
}

// S_2 swapping the two bits of {0,1}^2, tuple index 2*w1 + w2.
PointAction bit_swap() { return PointAction::coordinate_permutation(symmetric_group(2), 2); }

}  // namespace

TEST(Act, SwapOnMeasureAndFunction) {
    const auto g = cyclic_group(2);
    const auto a = PointAction::natural(g);
    const Element swap = g.elements().back();
    EXPECT_EQ(act(a, swap, Vector{1, 0}, ActMode::Measure), (Vector{0, 1}));
    EXPECT_EQ(act(a, swap, Vector{3, 7}, ActMode::Function), (Vector{7, 3}));
    EXPECT_THROW(act(a, swap, Vector{0.5, 0.6}, ActMode::Measure), InputError);
}

TEST(Act, RotationByOneRadian) {
    const auto z = integer_lattice(1);
    const auto rot = LinearAction::rotation(z, 1.0);
    const auto y = act(rot, Element({1}), Vector{1, 0});
    EXPECT_NEAR(y[0], std::cos(1.0), 1e-15);
    EXPECT_NEAR(y[1], std::sin(1.0), 1e-15);
    EXPECT_TRUE(rot.orthogonal());
    EXPECT_THROW(act(rot, Element({1}), Vector{1, 0}, ActMode::Measure), InputError);
}

TEST(Act, CompositionLawExhaustive) {
    std::mt19937_64 rng(3);
    for (const char* spec : {"cyclic:5", "dihedral:4", "sym:3"}) {
        const auto g = parse_group(spec);
        const auto lin = LinearAction::permutation_representation(g);
        const auto pt = PointAction::natural(g);
        for (const auto& a : g.elements())
            for (const auto& b : g.elements()) {
                const Vector x = random_vector(rng, lin.dim());
                EXPECT_LE(max_abs_diff(act(lin, a, act(lin, b, x)), act(lin, g.compose(a, b), x)), 1e-10);
                EXPECT_EQ(act(pt, a, act(pt, b, x)), act(pt, g.compose(a, b), x));
            }
    }
}

TEST(Act, MeasureModePreservesMass) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto g = dihedral_group(5);
    const auto pt = PointAction::natural(g);
    for (int rep = 0; rep < 20; ++rep) {
        Vector p(5);
        double s = 0.0;
        for (auto& v : p) s += (v = u(rng));
        for (auto& v : p) v /= s;
        for (const auto& e : g.elements()) {
            const auto q = act(pt, e, p, ActMode::Measure);
            double t = 0.0;
            for (double v : q) {
                EXPECT_GE(v, 0.0);
                t += v;
            }
            EXPECT_NEAR(t, 1.0, 1e-12);
        }
    }
}

TEST(Action, RejectsNonHomomorphism) {
    const auto g = cyclic_group(3);
    // every non-identity element mapped to the same swap table
    EXPECT_THROW(LinearAction(g, 2,
                              [&](const Element& e) {
                                  if (e == g.identity()) return Matrix::identity(2);
                                  return Matrix::from_rows({{0, 1}, {1, 0}});
                              }),
                 InputError);
}

TEST(DualAction, OrthogonalEqualsOriginal) {
    const auto g = dihedral_group(4);
    const auto lin = LinearAction::permutation_representation(g);
    const auto dual = dual_action(lin);
    for (const auto& e : g.elements()) EXPECT_LE(max_abs_diff(dual.matrix(e), lin.matrix(e)), 1e-15);
}

TEST(DualAction, TrivialGroup) {
    const auto lin = LinearAction::trivial(trivial_group(), 3);
    const auto dual = dual_action(lin);
    EXPECT_EQ(dual.matrix(trivial_group().identity()), Matrix::identity(3));
}

TEST(DualAction, DiagonalScaling) {
    // Z acting by diag(2, 1/2); the inverse-transpose is diag(1/2, 2).
    const auto z = integer_lattice(1);
    const auto lin = LinearAction::lattice(z, {Matrix::from_rows({{2, 0}, {0, 0.5}})});
    EXPECT_FALSE(lin.orthogonal());
    const auto dual = dual_action(lin);
    const auto d1 = dual.matrix(Element({1}));
    EXPECT_DOUBLE_EQ(d1(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(d1(1, 1), 2.0);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const Element t({static_cast<std::int64_t>(k % 7) - 3});
        const Vector x = random_vector(rng, 2), y = random_vector(rng, 2);
        EXPECT_NEAR(dot(lin.apply(t, x), dual.apply(t, y)), dot(x, y), 1e-9);
    }
}

TEST(DualAction, PairingProbesRandomFinite) {
    std::mt19937_64 rng(9);
    const auto g = cyclic_group(4);
    // conjugate the permutation representation by a fixed invertible table
    const Matrix s = Matrix::from_rows({{2, 1, 0, 0}, {0, 1, 0, 1}, {1, 0, 3, 0}, {0, 0, 1, 1}});
    const Matrix si = inverse(s);
    const auto base = LinearAction::permutation_representation(g);
    const LinearAction lin(g, 4, [&](const Element& e) { return matmul(matmul(s, base.matrix(e)), si); });
    const auto dual = dual_action(lin);
    const auto elems = g.elements();
    for (int k = 0; k < 100; ++k) {
        const auto& e = elems[static_cast<std::size_t>(k) % elems.size()];
        const Vector x = random_vector(rng, 4), y = random_vector(rng, 4);
        EXPECT_NEAR(dot(act(lin, e, x), act(dual, e, y)), dot(x, y), 1e-9);
    }
}

TEST(InvariantSubspace, SwapOnPlane) {
    const auto basis = invariant_subspace_basis(LinearAction::permutation_representation(cyclic_group(2)));
    ASSERT_EQ(basis.size(), 1u);
    const double s = basis[0][0] > 0 ? 1.0 : -1.0;
    EXPECT_NEAR(s * basis[0][0], 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(s * basis[0][1], 1 / std::sqrt(2.0), 1e-12);
}

TEST(InvariantSubspace, TrivialGroupFullSpace) {
    const auto basis = invariant_subspace_basis(LinearAction::trivial(trivial_group(), 3));
    ASSERT_EQ(basis.size(), 3u);
    Matrix gram(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) gram(i, j) = dot(basis[i], basis[j]);
    EXPECT_LE(max_abs_diff(gram, Matrix::identity(3)), 1e-10);
}

TEST(InvariantSubspace, CyclicRotationMatchesNullspace) {
    const auto g = cyclic_group(3);
    const auto lin = LinearAction::permutation_representation(g);
    const auto basis = invariant_subspace_basis(lin);
    ASSERT_EQ(basis.size(), 1u);
    // oracle: null space of ρ(gen) - I by elimination
    const Matrix m = matsub(lin.matrix(g.generators().front()), Matrix::identity(3));
    const auto null = nullspace(m);
    ASSERT_EQ(null.size(), 1u);
    const Vector n0 = scale(null[0], 1.0 / norm2(null[0]));
    EXPECT_NEAR(std::abs(dot(n0, basis[0])), 1.0, 1e-12);
    for (double v : basis[0]) EXPECT_NEAR(std::abs(v), 1 / std::sqrt(3.0), 1e-12);
}

TEST(InvariantSubspace, BasisIsFixedAndOrthonormal) {
    for (const char* spec : {"dihedral:4", "sym:4", "product(cyclic:2,cyclic:3)"}) {
        const auto g = parse_group(spec);
        const auto lin = LinearAction::permutation_representation(g);
        const auto basis = invariant_subspace_basis(lin);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (const auto& e : g.elements()) EXPECT_LE(max_abs_diff(lin.apply(e, basis[i]), basis[i]), 1e-9);
            for (std::size_t j = 0; j < basis.size(); ++j) EXPECT_NEAR(dot(basis[i], basis[j]), i == j ? 1.0 : 0.0, 1e-10);
        }
        // dimension equals the number of point orbits
        EXPECT_EQ(basis.size(), PointAction::natural(g).orbits().size()) << spec;
    }
}

TEST(Orbit, CyclicShiftOfBasisVector) {
    const auto lin = LinearAction::permutation_representation(cyclic_group(3));
    auto pts = orbit(lin, Vector{1, 0, 0});
    ASSERT_EQ(pts.size(), 3u);
    std::sort(pts.begin(), pts.end());
    EXPECT_EQ(pts[0], (Vector{0, 0, 1}));
    EXPECT_EQ(pts[1], (Vector{0, 1, 0}));
    EXPECT_EQ(pts[2], (Vector{1, 0, 0}));
}

TEST(Orbit, BitSwapOrbits) {
    const auto a = bit_swap();
    EXPECT_EQ(orbit(a, 1), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(orbit(a, 0), (std::vector<std::size_t>{0}));
    EXPECT_EQ(orbit(a, 3), (std::vector<std::size_t>{3}));
    const auto orbs = a.orbits();
    EXPECT_EQ(orbs.size(), 3u);
}

TEST(Orbit, TrivialGroupSingleton) {
    const auto lin = LinearAction::trivial(trivial_group(), 2);
    EXPECT_EQ(orbit(lin, Vector{0.3, -2}).size(), 1u);
}

TEST(Orbit, ClosedAndPartition) {
    const auto g = dihedral_group(6);
    const auto a = PointAction::natural(g);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto oi = orbit(a, i);
        for (const auto& e : g.elements())
            for (auto j : oi) EXPECT_TRUE(std::binary_search(oi.begin(), oi.end(), a.image(e, j)));
        for (std::size_t j = 0; j < 6; ++j) {
            const auto oj = orbit(a, j);
            const bool same = oi == oj;
            bool disjoint = true;
            for (auto v : oj)
                if (std::binary_search(oi.begin(), oi.end(), v)) disjoint = false;
            EXPECT_TRUE(same || disjoint);
        }
    }
}

TEST(Orbit, WindowedNeedsWindow) {
    const auto rot = LinearAction::rotation(integer_lattice(1), 1.0);
    EXPECT_THROW(orbit(rot, Vector{1, 0}), InputError);
    EXPECT_EQ(orbit(rot, Vector{1, 0}, 3).size(), 4u);
}
