#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "amenable/embedding.hpp"

using namespace amenable;

namespace {

PointAction bit_swap() { return PointAction::coordinate_permutation(symmetric_group(2), 2); }

Vector delta(std::size_t m, std::size_t i) {
    Vector d(m, 0.0);
    d[i] = 1.0;
    return d;
}

Vector random_probability(std::mt19937_64& rng, std::size_t m) {
    std::exponential_distribution<double> ed(1.0);
    Vector p(m);
    double s = 0.0;
    for (auto& v : p) s += (v = ed(rng));
    for (auto& v : p) v /= s;
    return p;
}

// Random PSD table averaged over the diagonal action entry by entry in sorted
// order, so invariance and symmetry hold bit for bit.
Matrix random_invariant_gram(std::mt19937_64& rng, const PointAction& a) {
    const std::size_t m = a.carrier_size();
    std::normal_distribution<double> nd;
    Matrix b(m, m);
    for (auto& v : b.data()) v = nd(rng);
    Matrix psd(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += b(i, k) * b(j, k);
            psd(i, j) = psd(j, i) = s;
        }
    const auto elems = a.group().elements();
    Matrix k(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> vals;
            for (const auto& g : elems) vals.push_back(psd(a.image(g, i), a.image(g, j)));
            k(i, j) = sorted_mean(vals);
        }
    return k;
}

// R[i][j] = |{g : g i = j}| / |G|, counted directly.
Matrix counting_projector(const PointAction& a) {
    const std::size_t m = a.carrier_size();
    const auto elems = a.group().elements();
    Matrix r(m, m);
    for (const auto& g : elems)
        for (std::size_t i = 0; i < m; ++i) r(i, a.image(g, i)) += 1.0;
    return matscale(r, 1.0 / static_cast<double>(elems.size()));
}

}  // namespace

TEST(KernelGram, RejectsInvalidTables) {
    EXPECT_THROW(KernelGram(Matrix(2, 3)), InputError);
    EXPECT_THROW(KernelGram(Matrix::from_rows({{1, 0.5}, {0.4, 1}})), InputError);
    EXPECT_THROW(KernelGram(Matrix::from_rows({{1, 2}, {2, 1}})), InputError);
    EXPECT_THROW(KernelGram(Matrix::from_rows({{1, NAN}, {NAN, 1}})), InputError);
}

TEST(KernelGram, CharacteristicFlag) {
    EXPECT_TRUE(identity_kernel(3).characteristic());
    EXPECT_FALSE(KernelGram(Matrix::from_rows({{1, 1}, {1, 1}})).characteristic());
}

TEST(DiagonalInvariance, IdentityKernelPasses) {
    EXPECT_TRUE(check_diagonal_invariance(identity_kernel(4), bit_swap()).invariant);
    const auto c5 = PointAction::natural(cyclic_group(5));
    EXPECT_TRUE(check_diagonal_invariance(identity_kernel(5), c5).invariant);
}

TEST(DiagonalInvariance, UnequalDiagonalFailsAtOrigin) {
    const auto swap = PointAction::natural(symmetric_group(2));
    const KernelGram k(Matrix::from_rows({{2, 0}, {0, 1}}));
    const auto r = check_diagonal_invariance(k, swap);
    EXPECT_FALSE(r.invariant);
    EXPECT_EQ(r.i, 0u);
    EXPECT_EQ(r.j, 0u);
    EXPECT_DOUBLE_EQ(r.worst, 1.0);
}

TEST(DiagonalInvariance, OrbitIndicatorPasses) {
    const auto a = bit_swap();
    const auto k = orbit_indicator_kernel(a);
    EXPECT_TRUE(check_diagonal_invariance(k, a).invariant);
    EXPECT_EQ(k(1, 2), 1.0);
    EXPECT_EQ(k(0, 3), 0.0);
}

TEST(DiagonalInvariance, HammingGaussianUnderCoordinatePermutation) {
    const auto a = PointAction::coordinate_permutation(symmetric_group(3), 2);
    EXPECT_TRUE(check_diagonal_invariance(gaussian_kernel(8, 1.5, hamming_metric(3, 2)), a).invariant);
    const auto c = PointAction::natural(cyclic_group(6));
    EXPECT_TRUE(check_diagonal_invariance(gaussian_kernel(6, 0.3, cyclic_metric(6)), c).invariant);
}

// exp(-γ d²) of the Hamming distance on {0,1}³ is indefinite for small γ.
TEST(KernelGram, IndefiniteGaussianRejected) {
    EXPECT_THROW(gaussian_kernel(8, 0.5, hamming_metric(3, 2)), InputError);
    EXPECT_THROW(gaussian_kernel(5, 0.3, cyclic_metric(5)), InputError);
}

TEST(Symmetrize, TrivialGroupIsIdentity) {
    std::mt19937_64 rng(3);
    const auto a = PointAction::trivial(trivial_group(), 4);
    const KernelGram k(random_invariant_gram(rng, a));
    const auto s = symmetrize_kernel(k, a);
    EXPECT_EQ(s.kernel.table().data(), k.table().data());
}

TEST(Symmetrize, SwapOfIdentity) {
    const auto swap = PointAction::natural(symmetric_group(2));
    const auto s = symmetrize_kernel(identity_kernel(2), swap);
    for (double v : s.kernel.table().data()) EXPECT_EQ(v, 0.5);
    EXPECT_NEAR(s.kernel.min_eigenvalue_report(), 0.0, 1e-12);
}

TEST(Symmetrize, BitSwapOfIdentity) {
    const auto s = symmetrize_kernel(identity_kernel(4), bit_swap());
    const Matrix expected = Matrix::from_rows({{1, 0, 0, 0}, {0, .5, .5, 0}, {0, .5, .5, 0}, {0, 0, 0, 1}});
    EXPECT_EQ(s.kernel.table().data(), expected.data());
}

TEST(Symmetrize, RejectsNonInvariantKernel) {
    const auto swap = PointAction::natural(symmetric_group(2));
    EXPECT_THROW(symmetrize_kernel(KernelGram(Matrix::from_rows({{2, 0}, {0, 1}})), swap), InputError);
}

TEST(Symmetrize, MatchesProjectorSandwichAndIsSeparatelyInvariant) {
    std::mt19937_64 rng(11);
    const std::vector<PointAction> actions{
        PointAction::natural(cyclic_group(5)), PointAction::natural(dihedral_group(4)),
        PointAction::natural(symmetric_group(3)), PointAction::coordinate_permutation(symmetric_group(3), 2)};
    for (const auto& a : actions)
        for (int rep = 0; rep < 5; ++rep) {
            const KernelGram k(random_invariant_gram(rng, a));
            const auto s = symmetrize_kernel(k, a);
            const Matrix r = counting_projector(a);
            EXPECT_LE(max_abs_diff(s.kernel.table(), matmul(matmul(r, k.table()), r.transpose())), 1e-10);
            EXPECT_EQ(separate_invariance_defect(s.kernel, a), 0.0);
            EXPECT_GE(s.kernel.min_eigenvalue_report(), -1e-8);
        }
}

// An invariant f = κ̄a satisfies ⟨f, κ̄ e_i⟩ computed in κ̄-coordinates, i.e. aᵀ κ̄ e_i = f[i].
TEST(Symmetrize, ReproducesInvariantFunctions) {
    std::mt19937_64 rng(5);
    const auto a = PointAction::natural(dihedral_group(4));
    const auto s = symmetrize_kernel(KernelGram(random_invariant_gram(rng, a)), a);
    std::normal_distribution<double> nd;
    Vector coeff(4);
    for (auto& v : coeff) v = nd(rng);
    const Vector f = matvec(s.kernel.table(), coeff);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(f[i], f[0], 1e-12);
        EXPECT_NEAR(dot(coeff, s.kernel.table().column(i)), f[i], 1e-9);
    }
}

TEST(MeanEmbedding, IdentityGram) {
    const auto e = mean_embedding(identity_kernel(2), Vector{.5, .5});
    EXPECT_EQ(e.values(), (Vector{.5, .5}));
}

TEST(MeanEmbedding, PointMassGivesFeatureColumn) {
    const auto k = gaussian_kernel(5, 0.4, cyclic_metric(5));
    const auto e = mean_embedding(k, delta(5, 0));
    EXPECT_EQ(e.values(), k.table().column(0));
}

TEST(MeanEmbedding, RejectsNonProbability) {
    EXPECT_THROW(mean_embedding(identity_kernel(2), Vector{.7, .7}), InputError);
    EXPECT_THROW(mean_embedding(identity_kernel(2), Vector{1.5, -.5}), InputError);
}

TEST(MeanEmbedding, EquivariantUnderDiagonallyInvariantKernel) {
    std::mt19937_64 rng(8);
    const auto a = PointAction::natural(cyclic_group(6));
    const auto k = gaussian_kernel(6, 0.5, cyclic_metric(6));
    for (int rep = 0; rep < 10; ++rep) {
        const Vector p = random_probability(rng, 6);
        for (const auto& g : a.group().elements()) {
            const Vector lhs = mean_embedding(k, a.apply(g, p)).values();
            const Vector rhs = a.apply(g, mean_embedding(k, p).values());
            EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);
        }
    }
}

TEST(MeanEmbedding, CharacteristicKernelIsInjective) {
    std::mt19937_64 rng(9);
    const auto k = gaussian_kernel(6, 1.0, cyclic_metric(6));
    ASSERT_TRUE(k.characteristic());
    for (int rep = 0; rep < 20; ++rep) {
        const Vector p = random_probability(rng, 6), q = random_probability(rng, 6);
        const Vector d = sub(mean_embedding(k, p).values(), mean_embedding(k, q).values());
        EXPECT_GT(norm_inf(d), 1e-9);
        EXPECT_EQ(norm_inf(sub(mean_embedding(k, p).values(), mean_embedding(k, p).values())), 0.0);
    }
}

TEST(Mmd, Examples) {
    EXPECT_EQ(mmd(identity_kernel(3), Vector{.2, .3, .5}, Vector{.2, .3, .5}), 0.0);
    EXPECT_NEAR(mmd(identity_kernel(2), Vector{1, 0}, Vector{0, 1}), std::sqrt(2.0), 1e-15);
}

TEST(Mmd, TriangleInequality) {
    std::mt19937_64 rng(13);
    const auto k = gaussian_kernel(7, 0.6, cyclic_metric(7));
    for (int rep = 0; rep < 100; ++rep) {
        const Vector p = random_probability(rng, 7), q = random_probability(rng, 7), r = random_probability(rng, 7);
        EXPECT_LE(mmd(k, p, r), mmd(k, p, q) + mmd(k, q, r) + 1e-10);
    }
}

// MMD² is the quadratic form of p - q, so mixing p with r scales the difference.
TEST(Mmd, BilinearityOfMixtures) {
    std::mt19937_64 rng(17);
    const auto k = gaussian_kernel(5, 0.8, cyclic_metric(5));
    for (int rep = 0; rep < 20; ++rep) {
        const Vector p = random_probability(rng, 5), q = random_probability(rng, 5);
        const double t = 0.3;
        Vector mix(5);
        for (std::size_t i = 0; i < 5; ++i) mix[i] = t * p[i] + (1 - t) * q[i];
        EXPECT_NEAR(mmd(k, mix, q), t * mmd(k, p, q), 1e-10);
        const double lhs = std::pow(mmd(k, p, q), 2);
        const auto ep = mean_embedding(k, p), eq = mean_embedding(k, q);
        EXPECT_NEAR(lhs, inner(ep, ep) - 2 * inner(ep, eq) + inner(eq, eq), 1e-10);
    }
}

TEST(Mmd, NegativeFormRejected) {
    // A Gram table accepted within the PSD slack but with a clearly negative form.
    const KernelGram k(Matrix::from_rows({{1, 1.000000001}, {1.000000001, 1}}));
    EXPECT_THROW(mmd(k, Vector{1, 0}, Vector{0, 1}), NumericError);
}

TEST(InvariantEmbedding, Examples) {
    const auto a = bit_swap();
    const auto k = identity_kernel(4);
    const Vector p{.25, .25, .25, .25};
    EXPECT_EQ(invariant_embedding(k, a, p).embedding.weights, p);
    EXPECT_EQ(invariant_embedding(k, a, delta(4, 1)).embedding.weights, (Vector{0, .5, .5, 0}));
}

TEST(InvariantEmbedding, AveragingContractsMmd) {
    std::mt19937_64 rng(23);
    const auto a = PointAction::natural(dihedral_group(5));
    const auto k = gaussian_kernel(5, 0.5, cyclic_metric(5));
    for (int rep = 0; rep < 30; ++rep) {
        const Vector p = random_probability(rng, 5), q = random_probability(rng, 5);
        const auto ep = invariant_embedding(k, a, p), eq = invariant_embedding(k, a, q);
        EXPECT_LE(ep.commutation_residual, 1e-10);
        EXPECT_LE(mmd(k, ep.embedding.weights, eq.embedding.weights), mmd(k, p, q) + 1e-10);
    }
}

TEST(ErgodicDecomposition, UniformOnBitPairs) {
    const auto d = ergodic_decomposition(bit_swap(), Vector{.25, .25, .25, .25});
    ASSERT_EQ(d.orbits.size(), 3u);
    EXPECT_EQ(d.orbits[1], (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(d.weights, (Vector{.25, .5, .25}));
    EXPECT_FALSE(d.extreme);
    EXPECT_EQ(d.reconstruction, (Vector{.25, .25, .25, .25}));
}

TEST(ErgodicDecomposition, OrbitUniformIsExtreme) {
    const auto d = ergodic_decomposition(bit_swap(), Vector{0, .5, .5, 0});
    EXPECT_TRUE(d.extreme);
    EXPECT_EQ(d.weights, (Vector{0, 1, 0}));
}

TEST(ErgodicDecomposition, TrivialGroupOnlyPointMassesExtreme) {
    const auto a = PointAction::trivial(trivial_group(), 3);
    EXPECT_TRUE(ergodic_decomposition(a, delta(3, 2)).extreme);
    EXPECT_FALSE(ergodic_decomposition(a, Vector{.5, .5, 0}).extreme);
}

TEST(ErgodicDecomposition, RejectsNonInvariant) {
    EXPECT_THROW(ergodic_decomposition(bit_swap(), delta(4, 1)), InputError);
}

// For an extreme P (orbit-uniform) and invariant f = κ̄a, ⟨m(P), f⟩ equals f on the orbit.
TEST(ErgodicDecomposition, ExtremeEmbeddingEvaluatesInvariantFunctions) {
    std::mt19937_64 rng(29);
    const auto a = PointAction::coordinate_permutation(symmetric_group(3), 2);
    const auto kbar = symmetrize_kernel(KernelGram(random_invariant_gram(rng, a)), a).kernel;
    std::normal_distribution<double> nd;
    Vector coeff(8);
    for (auto& v : coeff) v = nd(rng);
    const Vector f = matvec(kbar.table(), coeff);
    for (const auto& orb : a.orbits()) {
        Vector p(8, 0.0);
        for (auto i : orb) p[i] = 1.0 / static_cast<double>(orb.size());
        ASSERT_TRUE(ergodic_decomposition(a, p).extreme);
        EXPECT_NEAR(dot(p, f), f[orb.front()], 1e-12);
    }
}
