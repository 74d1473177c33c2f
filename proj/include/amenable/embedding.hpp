#pragma once

// Reproducing kernels on finite carriers: Gram tables, diagonal invariance,
// the symmetrised kernel κ̄, mean embeddings in weight coordinates, MMD and the
// orbit decomposition of invariant measures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "amenable/action.hpp"
#include "amenable/averaging.hpp"
#include "amenable/config.hpp"
#include "amenable/linalg.hpp"

namespace amenable {

class KernelGram {
public:
    explicit KernelGram(Matrix table) : k_(std::move(table)) {
        if (k_.rows() != k_.cols() || k_.rows() == 0) throw InputError("KernelGram: table must be square and nonempty");
        for (std::size_t i = 0; i < k_.rows(); ++i)
            for (std::size_t j = 0; j < k_.cols(); ++j) {
                if (!std::isfinite(k_(i, j))) throw InputError("KernelGram: non-finite entry");
                if (k_(i, j) != k_(j, i)) throw InputError("KernelGram: table is not symmetric");
            }
        min_eig_ = min_eigenvalue(k_);
        if (min_eig_ < -1e-8) throw InputError("KernelGram: table is not positive semidefinite");
    }

    std::size_t size() const { return k_.rows(); }
    const Matrix& table() const { return k_; }
    double operator()(std::size_t i, std::size_t j) const { return k_(i, j); }
    double min_eigenvalue_report() const { return min_eig_; }
    /// Strict positive definiteness, i.e. p ↦ Kp is injective.
    bool characteristic() const { return min_eig_ >= 1e-8; }

private:
    Matrix k_;
    double min_eig_ = 0.0;
};

// ---- built-in kernels -----------------------------------------------------

inline KernelGram identity_kernel(std::size_t m) { return KernelGram(Matrix::identity(m)); }

/// K[i][j] = 1 when i and j share an orbit.
inline KernelGram orbit_indicator_kernel(const PointAction& action) {
    const auto lab = action.orbit_labels();
    Matrix k(lab.size(), lab.size());
    for (std::size_t i = 0; i < lab.size(); ++i)
        for (std::size_t j = 0; j < lab.size(); ++j) k(i, j) = lab[i] == lab[j] ? 1.0 : 0.0;
    return KernelGram(std::move(k));
}

using CarrierMetric = std::function<double(std::size_t, std::size_t)>;

/// Hamming distance between tuples of length k over the given alphabet
/// (same indexing as PointAction::coordinate_permutation).
inline CarrierMetric hamming_metric(std::size_t k, std::size_t alphabet) {
    return [k, alphabet](std::size_t a, std::size_t b) {
        double d = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (a % alphabet != b % alphabet) d += 1.0;
            a /= alphabet;
            b /= alphabet;
        }
        return d;
    };
}

/// Distance on Z/m.
inline CarrierMetric cyclic_metric(std::size_t m) {
    return [m](std::size_t a, std::size_t b) {
        const std::size_t d = a > b ? a - b : b - a;
        return static_cast<double>(std::min(d, m - d));
    };
}

/// K[i][j] = exp(-γ d(i,j)²).
inline KernelGram gaussian_kernel(std::size_t m, double gamma, const CarrierMetric& metric) {
    if (!(gamma > 0.0)) throw InputError("gaussian_kernel: gamma must be positive");
    Matrix k(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double d = metric(i, j);
            k(i, j) = std::exp(-gamma * d * d);
        }
    return KernelGram(std::move(k));
}

// ---- invariance -----------------------------------------------------------

struct KernelInvariance {
    bool invariant = true;
    std::size_t i = 0, j = 0;  // first violating pair
    Element element;           // first violating element
    double worst = 0.0;        // max |K[gi][gj] - K[i][j]|
};

/// Exact check of K[gi][gj] = K[i][j] over all elements and pairs.
inline KernelInvariance check_diagonal_invariance(const KernelGram& k, const PointAction& action) {
    if (k.size() != action.carrier_size()) throw InputError("check_diagonal_invariance: carrier sizes differ");
    KernelInvariance out;
    for (const auto& g : action.probe_elements()) {
        const auto p = action.permutation(g);
        for (std::size_t i = 0; i < k.size(); ++i)
            for (std::size_t j = 0; j < k.size(); ++j) {
                const double d = std::abs(k(p[i], p[j]) - k(i, j));
                if (d == 0.0) continue;
                if (out.invariant) {
                    out.invariant = false;
                    out.i = i;
                    out.j = j;
                    out.element = g;
                }
                out.worst = std::max(out.worst, d);
            }
    }
    return out;
}

struct SymmetrizedKernel {
    KernelGram kernel;
    double projector_residual = 0.0;  // max(‖κ̄ - RK‖∞, ‖κ̄ - RKRᵀ‖∞)
};

/// κ̄[i][j] = |G|⁻¹ Σ_ψ K[i][ψj], each entry summed in sorted order so that
/// κ̄ is exactly symmetric and separately invariant.
inline SymmetrizedKernel symmetrize_kernel(const KernelGram& k, const PointAction& action) {
    const auto inv = check_diagonal_invariance(k, action);
    if (!inv.invariant)
        throw InputError("symmetrize_kernel: kernel is not diagonally invariant at (" + std::to_string(inv.i) + "," +
                         std::to_string(inv.j) + ") under " + inv.element.str());
    const auto elems = action.group().elements();
    std::vector<std::vector<std::size_t>> perms;
    for (const auto& g : elems) perms.push_back(action.permutation(g));
    const std::size_t m = k.size();
    Matrix bar(m, m);
    std::vector<double> vals(perms.size());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t s = 0; s < perms.size(); ++s) vals[s] = k(i, perms[s][j]);
            bar(i, j) = sorted_mean(vals);
        }
    const Matrix r = reynolds_projector(action);
    const double res = std::max(max_abs_diff(bar, matmul(r, k.table())),
                                max_abs_diff(bar, matmul(matmul(r, k.table()), r.transpose())));
    if (res > 1e-10) throw VerificationError("symmetrize_kernel: κ̄ differs from R·K·Rᵀ");
    return SymmetrizedKernel{KernelGram(std::move(bar)), res};
}

/// Largest |κ̄[φi][ψj] - κ̄[i][j]| over all pairs of elements (0 when separately invariant).
inline double separate_invariance_defect(const KernelGram& k, const PointAction& action) {
    double worst = 0.0;
    const auto elems = action.group().elements();
    std::vector<std::vector<std::size_t>> perms;
    for (const auto& g : elems) perms.push_back(action.permutation(g));
    for (const auto& p : perms)
        for (const auto& q : perms)
            for (std::size_t i = 0; i < k.size(); ++i)
                for (std::size_t j = 0; j < k.size(); ++j)
                    worst = std::max(worst, std::abs(k(p[i], q[j]) - k(i, j)));
    return worst;
}

// ---- embeddings -----------------------------------------------------------

/// m(P) in weight coordinates; the Gram table supplies the inner product.
struct MeanEmbedding {
    Vector weights;
    Matrix gram;

    /// Function values of m(P): (K p)(i) = ∫ κ(ω_i, ·) dP.
    Vector values() const { return matvec(gram, weights); }
};

inline double inner(const MeanEmbedding& a, const MeanEmbedding& b) {
    return dot(a.weights, matvec(a.gram, b.weights));
}

inline MeanEmbedding mean_embedding(const KernelGram& k, std::span<const double> p) {
    if (p.size() != k.size()) throw InputError("mean_embedding: weight length does not match the carrier");
    require_probability(p);
    return MeanEmbedding{Vector(p.begin(), p.end()), k.table()};
}

/// sqrt((p-q)ᵀ K (p-q)); round-off down to -1e-12 is clamped.
inline double mmd(const KernelGram& k, std::span<const double> p, std::span<const double> q) {
    if (p.size() != k.size() || q.size() != k.size()) throw InputError("mmd: weight length does not match the carrier");
    require_probability(p);
    require_probability(q);
    const Vector d = sub(p, q);
    const double s = dot(d, matvec(k.table(), d));
    if (s < -1e-12) throw NumericError("mmd: negative quadratic form, kernel is not positive semidefinite");
    return std::sqrt(std::max(s, 0.0));
}

struct InvariantEmbedding {
    MeanEmbedding embedding;          // of p̄
    double commutation_residual = 0;  // ‖K p̄ - R(K p)‖∞
};

/// Embedding of the Reynolds average p̄; checks m(p̄) = R m(p) in function values.
inline InvariantEmbedding invariant_embedding(const KernelGram& k, const PointAction& action, std::span<const double> p) {
    const auto inv = check_diagonal_invariance(k, action);
    if (!inv.invariant) throw InputError("invariant_embedding: kernel is not diagonally invariant");
    auto e = mean_embedding(k, p);
    const Vector pbar = reynolds_average(action, p);
    const Vector lhs = matvec(k.table(), pbar);
    const Vector rhs = reynolds_average(action, e.values());
    const double res = max_abs_diff(lhs, rhs);
    if (res > 1e-10) throw VerificationError("invariant_embedding: embedding does not commute with averaging");
    return InvariantEmbedding{MeanEmbedding{pbar, k.table()}, res};
}

struct ErgodicDecomposition {
    std::vector<std::vector<std::size_t>> orbits;
    Vector weights;          // w_o = p(orbit o)
    bool extreme = false;    // exactly one w_o > 1e-9
    Vector reconstruction;   // Σ w_o uniform(o)
};

/// Orbit-mass decomposition p = Σ_o p(o)·uniform(o) of an invariant measure.
inline ErgodicDecomposition ergodic_decomposition(const PointAction& action, std::span<const double> p) {
    if (p.size() != action.carrier_size()) throw InputError("ergodic_decomposition: measure length does not match the carrier");
    require_probability(p);
    for (const auto& g : action.probe_elements()) {
        const auto perm = action.permutation(g);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (std::abs(p[perm[i]] - p[i]) > 1e-9)
                throw InputError("ergodic_decomposition: measure is not invariant under " + g.str());
    }
    ErgodicDecomposition out;
    out.orbits = action.orbits();
    out.reconstruction.assign(p.size(), 0.0);
    std::size_t positive = 0;
    for (const auto& o : out.orbits) {
        std::vector<double> vals;
        for (auto i : o) vals.push_back(p[i]);
        const double w = sorted_sum(vals);
        out.weights.push_back(w);
        if (w > 1e-9) ++positive;
        for (auto i : o) out.reconstruction[i] = w / static_cast<double>(o.size());
    }
    out.extreme = positive == 1;
    return out;
}

}  // namespace amenable
