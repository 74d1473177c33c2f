#pragma once

// Linear actions on R^d, permutation actions on finite carriers, and the
// function/measure actions they induce.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "amenable/config.hpp"
#include "amenable/group.hpp"
#include "amenable/linalg.hpp"

namespace amenable {

/// ρ: G -> GL(d). Finite groups have every table materialised at construction.
class LinearAction {
public:
    using RepFn = std::function<Matrix(const Element&)>;

    LinearAction(Group group, std::size_t dim, RepFn rep) : group_(std::move(group)), dim_(dim), rep_(std::move(rep)) {
        if (dim_ == 0) throw InputError("LinearAction: dimension must be >= 1");
        if (dim_ > default_limits.dense_dimension) throw LimitError("LinearAction: dimension exceeds the limit");
        if (group_.finite()) {
            auto cache = std::make_shared<std::map<Element, Matrix>>();
            for (const auto& g : group_.elements()) cache->emplace(g, check_shape(rep_(g)));
            cache_ = std::move(cache);
        }
        validate();
    }

    /// One table per element, in the group's canonical element order.
    static LinearAction from_tables(const Group& group, std::size_t dim, const std::vector<Matrix>& tables) {
        const auto elems = group.elements();
        if (tables.size() != elems.size()) throw InputError("LinearAction: need one table per group element");
        auto m = std::make_shared<std::map<Element, Matrix>>();
        for (std::size_t k = 0; k < elems.size(); ++k) m->emplace(elems[k], tables[k]);
        return LinearAction(group, dim, [m](const Element& g) { return m->at(g); });
    }

    /// Coordinate permutation (ρ(g)x)_{g(i)} = x_i on R^degree.
    static LinearAction permutation_representation(const Group& group) {
        const std::size_t d = group.degree();
        if (d == 0) throw InputError("permutation_representation: group has no permutation presentation");
        return LinearAction(group, d, [d](const Element& g) {
            Matrix m(d, d);
            for (std::size_t i = 0; i < d; ++i) m(static_cast<std::size_t>(g[i]), i) = 1.0;
            return m;
        });
    }

    static LinearAction trivial(const Group& group, std::size_t dim) {
        return LinearAction(group, dim, [dim](const Element&) { return Matrix::identity(dim); });
    }

    /// Z^d acting through commuting generator tables: ρ(t) = Π_i M_i^{t_i}.
    static LinearAction lattice(const Group& group, std::vector<Matrix> generators) {
        if (generators.empty()) throw InputError("lattice action: need at least one generator table");
        const std::size_t dim = generators.front().rows();
        if (group.identity().size() != generators.size())
            throw InputError("lattice action: one generator table per lattice coordinate");
        for (const auto& g : generators)
            if (g.rows() != dim || g.cols() != dim) throw InputError("lattice action: generator tables must be square");
        return LinearAction(group, dim, [gens = std::move(generators), dim](const Element& t) {
            Matrix m = Matrix::identity(dim);
            for (std::size_t i = 0; i < gens.size(); ++i)
                if (t[i] != 0) m = matmul(m, matpow(gens[i], t[i]));
            return m;
        });
    }

    /// Z acting on R^2 by rotation through `angle` radians per unit shift.
    static LinearAction rotation(const Group& z, double angle) {
        Matrix r(2, 2);
        r(0, 0) = std::cos(angle);
        r(0, 1) = -std::sin(angle);
        r(1, 0) = std::sin(angle);
        r(1, 1) = std::cos(angle);
        return lattice(z, {r});
    }

    /// The Heisenberg group acting on R^3 by its defining unipotent matrices.
    static LinearAction heisenberg_defining(const Group& heis) {
        return LinearAction(heis, 3, [](const Element& g) {
            Matrix m = Matrix::identity(3);
            m(0, 1) = static_cast<double>(g[0]);
            m(0, 2) = static_cast<double>(g[1]);
            m(1, 2) = static_cast<double>(g[2]);
            return m;
        });
    }

    const Group& group() const { return group_; }
    std::size_t dim() const { return dim_; }
    bool orthogonal() const { return orthogonal_; }

    Matrix matrix(const Element& g) const {
        if (cache_) {
            auto it = cache_->find(g);
            if (it == cache_->end()) throw InputError("LinearAction: element not in group " + group_.name());
            return it->second;
        }
        return check_shape(rep_(g));
    }

    Vector apply(const Element& g, std::span<const double> x) const {
        if (x.size() != dim_) throw InputError("act: dimension mismatch");
        if (cache_) {
            auto it = cache_->find(g);
            if (it == cache_->end()) throw InputError("LinearAction: element not in group " + group_.name());
            return matvec(it->second, x);
        }
        return matvec(rep_(g), x);
    }

    /// Elements used for exhaustive (finite) or sampled (windowed) checks.
    std::vector<Element> probe_elements() const {
        if (group_.finite()) return group_.elements();
        auto out = group_.generators();
        for (const auto& g : group_.generators()) out.push_back(group_.inverse(g));
        for (const auto& g : group_.impl().window(1)) out.push_back(g);
        return out;
    }

private:
    Matrix check_shape(Matrix m) const {
        if (m.rows() != dim_ || m.cols() != dim_) throw InputError("LinearAction: representation table has wrong shape");
        return m;
    }

    void validate() {
        const double tol = 1e-9;
        if (max_abs_diff(matrix(group_.identity()), Matrix::identity(dim_)) > 1e-10)
            throw InputError("LinearAction: identity does not map to the identity table");
        const auto probes = probe_elements();
        for (const auto& g : probes) {
            const Matrix rg = matrix(g);
            for (const auto& h : probes) {
                const Matrix lhs = matrix(group_.compose(g, h));
                const Matrix rhs = matmul(rg, matrix(h));
                const double scale = std::max(1.0, norm_inf(rhs.data()));
                if (max_abs_diff(lhs, rhs) > tol * scale)
                    throw InputError("LinearAction: rho(gh) != rho(g) rho(h) for g=" + g.str() + ", h=" + h.str());
            }
        }
        orthogonal_ = true;
        for (const auto& g : probes) {
            const Matrix rg = matrix(g);
            if (max_abs_diff(matmul(rg.transpose(), rg), Matrix::identity(dim_)) > 1e-10) {
                orthogonal_ = false;
                break;
            }
        }
    }

    Group group_;
    std::size_t dim_;
    RepFn rep_;
    std::shared_ptr<const std::map<Element, Matrix>> cache_;
    bool orthogonal_ = false;
};

/// A group acting on a finite carrier {0..m-1} by permutations.
class PointAction {
public:
    using PermFn = std::function<std::vector<std::size_t>(const Element&)>;

    PointAction(Group group, std::size_t carrier, PermFn fn) : group_(std::move(group)), m_(carrier), fn_(std::move(fn)) {
        if (m_ == 0) throw InputError("PointAction: carrier must be nonempty");
        if (group_.finite()) {
            auto cache = std::make_shared<std::map<Element, std::vector<std::size_t>>>();
            for (const auto& g : group_.elements()) cache->emplace(g, checked(fn_(g)));
            cache_ = std::move(cache);
        }
        validate();
    }

    /// A permutation group acting on its own points.
    static PointAction natural(const Group& group) {
        const std::size_t d = group.degree();
        if (d == 0) throw InputError("PointAction::natural: group has no permutation presentation");
        return PointAction(group, d, [d](const Element& g) {
            std::vector<std::size_t> p(d);
            for (std::size_t i = 0; i < d; ++i) p[i] = static_cast<std::size_t>(g[i]);
            return p;
        });
    }

    static PointAction trivial(const Group& group, std::size_t carrier) {
        return PointAction(group, carrier, [carrier](const Element&) {
            std::vector<std::size_t> p(carrier);
            std::iota(p.begin(), p.end(), std::size_t{0});
            return p;
        });
    }

    /// A permutation group of degree k permuting the coordinates of tuples in
    /// {0..alphabet-1}^k; tuple (w_1..w_k) has index Σ w_i alphabet^(k-i).
    static PointAction coordinate_permutation(const Group& group, std::size_t alphabet) {
        const std::size_t k = group.degree();
        if (k == 0) throw InputError("coordinate_permutation: group has no permutation presentation");
        if (alphabet == 0) throw InputError("coordinate_permutation: empty alphabet");
        std::size_t m = 1;
        for (std::size_t i = 0; i < k; ++i) {
            m *= alphabet;
            if (m > default_limits.dense_dimension) throw LimitError("coordinate_permutation: carrier too large");
        }
        return PointAction(group, m, [k, alphabet, m](const Element& g) {
            std::vector<std::size_t> p(m);
            std::vector<std::size_t> digits(k), moved(k);
            for (std::size_t idx = 0; idx < m; ++idx) {
                std::size_t r = idx;
                for (std::size_t i = k; i-- > 0;) {
                    digits[i] = r % alphabet;
                    r /= alphabet;
                }
                for (std::size_t i = 0; i < k; ++i) moved[static_cast<std::size_t>(g[i])] = digits[i];
                std::size_t out = 0;
                for (std::size_t i = 0; i < k; ++i) out = out * alphabet + moved[i];
                p[idx] = out;
            }
            return p;
        });
    }

    /// One image table per element, in the group's canonical element order.
    static PointAction from_permutations(const Group& group, std::size_t carrier,
                                         const std::vector<std::vector<std::size_t>>& perms) {
        const auto elems = group.elements();
        if (perms.size() != elems.size()) throw InputError("PointAction: need one permutation per group element");
        auto m = std::make_shared<std::map<Element, std::vector<std::size_t>>>();
        for (std::size_t k = 0; k < elems.size(); ++k) m->emplace(elems[k], perms[k]);
        return PointAction(group, carrier, [m](const Element& g) { return m->at(g); });
    }

    const Group& group() const { return group_; }
    std::size_t carrier_size() const { return m_; }
    std::size_t dim() const { return m_; }

    std::vector<std::size_t> permutation(const Element& g) const {
        if (cache_) {
            auto it = cache_->find(g);
            if (it == cache_->end()) throw InputError("PointAction: element not in group " + group_.name());
            return it->second;
        }
        return checked(fn_(g));
    }

    std::size_t image(const Element& g, std::size_t i) const { return permutation(g)[i]; }

    /// Re-indexing (φh)(φ(i)) = h(i); this is both h∘φ⁻¹ and the pushforward p∘φ⁻¹.
    Vector apply(const Element& g, std::span<const double> x) const {
        if (x.size() != m_) throw InputError("act: table length does not match the carrier");
        const auto p = permutation(g);
        Vector out(m_);
        for (std::size_t i = 0; i < m_; ++i) out[p[i]] = x[i];
        return out;
    }

    /// The 0-1 table of the induced linear action on R^carrier.
    Matrix matrix(const Element& g) const {
        const auto p = permutation(g);
        Matrix t(m_, m_);
        for (std::size_t i = 0; i < m_; ++i) t(p[i], i) = 1.0;
        return t;
    }

    LinearAction linear() const {
        auto self = *this;
        return LinearAction(group_, m_, [self](const Element& g) { return self.matrix(g); });
    }

    std::vector<Element> probe_elements() const {
        if (group_.finite()) return group_.elements();
        auto out = group_.generators();
        for (const auto& g : group_.impl().window(1)) out.push_back(g);
        return out;
    }

    /// Orbit partition of the carrier (finite groups); orbits sorted, ordered by least point.
    std::vector<std::vector<std::size_t>> orbits() const {
        const auto elems = group_.elements();
        std::vector<int> label(m_, -1);
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < m_; ++i) {
            if (label[i] >= 0) continue;
            std::vector<std::size_t> orb;
            for (const auto& g : elems) {
                const std::size_t j = image(g, i);
                if (label[j] < 0) {
                    label[j] = static_cast<int>(out.size());
                    orb.push_back(j);
                }
            }
            std::sort(orb.begin(), orb.end());
            out.push_back(std::move(orb));
        }
        return out;
    }

    /// orbit_label()[i] = index of the orbit containing i.
    std::vector<std::size_t> orbit_labels() const {
        std::vector<std::size_t> lab(m_);
        const auto orbs = orbits();
        for (std::size_t k = 0; k < orbs.size(); ++k)
            for (auto i : orbs[k]) lab[i] = k;
        return lab;
    }

private:
    std::vector<std::size_t> checked(std::vector<std::size_t> p) const {
        if (p.size() != m_) throw InputError("PointAction: permutation has wrong length");
        std::vector<bool> seen(m_, false);
        for (auto v : p) {
            if (v >= m_ || seen[v]) throw InputError("PointAction: map is not a bijection of the carrier");
            seen[v] = true;
        }
        return p;
    }

    void validate() const {
        const auto id = permutation(group_.identity());
        for (std::size_t i = 0; i < m_; ++i)
            if (id[i] != i) throw InputError("PointAction: identity does not act as the identity permutation");
        const auto probes = probe_elements();
        for (const auto& g : probes)
            for (const auto& h : probes) {
                const auto pg = permutation(g);
                const auto ph = permutation(h);
                const auto pgh = permutation(group_.compose(g, h));
                for (std::size_t i = 0; i < m_; ++i)
                    if (pgh[i] != pg[ph[i]])
                        throw InputError("PointAction: (gh)i != g(hi) for g=" + g.str() + ", h=" + h.str());
            }
    }

    Group group_;
    std::size_t m_;
    PermFn fn_;
    std::shared_ptr<const std::map<Element, std::vector<std::size_t>>> cache_;
};

// ---- act ------------------------------------------------------------------

enum class ActMode { Vector, Function, Measure };

inline void require_probability(std::span<const double> p, double tol = 1e-9) {
    double s = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw InputError("expected a probability vector: negative or NaN weight");
        s += v;
    }
    if (std::abs(s - 1.0) > tol) throw InputError("expected a probability vector: weights do not sum to 1");
}

inline Vector act(const LinearAction& action, const Element& g, std::span<const double> x,
                  ActMode mode = ActMode::Vector) {
    if (mode != ActMode::Vector)
        throw InputError("act: function and measure modes need a point action on a finite carrier");
    return action.apply(g, x);
}

inline Vector act(const PointAction& action, const Element& g, std::span<const double> x,
                  ActMode mode = ActMode::Function) {
    if (mode == ActMode::Measure) require_probability(x);
    return action.apply(g, x);
}

// ---- dual action ----------------------------------------------------------

/// g -> (ρ(g)^{-1})^T, checked against ⟨ρ(g)x, dual(g)y⟩ = ⟨x,y⟩ on random probes.
inline LinearAction dual_action(const LinearAction& action, std::size_t probes = 100, std::uint64_t seed = 17) {
    auto base = action;
    auto rep = [base](const Element& g) {
        try {
            return inverse(base.matrix(g)).transpose();
        } catch (const NumericError&) {
            throw InputError("dual_action: singular representation table at " + g.str());
        }
    };
    LinearAction dual(action.group(), action.dim(), rep);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    const auto elems = action.probe_elements();
    for (std::size_t k = 0; k < probes; ++k) {
        const Element& g = elems[k % elems.size()];
        Vector x(action.dim()), y(action.dim());
        for (auto& v : x) v = nd(rng);
        for (auto& v : y) v = nd(rng);
        const double lhs = dot(action.apply(g, x), dual.apply(g, y));
        const double rhs = dot(x, y);
        if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, norm2(x) * norm2(y)))
            throw NumericError("dual_action: pairing probe failed at " + g.str());
    }
    return dual;
}

// ---- Reynolds average of the representation tables ------------------------

namespace detail {

template <class Action>
Matrix mean_table(const Action& action) {
    const auto elems = action.group().elements();
    const std::size_t d = action.dim();
    CascadeSum acc(d * d);
    for (const auto& g : elems) acc.push(action.matrix(g).data());
    return Matrix(d, d, divide(acc.total(), static_cast<double>(elems.size())));
}

}  // namespace detail

/// Orthonormal basis of X_G = {x : ρ(g)x = x for all g}, as the eigenvalue-1
/// eigenspace (= range) of the idempotent Reynolds table.
inline std::vector<Vector> invariant_subspace_basis(const LinearAction& action, double tol = 1e-9) {
    if (!action.group().finite()) throw InputError("invariant_subspace_basis: group must be finite-enumerated");
    return orthonormal_range(detail::mean_table(action), tol);
}

/// Orthonormal basis of the common fixed space of a list of tables,
/// i.e. the null space of the stacked (M_i - I).
inline std::vector<Vector> common_fixed_space(const std::vector<Matrix>& tables, double tol = 1e-9) {
    if (tables.empty()) return {};
    const std::size_t d = tables.front().cols();
    Matrix stacked(tables.size() * d, d);
    for (std::size_t k = 0; k < tables.size(); ++k)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                stacked(k * d + i, j) = tables[k](i, j) - (i == j ? 1.0 : 0.0);
    // null space of S = eigenvectors of S^T S with (near) zero eigenvalue
    const auto eig = jacobi_eigen(matmul(stacked.transpose(), stacked));
    std::vector<Vector> out;
    for (std::size_t k = 0; k < d; ++k)
        if (eig.values[k] <= tol) out.push_back(eig.vectors.column(k));
    return out;
}

// ---- orbits ---------------------------------------------------------------

namespace detail {

template <class Action>
std::vector<Element> orbit_elements(const Action& action, std::optional<std::size_t> window) {
    const auto& g = action.group();
    if (g.finite()) return g.elements();
    if (!window) throw InputError("orbit: group '" + g.name() + "' is not finite-enumerated; supply a window index");
    return g.impl().window(*window);
}

}  // namespace detail

/// Orbit of a vector, deduplicated at Euclidean distance <= dedup, in window order.
inline std::vector<Vector> orbit(const LinearAction& action, std::span<const double> x,
                                 std::optional<std::size_t> window = std::nullopt, double dedup = 1e-9) {
    std::vector<Vector> pts;
    for (const auto& g : detail::orbit_elements(action, window)) {
        Vector y = action.apply(g, x);
        bool seen = false;
        for (const auto& p : pts)
            if (norm2(sub(p, y)) <= dedup) {
                seen = true;
                break;
            }
        if (!seen) pts.push_back(std::move(y));
    }
    return pts;
}

/// Orbit of a carrier point, sorted ascending.
inline std::vector<std::size_t> orbit(const PointAction& action, std::size_t point,
                                      std::optional<std::size_t> window = std::nullopt) {
    if (point >= action.carrier_size()) throw InputError("orbit: point outside the carrier");
    std::vector<bool> seen(action.carrier_size(), false);
    for (const auto& g : detail::orbit_elements(action, window)) seen[action.image(g, point)] = true;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i]) out.push_back(i);
    return out;
}

}  // namespace amenable
