#pragma once

// Cocycles θ(g, s) with values in GL(T), the surrogate action Θ on function
// tables, Θ-averaging, skew-symmetrisation, equivariant projections of linear
// maps and equivariant conditional-probability kernels.
//
// Functions x: S -> T are stored row-major, x(s) = x[s*t .. s*t+t). The
// surrogate action is Θ(φ,x)(s) = θ(φ, φ⁻¹s) x(φ⁻¹s), which composes as
// Θ(ψ)Θ(φ) = Θ(ψφ) exactly when θ(ψφ, s) = θ(ψ, φs) θ(φ, s).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amenable/action.hpp"
#include "amenable/averaging.hpp"
#include "amenable/config.hpp"
#include "amenable/group.hpp"
#include "amenable/linalg.hpp"

namespace amenable {

enum class CocycleKind { Identity, Sign, Equivariance, Character, General };

inline const char* to_string(CocycleKind k) {
    switch (k) {
        case CocycleKind::Identity: return "identity";
        case CocycleKind::Sign: return "sign";
        case CocycleKind::Equivariance: return "equivariance";
        case CocycleKind::Character: return "character";
        case CocycleKind::General: return "general";
    }
    return "?";
}

/// Sign of a permutation element (+1 even, -1 odd).
inline double permutation_sign(const Element& g) {
    const std::size_t n = g.size();
    std::vector<bool> seen(n, false);
    int parity = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(g[j])) {
            seen[j] = true;
            ++len;
        }
        parity += static_cast<int>(len + 1) % 2;
    }
    return parity % 2 == 0 ? 1.0 : -1.0;
}

class Cocycle {
public:
    using ThetaFn = std::function<Matrix(const Element&, std::size_t)>;

    Cocycle(CocycleKind kind, PointAction carrier, std::size_t value_dim, ThetaFn theta)
        : kind_(kind), carrier_(std::move(carrier)), t_(value_dim), theta_(std::move(theta)) {
        if (t_ == 0) throw InputError("Cocycle: value dimension must be >= 1");
        if (carrier_.carrier_size() * t_ > default_limits.dense_dimension * default_limits.dense_dimension)
            throw LimitError("Cocycle: function table too large");
        validate();
    }

    /// θ ≡ identity: Θ is the plain function action.
    static Cocycle identity(const PointAction& carrier, std::size_t value_dim = 1) {
        return Cocycle(CocycleKind::Identity, carrier, value_dim,
                       [value_dim](const Element&, std::size_t) { return Matrix::identity(value_dim); });
    }

    /// θ(σ) = sign(σ) for a permutation group; Θ-invariance is skew-symmetry.
    static Cocycle sign(const PointAction& carrier, std::size_t value_dim = 1) {
        if (carrier.group().degree() == 0) throw InputError("sign cocycle needs a permutation group");
        return Cocycle(CocycleKind::Sign, carrier, value_dim, [value_dim](const Element& g, std::size_t) {
            return matscale(Matrix::identity(value_dim), permutation_sign(g));
        });
    }

    /// θ(φ) = ρ_T(φ); Θ-invariance of x is equivariance x(φs) = ρ_T(φ) x(s).
    static Cocycle equivariance(const PointAction& carrier, const LinearAction& rho) {
        if (!(carrier.group() == rho.group())) throw InputError("equivariance cocycle: actions belong to different groups");
        return Cocycle(CocycleKind::Equivariance, carrier, rho.dim(), [rho](const Element& g, std::size_t) { return rho.matrix(g); });
    }

    /// θ(φ) = χ(φ) for a homomorphism χ: G -> {-1, 1}.
    static Cocycle character(const PointAction& carrier, std::function<double(const Element&)> chi, std::size_t value_dim = 1) {
        return Cocycle(CocycleKind::Character, carrier, value_dim, [chi = std::move(chi), value_dim](const Element& g, std::size_t) {
            const double c = chi(g);
            if (c != 1.0 && c != -1.0) throw InputError("character cocycle: values must be +1 or -1");
            return matscale(Matrix::identity(value_dim), c);
        });
    }

    static Cocycle general(const PointAction& carrier, std::size_t value_dim, ThetaFn theta) {
        return Cocycle(CocycleKind::General, carrier, value_dim, std::move(theta));
    }

    CocycleKind kind() const { return kind_; }
    bool simple() const { return kind_ != CocycleKind::General; }
    const PointAction& carrier() const { return carrier_; }
    const Group& group() const { return carrier_.group(); }
    std::size_t value_dim() const { return t_; }
    std::size_t table_size() const { return carrier_.carrier_size() * t_; }
    Matrix theta(const Element& g, std::size_t s) const { return theta_(g, s); }

private:
    void validate() const {
        const auto& g = carrier_.group();
        const std::size_t m = carrier_.carrier_size();
        const Matrix id = Matrix::identity(t_);
        for (std::size_t s = 0; s < m; ++s) {
            const Matrix th = theta_(g.identity(), s);
            if (th.rows() != t_ || th.cols() != t_) throw InputError("Cocycle: θ table has the wrong shape");
            if (max_abs_diff(th, id) > 1e-12) throw InputError("Cocycle: θ(identity, s) is not the identity");
        }
        const auto probes = carrier_.probe_elements();
        for (const auto& psi : probes)
            for (const auto& phi : probes) {
                const auto pphi = carrier_.permutation(phi);
                const Element psiphi = g.compose(psi, phi);
                for (std::size_t s = 0; s < m; ++s) {
                    const Matrix lhs = theta_(psiphi, s);
                    const Matrix rhs = matmul(theta_(psi, pphi[s]), theta_(phi, s));
                    if (max_abs_diff(lhs, rhs) > 1e-10)
                        throw InputError("Cocycle: identity θ(ψφ,s) = θ(ψ,φs)θ(φ,s) fails for ψ=" + psi.str() +
                                         ", φ=" + phi.str() + ", s=" + std::to_string(s));
                }
            }
    }

    CocycleKind kind_;
    PointAction carrier_;
    std::size_t t_;
    ThetaFn theta_;
};

/// Θ(φ, x)(s) = θ(φ, φ⁻¹s) x(φ⁻¹s).
inline Vector surrogate_apply(const Cocycle& c, const Element& g, std::span<const double> x) {
    if (x.size() != c.table_size()) throw InputError("surrogate_apply: table size does not match carrier × value dimension");
    const std::size_t t = c.value_dim();
    const auto perm = c.carrier().permutation(g);
    Vector out(x.size(), 0.0);
    for (std::size_t u = 0; u < perm.size(); ++u) {
        const Matrix th = c.theta(g, u);
        const std::size_t s = perm[u];
        for (std::size_t a = 0; a < t; ++a) {
            double v = 0.0;
            for (std::size_t b = 0; b < t; ++b) v += th(a, b) * x[u * t + b];
            out[s * t + a] = v;
        }
    }
    return out;
}

/// The surrogate action as a VectorAction on function tables.
class SurrogateAction {
public:
    explicit SurrogateAction(Cocycle c, std::size_t probes = 20, std::uint64_t seed = 5) : c_(std::move(c)) {
        // Θ(g)Θ(h) = Θ(gh) and linearity on random tables.
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const auto elems = c_.carrier().probe_elements();
        std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
        for (std::size_t k = 0; k < probes; ++k) {
            Vector x(dim()), y(dim());
            for (auto& v : x) v = u(rng);
            for (auto& v : y) v = u(rng);
            const auto& g = elems[pick(rng)];
            const auto& h = elems[pick(rng)];
            const Vector lhs = apply(g, apply(h, x));
            const Vector rhs = apply(group().compose(g, h), x);
            if (max_abs_diff(lhs, rhs) > 1e-10) throw VerificationError("SurrogateAction: Θ(g)Θ(h) != Θ(gh)");
            const Vector lin = apply(g, add(scale(x, 2.0), y));
            if (max_abs_diff(lin, add(scale(apply(g, x), 2.0), apply(g, y))) > 1e-10)
                throw VerificationError("SurrogateAction: Θ(g) is not linear");
        }
    }

    const Group& group() const { return c_.group(); }
    std::size_t dim() const { return c_.table_size(); }
    Vector apply(const Element& g, std::span<const double> x) const { return surrogate_apply(c_, g, x); }
    std::vector<Element> probe_elements() const { return c_.carrier().probe_elements(); }
    const Cocycle& cocycle() const { return c_; }

private:
    Cocycle c_;
};

struct ThetaAverage {
    Vector value;
    double defect = 0.0;  // max over probed g of ‖Θ(g, value) - value‖∞
};

/// F^θ_n(x), the Følner average under Θ; for finite groups the full average.
inline ThetaAverage theta_average(const Cocycle& c, std::span<const double> x, std::size_t n = 1) {
    if (!c.simple()) throw InputError("theta_average: only simple cocycles can be averaged");
    const SurrogateAction s(c);
    const auto rep = folner_average(s, x, FolnerFamily(c.group()), n);
    return ThetaAverage{rep.value, rep.invariance_defect};
}

/// (1/k!) Σ_σ sign(σ) x∘σ for a k-argument table over a carrier of the given size.
inline Vector skew_symmetrize(std::span<const double> x, std::size_t k, std::size_t carrier) {
    if (k == 0 || k > default_limits.skew_arguments) throw LimitError("skew_symmetrize: argument count must be in 1..6");
    std::size_t m = 1;
    for (std::size_t i = 0; i < k; ++i) m *= carrier;
    if (x.size() != m) throw InputError("skew_symmetrize: table size is not carrier^k");
    const Group sk = symmetric_group(k);
    const auto act = PointAction::coordinate_permutation(sk, carrier);
    return theta_average(Cocycle::sign(act), x).value;
}

// ---- equivariant linear maps ----------------------------------------------

/// G acting on linear maps M: R^a -> R^b by Θ(φ, M) = ρ_out(φ) M ρ_in(φ)⁻¹;
/// the fixed points are exactly the equivariant maps. M is stored row-major.
class LinearMapAction {
public:
    LinearMapAction(LinearAction in, LinearAction out) : in_(std::move(in)), out_(std::move(out)) {
        if (!(in_.group() == out_.group())) throw InputError("LinearMapAction: representations of different groups");
    }

    const Group& group() const { return in_.group(); }
    std::size_t dim() const { return in_.dim() * out_.dim(); }
    Vector apply(const Element& g, std::span<const double> m) const {
        if (m.size() != dim()) throw InputError("LinearMapAction: table size mismatch");
        const Matrix mm(out_.dim(), in_.dim(), Vector(m.begin(), m.end()));
        return matmul(matmul(out_.matrix(g), mm), inverse(in_.matrix(g))).data();
    }
    std::vector<Element> probe_elements() const { return in_.probe_elements(); }

private:
    LinearAction in_, out_;
};

struct EquivariantProjection {
    Matrix map;
    double commutation_defect = 0.0;  // max_g ‖ρ_out(g) M̄ - M̄ ρ_in(g)‖∞
};

inline EquivariantProjection equivariant_projection(const LinearAction& in, const LinearAction& out, const Matrix& m,
                                                    std::size_t n = 1) {
    if (m.rows() != out.dim() || m.cols() != in.dim()) throw InputError("equivariant_projection: map has the wrong shape");
    const LinearMapAction act(in, out);
    const auto rep = folner_average(act, m.data(), FolnerFamily(in.group()), n);
    EquivariantProjection res{Matrix(out.dim(), in.dim(), rep.value), 0.0};
    for (const auto& g : act.probe_elements())
        res.commutation_defect = std::max(
            res.commutation_defect, max_abs_diff(matmul(out.matrix(g), res.map), matmul(res.map, in.matrix(g))));
    return res;
}

// ---- equivariant kernels ----------------------------------------------------

struct EquivariantKernel {
    Matrix eta_bar;                  // row t is η̄(·|t)
    double equivariance_defect = 0;  // max |η̄(φs|φt) - η̄(s|t)|
    double risk_bar = 0.0;           // ∬ h dη̄ dP
    double risk_sup = 0.0;           // sup_φ ∬ h(φs, φt) dη dP
    bool risk_ok = false;            // risk_bar <= risk_sup + 1e-10
};

inline double kernel_risk(const Matrix& eta, std::span<const double> p, const std::function<double(std::size_t, std::size_t)>& h) {
    double r = 0.0;
    for (std::size_t t = 0; t < eta.rows(); ++t)
        for (std::size_t s = 0; s < eta.cols(); ++s) r += p[t] * eta(t, s) * h(s, t);
    return r;
}

/// η̄(s|t) = |G|⁻¹ Σ_φ η(φs|φt), summed in sorted order so that the
/// equivariance η̄(φs|φt) = η̄(s|t) holds exactly.
inline EquivariantKernel equivariant_kernel(const Matrix& eta, const PointAction& action, std::span<const double> p,
                                            const std::function<double(std::size_t, std::size_t)>& h) {
    const std::size_t m = action.carrier_size();
    if (eta.rows() != m || eta.cols() != m) throw InputError("equivariant_kernel: kernel table must be carrier × carrier");
    for (std::size_t t = 0; t < m; ++t) require_probability(eta.row(t));
    if (p.size() != m) throw InputError("equivariant_kernel: measure length does not match the carrier");
    require_probability(p);
    const auto elems = action.group().elements();
    std::vector<std::vector<std::size_t>> perms;
    for (const auto& g : elems) perms.push_back(action.permutation(g));
    for (const auto& pm : perms)
        for (std::size_t i = 0; i < m; ++i)
            if (std::abs(p[pm[i]] - p[i]) > 1e-9) throw InputError("equivariant_kernel: measure is not invariant");

    EquivariantKernel out;
    out.eta_bar = Matrix(m, m);
    std::vector<double> vals(perms.size());
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t s = 0; s < m; ++s) {
            for (std::size_t k = 0; k < perms.size(); ++k) vals[k] = eta(perms[k][t], perms[k][s]);
            out.eta_bar(t, s) = sorted_mean(vals);
        }
    for (const auto& pm : perms)
        for (std::size_t t = 0; t < m; ++t)
            for (std::size_t s = 0; s < m; ++s)
                out.equivariance_defect = std::max(out.equivariance_defect, std::abs(out.eta_bar(pm[t], pm[s]) - out.eta_bar(t, s)));
    out.risk_bar = kernel_risk(out.eta_bar, p, h);
    out.risk_sup = -std::numeric_limits<double>::infinity();
    for (const auto& pm : perms)
        out.risk_sup = std::max(out.risk_sup, kernel_risk(eta, p, [&](std::size_t s, std::size_t t) { return h(pm[s], pm[t]); }));
    out.risk_ok = out.risk_bar <= out.risk_sup + 1e-10;
    return out;
}

}  // namespace amenable
