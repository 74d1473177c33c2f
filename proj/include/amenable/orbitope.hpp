#pragma once

// Orbitopes Π(x0) = conv G(x0) of finite orbits: membership LPs with
// separating certificates, support functions, the invariant element,
// invariant minimisation, point-mass probatopes, Minkowski decompositions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "amenable/action.hpp"
#include "amenable/averaging.hpp"
#include "amenable/config.hpp"
#include "amenable/linalg.hpp"
#include "amenable/lp.hpp"

namespace amenable {

/// The orbit of a generator point, enumerated once (finite group or a window).
class Orbitope {
public:
    Orbitope(LinearAction action, Vector x0, std::optional<std::size_t> window = std::nullopt,
             std::size_t max_points = 2000)
        : action_(std::move(action)), x0_(std::move(x0)), window_(window) {
        if (x0_.size() != action_.dim()) throw InputError("Orbitope: generator dimension mismatch");
        points_ = orbit(action_, x0_, window_);
        if (points_.size() > max_points) throw LimitError("Orbitope: orbit exceeds the LP size limit");
    }

    Orbitope(const PointAction& action, Vector p0, std::optional<std::size_t> window = std::nullopt)
        : Orbitope(action.linear(), std::move(p0), window) {}

    const LinearAction& action() const { return action_; }
    const Vector& generator() const { return x0_; }
    const std::vector<Vector>& points() const { return points_; }
    std::optional<std::size_t> window() const { return window_; }
    std::size_t dim() const { return x0_.size(); }

private:
    LinearAction action_;
    Vector x0_;
    std::optional<std::size_t> window_;
    std::vector<Vector> points_;
};

struct Membership {
    bool inside = false;
    Vector weights;    // inside: λ over orbit points, z = Σ λ_i v_i
    Vector separator;  // outside: unit-norm y with ⟨z,y⟩ > max_i ⟨v_i,y⟩
    double margin = 0.0;  // outside: ⟨z,y⟩ - max_i ⟨v_i,y⟩
};

namespace detail {

inline lp::LinearProgram hull_lp(const std::vector<Vector>& pts, std::span<const double> z) {
    const std::size_t k = pts.size();
    const std::size_t d = z.size();
    lp::LinearProgram prog(k);
    for (std::size_t r = 0; r < d; ++r) {
        Vector row(k);
        for (std::size_t i = 0; i < k; ++i) row[i] = pts[i][r];
        prog.add_row(std::move(row), lp::Relation::Equal, z[r]);
    }
    prog.add_row(Vector(k, 1.0), lp::Relation::Equal, 1.0);
    return prog;
}

}  // namespace detail

/// Feasibility LP z = Σ λ_i v_i, λ >= 0, Σ λ = 1. When infeasible, the phase-1
/// Farkas ray (y, t) gives ⟨v_i,y⟩ + t <= 0 < ⟨z,y⟩ + t, i.e. a separating y.
inline Membership membership(const std::vector<Vector>& points, std::span<const double> z, double tol = 1e-9) {
    if (points.empty()) throw InputError("membership: empty point set");
    if (z.size() != points.front().size()) throw InputError("membership: dimension mismatch");
    const auto sol = lp::solve_lp(detail::hull_lp(points, z));
    Membership m;
    if (sol.status == lp::Status::Optimal || sol.status == lp::Status::NumericBreakdown) {
        Vector recon(z.size(), 0.0);
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t r = 0; r < z.size(); ++r) recon[r] += sol.primal[i] * points[i][r];
        if (max_abs_diff(recon, z) <= std::max(tol, 1e-9) * std::max(1.0, norm_inf(z))) {
            m.inside = true;
            m.weights = sol.primal;
            for (double& w : m.weights) w = std::max(w, 0.0);
            return m;
        }
    }
    if (sol.status == lp::Status::Unbounded) throw NumericError("membership: unexpected unbounded feasibility LP");
    Vector y(z.size());
    for (std::size_t r = 0; r < z.size(); ++r) y[r] = sol.farkas.empty() ? 0.0 : sol.farkas[r];
    const double yn = norm2(y);
    if (yn == 0.0) throw NumericError("membership: degenerate separating certificate");
    y = scale(y, 1.0 / yn);
    double best = -lp::inf;
    for (const auto& v : points) best = std::max(best, dot(v, y));
    m.separator = std::move(y);
    m.margin = dot(z, m.separator) - best;
    return m;
}

inline Membership orbitope_membership(const Orbitope& orb, std::span<const double> z, double tol = 1e-9) {
    return membership(orb.points(), z, tol);
}

struct SupportValue {
    double value = 0.0;
    std::size_t index = 0;  // first maximiser in canonical orbit order
    Vector point;
};

/// H(y | Π(x0)) = max over the orbit of ⟨φ x0, y⟩.
inline SupportValue support_function(const Orbitope& orb, std::span<const double> y) {
    if (y.size() != orb.dim()) throw InputError("support_function: dimension mismatch");
    SupportValue s;
    s.value = -lp::inf;
    const auto& pts = orb.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = dot(pts[i], y);
        if (v > s.value) {
            s.value = v;
            s.index = i;
        }
    }
    s.point = pts[s.index];
    return s;
}

struct InvariantElement {
    Vector value;
    bool in_orbitope = false;
    double invariance_defect = 0.0;
    bool unique_checked = false;  // orthogonal actions: Π(x0) ∩ X_G verified to be {x̄}
    bool unique = false;
    Membership membership;
};

namespace detail {

// Range of z over Π ∩ X_G, coordinate by coordinate, via LP over orbit weights
// with the constraint (R - I) V λ = 0.
inline bool invariant_section_is_point(const std::vector<Vector>& pts, const Matrix& reynolds, const Vector& xbar,
                                       double tol) {
    const std::size_t k = pts.size();
    const std::size_t d = xbar.size();
    for (std::size_t c = 0; c < d; ++c) {
        for (auto sense : {lp::Sense::Minimize, lp::Sense::Maximize}) {
            lp::LinearProgram prog(k, sense);
            for (std::size_t i = 0; i < k; ++i) prog.objective[i] = pts[i][c];
            for (std::size_t r = 0; r < d; ++r) {
                Vector row(k, 0.0);
                for (std::size_t i = 0; i < k; ++i) {
                    double v = -pts[i][r];
                    for (std::size_t s = 0; s < d; ++s) v += reynolds(r, s) * pts[i][s];
                    row[i] = v;
                }
                prog.add_row(std::move(row), lp::Relation::Equal, 0.0);
            }
            prog.add_row(Vector(k, 1.0), lp::Relation::Equal, 1.0);
            const auto sol = lp::solve_lp(prog);
            if (!sol.optimal()) return false;
            if (std::abs(sol.objective - xbar[c]) > tol) return false;
        }
    }
    return true;
}

}  // namespace detail

/// x̄ = R x0 for finite groups; for windowed groups the certified ergodic limit.
/// Membership and invariance are verified; for orthogonal finite actions the
/// invariant section of the orbitope is verified to be the single point x̄.
inline InvariantElement invariant_element(const Orbitope& orb, const ErgodicOptions& opt = {1e-6, 5000, true}) {
    const auto& action = orb.action();
    InvariantElement out;
    std::optional<Matrix> reynolds;
    if (action.group().finite()) {
        reynolds = reynolds_projector(action);
        out.value = matvec(*reynolds, orb.generator());
    } else {
        auto res = ergodic_limit(action, FolnerFamily(action.group()), orb.generator(), opt);
        if (!res.converged)
            throw VerificationError("invariant_element: Følner averages did not converge by n_max");
        out.value = res.limit;
    }
    out.membership = orbitope_membership(orb, out.value);
    out.in_orbitope = out.membership.inside;
    out.invariance_defect = detail::invariance_defect(action, out.value);
    if (reynolds && action.orthogonal()) {
        out.unique_checked = true;
        out.unique = detail::invariant_section_is_point(orb.points(), *reynolds, out.value, 1e-8);
    }
    return out;
}

// ---- invariant minimisation -----------------------------------------------

struct LinearObjective {
    Vector coefficients;
};

struct ConvexObjective {
    std::function<double(const Vector&)> evaluate;
};

using Objective = std::variant<LinearObjective, ConvexObjective>;

struct OrbitopeMinimum {
    double minimum = 0.0;           // over Π(x0)
    Vector minimizer;               // point attaining `minimum`
    double invariant_value = 0.0;   // f(x̄)
    Vector invariant_minimizer;     // x̄
    bool invariant_attains = false; // |minimum - f(x̄)| within tolerance
    std::size_t evaluations = 0;
};

namespace detail {

inline double evaluate(const Objective& f, const Vector& x) {
    if (const auto* lin = std::get_if<LinearObjective>(&f)) return dot(lin->coefficients, x);
    return std::get<ConvexObjective>(f).evaluate(x);
}

// Visit every weight vector with entries in {0, 1/r, ..., 1} summing to 1.
inline void for_each_grid_point(std::size_t k, std::size_t r, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> c(k, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
        if (i + 1 == k) {
            c[i] = left;
            fn(c);
            return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
            c[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, r);
}

inline double grid_count(std::size_t k, std::size_t r) {
    double c = 1.0;
    for (std::size_t i = 1; i < k; ++i) c = c * static_cast<double>(r + i) / static_cast<double>(i);
    return c;
}

}  // namespace detail

/// Minimises a convex invariant objective over Π(x0) and compares with f(x̄).
/// Linear objectives use the LP over orbit vertices. Black-box objectives use a
/// barycentric grid (step 1/resolution, coarsened when the orbit is large so
/// that at most `max_evaluations` points are visited) plus one pass of
/// pairwise weight transfers at half the grid step.
inline OrbitopeMinimum minimize_over_orbitope(const Orbitope& orb, const Objective& f, std::size_t resolution = 32,
                                              double tol = 1e-9, std::size_t max_evaluations = 200000) {
    const auto& pts = orb.points();
    const auto& action = orb.action();
    // invariance of f on the orbit
    const double f0 = detail::evaluate(f, orb.generator());
    for (const auto& g : action.probe_elements()) {
        for (const auto& v : pts) {
            const double fv = detail::evaluate(f, v);
            const double fgv = detail::evaluate(f, action.apply(g, v));
            if (std::abs(fgv - fv) > tol * std::max(1.0, std::abs(fv)) ||
                std::abs(fv - f0) > tol * std::max(1.0, std::abs(f0)))
                throw InputError("minimize_over_orbitope: objective is not invariant; violated by phi=" + g.str());
        }
    }

    OrbitopeMinimum out;
    const std::size_t k = pts.size();
    const std::size_t d = orb.dim();
    if (const auto* lin = std::get_if<LinearObjective>(&f)) {
        if (lin->coefficients.size() != d) throw InputError("minimize_over_orbitope: objective dimension mismatch");
        lp::LinearProgram prog(k);
        for (std::size_t i = 0; i < k; ++i) prog.objective[i] = dot(lin->coefficients, pts[i]);
        prog.add_row(Vector(k, 1.0), lp::Relation::Equal, 1.0);
        const auto sol = lp::solve_lp(prog);
        out.minimum = sol.objective;
        out.minimizer.assign(d, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t r = 0; r < d; ++r) out.minimizer[r] += sol.primal[i] * pts[i][r];
        out.evaluations = k;
    } else {
        std::size_t r = std::max<std::size_t>(resolution, 1);
        while (r > 1 && detail::grid_count(k, r) > static_cast<double>(max_evaluations)) --r;
        auto combine = [&](const std::vector<double>& w) {
            Vector z(d, 0.0);
            for (std::size_t i = 0; i < k; ++i)
                if (w[i] != 0.0)
                    for (std::size_t c = 0; c < d; ++c) z[c] += w[i] * pts[i][c];
            return z;
        };
        std::vector<double> best_w;
        out.minimum = lp::inf;
        auto consider = [&](const std::vector<double>& w) {
            const Vector z = combine(w);
            const double v = detail::evaluate(f, z);
            ++out.evaluations;
            if (v < out.minimum) {
                out.minimum = v;
                out.minimizer = z;
                best_w = w;
            }
        };
        std::vector<double> w(k);
        detail::for_each_grid_point(k, r, [&](const std::vector<std::size_t>& c) {
            for (std::size_t i = 0; i < k; ++i) w[i] = static_cast<double>(c[i]) / static_cast<double>(r);
            consider(w);
        });
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(k));
        consider(w);
        // refinement: move half a grid step of weight between pairs
        const double step = 0.5 / static_cast<double>(r);
        std::vector<double> base = best_w;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                if (i == j || base[i] < step) continue;
                std::vector<double> t = base;
                t[i] -= step;
                t[j] += step;
                consider(t);
            }
    }

    if (action.group().finite()) {
        out.invariant_minimizer = matvec(reynolds_projector(action), orb.generator());
    } else {
        out.invariant_minimizer = invariant_element(orb).value;
    }
    out.invariant_value = detail::evaluate(f, out.invariant_minimizer);
    out.invariant_attains = out.invariant_value <= out.minimum + 1e-9 * std::max(1.0, std::abs(out.minimum));
    return out;
}

// ---- point-mass probatopes ------------------------------------------------

/// Π(δ_ω) for a permutation action on a finite carrier: the probability
/// vectors supported on the orbit G(ω), with extreme points δ_z, z ∈ G(ω).
struct PointMassProbatope {
    std::vector<std::size_t> orbit;
    std::size_t carrier = 0;

    bool contains(std::span<const double> p, double tol = 1e-9) const {
        if (p.size() != carrier) throw InputError("probatope: measure length does not match the carrier");
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] < -tol) return false;
            s += p[i];
            if (p[i] > tol && !std::binary_search(orbit.begin(), orbit.end(), i)) return false;
        }
        return std::abs(s - 1.0) <= tol;
    }

    std::vector<Vector> extreme_points() const {
        std::vector<Vector> out;
        for (auto z : orbit) {
            Vector d(carrier, 0.0);
            d[z] = 1.0;
            out.push_back(std::move(d));
        }
        return out;
    }
};

/// Builds Π(δ_ω) and cross-checks it against the generic orbitope: the orbit of
/// δ_ω must be exactly {δ_z : z ∈ G(ω)} and the uniform measure on the orbit
/// must be an LP member.
inline PointMassProbatope probatope_pointmass(const PointAction& action, std::size_t omega) {
    PointMassProbatope out;
    out.carrier = action.carrier_size();
    out.orbit = orbit(action, omega);
    Vector delta(out.carrier, 0.0);
    delta[omega] = 1.0;
    Orbitope orb(action, delta);
    auto ext = out.extreme_points();
    if (orb.points().size() != ext.size()) throw VerificationError("probatope_pointmass: orbit of δ_ω has wrong size");
    for (const auto& v : orb.points())
        if (std::none_of(ext.begin(), ext.end(), [&](const Vector& e) { return max_abs_diff(e, v) == 0.0; }))
            throw VerificationError("probatope_pointmass: orbit point is not a point mass on G(ω)");
    Vector uniform(out.carrier, 0.0);
    for (auto z : out.orbit) uniform[z] = 1.0 / static_cast<double>(out.orbit.size());
    if (!orbitope_membership(orb, uniform).inside)
        throw VerificationError("probatope_pointmass: uniform orbit measure rejected by the LP");
    return out;
}

// ---- Minkowski decomposition ----------------------------------------------

/// Π(Σ c_i x_i) ⊆ Σ c_i Π(x_i) always holds (forward). The reverse inclusion
/// fails in general: for the swap on R² with x_1 = (1,0), x_2 = (0,1) and
/// c = (½,½), the left side is {(½,½)} while the right side is a segment.
struct MinkowskiReport {
    bool forward = true;   // sampled points of Π(Σ c_i x_i) lie in Σ c_i Π(x_i)
    bool reverse = true;   // sampled points of Σ c_i Π(x_i) lie in Π(Σ c_i x_i)
    std::size_t checked = 0;
    std::size_t forward_failures = 0;
    std::size_t reverse_failures = 0;
    Vector reverse_witness;  // first point of the Minkowski sum outside Π(Σ c_i x_i)

    bool passed() const { return forward && reverse; }
};

namespace detail {

inline Vector random_convex_combination(const std::vector<Vector>& pts, std::mt19937_64& rng) {
    std::exponential_distribution<double> ex(1.0);
    Vector w(pts.size());
    double s = 0.0;
    for (auto& v : w) s += (v = ex(rng));
    Vector z(pts.front().size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t r = 0; r < z.size(); ++r) z[r] += w[i] / s * pts[i][r];
    return z;
}

// z ∈ Σ c_i Π(x_i) ?  Variables λ_{i,k} >= 0, Σ_k λ_{i,k} = 1, Σ_i c_i Σ_k λ_{i,k} v_{ik} = z.
inline bool in_minkowski_sum(const std::vector<Orbitope>& handles, const Vector& c, const Vector& z) {
    std::size_t nvar = 0;
    for (const auto& h : handles) nvar += h.points().size();
    lp::LinearProgram prog(nvar);
    const std::size_t d = z.size();
    for (std::size_t r = 0; r < d; ++r) {
        Vector row(nvar, 0.0);
        std::size_t off = 0;
        for (std::size_t i = 0; i < handles.size(); ++i) {
            const auto& pts = handles[i].points();
            for (std::size_t k = 0; k < pts.size(); ++k) row[off + k] = c[i] * pts[k][r];
            off += pts.size();
        }
        prog.add_row(std::move(row), lp::Relation::Equal, z[r]);
    }
    std::size_t off = 0;
    for (const auto& h : handles) {
        Vector row(nvar, 0.0);
        for (std::size_t k = 0; k < h.points().size(); ++k) row[off + k] = 1.0;
        off += h.points().size();
        prog.add_row(std::move(row), lp::Relation::Equal, 1.0);
    }
    return lp::solve_lp(prog).optimal();
}

}  // namespace detail

/// Samples both inclusions between Π(Σ c_i x_i) and Σ c_i Π(x_i) with membership LPs.
/// Orbit vertices and their pairwise midpoints are tested along with random
/// convex combinations.
inline MinkowskiReport minkowski_check(const std::vector<Orbitope>& handles, const Vector& weights,
                                       std::size_t samples = 50, std::uint64_t seed = 1) {
    if (handles.empty() || handles.size() != weights.size()) throw InputError("minkowski_check: weights must match handles");
    double s = 0.0;
    for (double c : weights) {
        if (c < 0.0) throw InputError("minkowski_check: weights must be nonnegative");
        s += c;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InputError("minkowski_check: weights must sum to 1");
    const auto& action = handles.front().action();
    const std::size_t d = handles.front().dim();
    for (const auto& h : handles)
        if (!(h.action().group() == action.group()) || h.dim() != d)
            throw InputError("minkowski_check: handles must share one action");

    Vector mix(d, 0.0);
    for (std::size_t i = 0; i < handles.size(); ++i)
        for (std::size_t r = 0; r < d; ++r) mix[r] += weights[i] * handles[i].generator()[r];
    const Orbitope combined(action, mix, handles.front().window());

    MinkowskiReport rep;
    auto check_forward = [&](const Vector& w) {
        ++rep.checked;
        if (!detail::in_minkowski_sum(handles, weights, w)) {
            rep.forward = false;
            ++rep.forward_failures;
        }
    };
    auto check_reverse = [&](const Vector& z) {
        ++rep.checked;
        if (!orbitope_membership(combined, z).inside) {
            if (rep.reverse) rep.reverse_witness = z;
            rep.reverse = false;
            ++rep.reverse_failures;
        }
    };
    // vertices: Σ c_i v_i with every v_i the orbit point of the same index
    for (const auto& v : combined.points()) check_forward(v);
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < samples; ++t) {
        check_forward(detail::random_convex_combination(combined.points(), rng));
        Vector z(d, 0.0);
        for (std::size_t i = 0; i < handles.size(); ++i) {
            const Vector zi = detail::random_convex_combination(handles[i].points(), rng);
            for (std::size_t r = 0; r < d; ++r) z[r] += weights[i] * zi[r];
        }
        check_reverse(z);
    }
    return rep;
}

}  // namespace amenable
