#pragma once

// Monge-Kantorovich transport on finite carriers: the transportation LP, its
// invariant restriction Λ_G and invariant dual Γ_G, extremality of invariant
// couplings, and coupling symmetrisation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amenable/action.hpp"
#include "amenable/config.hpp"
#include "amenable/linalg.hpp"
#include "amenable/lp.hpp"

namespace amenable {

namespace detail {

inline void require_same_group(const PointAction& a1, const PointAction& a2, const char* who) {
    if (!(a1.group() == a2.group())) throw InputError(std::string(who) + ": both carriers must be acted on by the same group");
    if (!a1.group().finite()) throw InputError(std::string(who) + ": group must be finite-enumerated");
}

inline void require_invariant_measure(const PointAction& a, std::span<const double> p, const char* who) {
    if (p.size() != a.carrier_size()) throw InputError(std::string(who) + ": marginal length does not match the carrier");
    for (const auto& g : a.probe_elements()) {
        const auto perm = a.permutation(g);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (std::abs(p[perm[i]] - p[i]) > 1e-9)
                throw InputError(std::string(who) + ": marginal is not invariant; witness element " + g.str() +
                                 " at point " + std::to_string(i));
    }
}

}  // namespace detail

class CostMatrix {
public:
    explicit CostMatrix(Matrix c) : c_(std::move(c)) { check_entries(); }

    /// Verifies both invariance flags exhaustively over the group.
    CostMatrix(Matrix c, const PointAction& a1, const PointAction& a2) : c_(std::move(c)) {
        check_entries();
        detail::require_same_group(a1, a2, "CostMatrix");
        if (c_.rows() != a1.carrier_size() || c_.cols() != a2.carrier_size())
            throw InputError("CostMatrix: table shape does not match the carriers");
        std::vector<std::vector<std::size_t>> p1, p2;
        for (const auto& g : a1.group().elements()) {
            p1.push_back(a1.permutation(g));
            p2.push_back(a2.permutation(g));
        }
        diagonal_ = true;
        for (std::size_t g = 0; g < p1.size() && diagonal_; ++g)
            for (std::size_t i = 0; i < c_.rows() && diagonal_; ++i)
                for (std::size_t j = 0; j < c_.cols(); ++j)
                    if (c_(p1[g][i], p2[g][j]) != c_(i, j)) {
                        diagonal_ = false;
                        break;
                    }
        separate_ = diagonal_;
        for (std::size_t g = 0; g < p1.size() && separate_; ++g)
            for (std::size_t h = 0; h < p2.size() && separate_; ++h)
                for (std::size_t i = 0; i < c_.rows() && separate_; ++i)
                    for (std::size_t j = 0; j < c_.cols(); ++j)
                        if (c_(p1[g][i], p2[h][j]) != c_(i, j)) {
                            separate_ = false;
                            break;
                        }
    }

    const Matrix& table() const { return c_; }
    double operator()(std::size_t i, std::size_t j) const { return c_(i, j); }
    std::size_t rows() const { return c_.rows(); }
    std::size_t cols() const { return c_.cols(); }
    bool diagonally_invariant() const { return diagonal_; }
    bool separately_invariant() const { return separate_; }

private:
    void check_entries() const {
        if (c_.rows() == 0 || c_.cols() == 0) throw InputError("CostMatrix: empty table");
        for (double v : c_.data())
            if (!std::isfinite(v) || v < 0.0) throw InputError("CostMatrix: entries must be finite and nonnegative");
    }

    Matrix c_;
    bool diagonal_ = false;
    bool separate_ = false;
};

struct Coupling {
    Matrix table;
    Vector p1, p2;

    /// Max deviation of the table's marginals from (p1, p2).
    double marginal_residual() const {
        double r = 0.0;
        for (std::size_t i = 0; i < table.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < table.cols(); ++j) s += table(i, j);
            r = std::max(r, std::abs(s - p1[i]));
        }
        for (std::size_t j = 0; j < table.cols(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < table.rows(); ++i) s += table(i, j);
            r = std::max(r, std::abs(s - p2[j]));
        }
        return r;
    }
};

inline double risk(const CostMatrix& c, const Matrix& coupling) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) s += c(i, j) * coupling(i, j);
    return s;
}

struct DualPotentials {
    Vector f1, f2;
    double margin = 0.0;  // min c(i,j) - f1(i) - f2(j)
};

inline double feasibility_margin(const CostMatrix& c, const Vector& f1, const Vector& f2) {
    double m = lp::inf;
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) m = std::min(m, c(i, j) - f1[i] - f2[j]);
    return m;
}

struct TransportSolution {
    Coupling coupling;
    DualPotentials potentials;
    double primal = 0.0;
    double dual = 0.0;
    bool degenerate = false;
    bool complementary_slackness = true;
};

namespace detail {

inline void require_marginals(const CostMatrix& c, std::span<const double> p1, std::span<const double> p2) {
    if (p1.size() != c.rows() || p2.size() != c.cols()) throw InputError("transport: marginal lengths do not match the cost table");
    require_probability(p1);
    require_probability(p2);
}

}  // namespace detail

/// Transportation LP min Σ c P over couplings of (p1, p2), with the dual potentials.
inline TransportSolution solve_mk(const CostMatrix& c, std::span<const double> p1, std::span<const double> p2,
                                  const Tolerances& tol = default_tolerances, const Limits& limits = default_limits) {
    detail::require_marginals(c, p1, p2);
    const std::size_t n1 = c.rows(), n2 = c.cols();
    if (n1 * n2 > limits.lp_variables || n1 + n2 > limits.lp_rows) throw LimitError("solve_mk: LP size limit exceeded");
    lp::LinearProgram prog(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) prog.objective[i * n2 + j] = c(i, j);
    for (std::size_t i = 0; i < n1; ++i) {
        Vector row(n1 * n2, 0.0);
        for (std::size_t j = 0; j < n2; ++j) row[i * n2 + j] = 1.0;
        prog.add_row(std::move(row), lp::Relation::Equal, p1[i]);
    }
    for (std::size_t j = 0; j < n2; ++j) {
        Vector row(n1 * n2, 0.0);
        for (std::size_t i = 0; i < n1; ++i) row[i * n2 + j] = 1.0;
        prog.add_row(std::move(row), lp::Relation::Equal, p2[j]);
    }
    const auto sol = lp::solve_lp(prog, tol, limits);
    if (sol.status == lp::Status::Infeasible) throw InputError("solve_mk: marginals admit no coupling");
    if (!sol.optimal()) throw NumericError(std::string("solve_mk: LP ended with status ") + lp::to_string(sol.status));

    TransportSolution out;
    out.coupling.table = Matrix(n1, n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) out.coupling.table(i, j) = std::max(sol.primal[i * n2 + j], 0.0);
    out.coupling.p1.assign(p1.begin(), p1.end());
    out.coupling.p2.assign(p2.begin(), p2.end());
    out.potentials.f1.assign(sol.dual.begin(), sol.dual.begin() + static_cast<std::ptrdiff_t>(n1));
    out.potentials.f2.assign(sol.dual.begin() + static_cast<std::ptrdiff_t>(n1), sol.dual.end());
    out.potentials.margin = feasibility_margin(c, out.potentials.f1, out.potentials.f2);
    out.primal = risk(c, out.coupling.table);
    out.dual = dot(out.potentials.f1, Vector(p1.begin(), p1.end())) + dot(out.potentials.f2, Vector(p2.begin(), p2.end()));
    out.degenerate = sol.degenerate;
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            if (out.coupling.table(i, j) > tol.feasibility &&
                std::abs(c(i, j) - out.potentials.f1[i] - out.potentials.f2[j]) > tol.duality)
                out.complementary_slackness = false;
    if (std::abs(out.primal - out.dual) > tol.duality) throw NumericError("solve_mk: duality gap above tolerance");
    if (out.potentials.margin < -tol.feasibility) throw NumericError("solve_mk: dual potentials infeasible");
    return out;
}

// ---- invariant transport --------------------------------------------------

/// Orbits of the diagonal action (i,j) ↦ (gi, gj) on Ω₁×Ω₂, each sorted, in
/// order of least pair index i*|Ω₂|+j.
inline std::vector<std::vector<std::size_t>> diagonal_orbits(const PointAction& a1, const PointAction& a2) {
    detail::require_same_group(a1, a2, "diagonal_orbits");
    const std::size_t n1 = a1.carrier_size(), n2 = a2.carrier_size();
    std::vector<std::vector<std::size_t>> p1, p2;
    for (const auto& g : a1.group().elements()) {
        p1.push_back(a1.permutation(g));
        p2.push_back(a2.permutation(g));
    }
    std::vector<bool> seen(n1 * n2, false);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t k = 0; k < n1 * n2; ++k) {
        if (seen[k]) continue;
        std::vector<std::size_t> orb;
        for (std::size_t g = 0; g < p1.size(); ++g) {
            const std::size_t img = p1[g][k / n2] * n2 + p2[g][k % n2];
            if (!seen[img]) {
                seen[img] = true;
                orb.push_back(img);
            }
        }
        std::sort(orb.begin(), orb.end());
        out.push_back(std::move(orb));
    }
    return out;
}

/// Λ_G in orbit coordinates: q_O >= 0 is the mass on diagonal orbit O, spread
/// uniformly; one marginal row per orbit of each carrier.
struct InvariantTransportLP {
    std::vector<std::vector<std::size_t>> orbits;
    std::vector<Vector> rows;
    Vector rhs;

    Matrix expand(std::span<const double> q, std::size_t n1, std::size_t n2) const {
        Matrix t(n1, n2);
        for (std::size_t o = 0; o < orbits.size(); ++o)
            for (auto k : orbits[o]) t(k / n2, k % n2) = std::max(q[o], 0.0) / static_cast<double>(orbits[o].size());
        return t;
    }

    lp::Polytope polytope() const {
        lp::Polytope poly;
        poly.dimension = orbits.size();
        poly.eq_rows = rows;
        poly.eq_rhs = rhs;
        for (std::size_t o = 0; o < orbits.size(); ++o) {
            Vector r(orbits.size(), 0.0);
            r[o] = -1.0;
            poly.ineq_rows.push_back(std::move(r));
            poly.ineq_rhs.push_back(0.0);
        }
        return poly;
    }
};

inline InvariantTransportLP invariant_transport_lp(const PointAction& a1, const PointAction& a2, std::span<const double> p1,
                                                   std::span<const double> p2) {
    InvariantTransportLP out;
    out.orbits = diagonal_orbits(a1, a2);
    const std::size_t n2 = a2.carrier_size();
    const std::size_t k = out.orbits.size();
    for (const auto& o1 : a1.orbits()) {
        const std::size_t i = o1.front();
        Vector row(k, 0.0);
        for (std::size_t o = 0; o < k; ++o)
            for (auto idx : out.orbits[o])
                if (idx / n2 == i) row[o] += 1.0 / static_cast<double>(out.orbits[o].size());
        out.rows.push_back(std::move(row));
        out.rhs.push_back(p1[i]);
    }
    for (const auto& o2 : a2.orbits()) {
        const std::size_t j = o2.front();
        Vector row(k, 0.0);
        for (std::size_t o = 0; o < k; ++o)
            for (auto idx : out.orbits[o])
                if (idx % n2 == j) row[o] += 1.0 / static_cast<double>(out.orbits[o].size());
        out.rows.push_back(std::move(row));
        out.rhs.push_back(p2[j]);
    }
    return out;
}

namespace detail {

// sup Q1(f1) + Q2(f2) over potentials constant on orbits with f1(i) + f2(j) <= c(i,j).
inline DualPotentials invariant_dual(const CostMatrix& c, const PointAction& a1, const PointAction& a2,
                                     std::span<const double> q1, std::span<const double> q2, double& value) {
    const auto lab1 = a1.orbit_labels();
    const auto lab2 = a2.orbit_labels();
    const std::size_t k1 = *std::max_element(lab1.begin(), lab1.end()) + 1;
    const std::size_t k2 = *std::max_element(lab2.begin(), lab2.end()) + 1;
    std::map<std::pair<std::size_t, std::size_t>, double> bound;
    for (std::size_t i = 0; i < c.rows(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j) {
            auto key = std::make_pair(lab1[i], lab2[j]);
            auto it = bound.find(key);
            if (it == bound.end()) bound.emplace(key, c(i, j));
            else it->second = std::min(it->second, c(i, j));
        }
    lp::LinearProgram prog(k1 + k2, lp::Sense::Maximize);
    for (std::size_t i = 0; i < q1.size(); ++i) prog.objective[lab1[i]] += q1[i];
    for (std::size_t j = 0; j < q2.size(); ++j) prog.objective[k1 + lab2[j]] += q2[j];
    for (std::size_t v = 0; v < k1 + k2; ++v) prog.set_free(v);
    for (const auto& [key, b] : bound) {
        Vector row(k1 + k2, 0.0);
        row[key.first] = 1.0;
        row[k1 + key.second] = 1.0;
        prog.add_row(std::move(row), lp::Relation::LessEqual, b);
    }
    const auto sol = lp::solve_lp(prog);
    if (!sol.optimal()) throw NumericError(std::string("invariant dual LP ended with status ") + lp::to_string(sol.status));
    DualPotentials d;
    for (auto l : lab1) d.f1.push_back(sol.primal[l]);
    for (auto l : lab2) d.f2.push_back(sol.primal[k1 + l]);
    d.margin = feasibility_margin(c, d.f1, d.f2);
    value = dot(d.f1, Vector(q1.begin(), q1.end())) + dot(d.f2, Vector(q2.begin(), q2.end()));
    return d;
}

}  // namespace detail

struct ExtremalityVerdict {
    bool extreme = true;
    Matrix witness;  // unit Euclidean norm, orbit-constant on supp(P), zero elsewhere
    std::size_t classes = 0;
    std::size_t nullity = 0;
};

/// Condition (iv) restricted to Σ: a nonzero f, constant on diagonal orbits of
/// supp(P), with E[f|ξ₁] = 0 = E[f|ξ₂]. P is extreme in Λ_G iff none exists.
inline ExtremalityVerdict is_extreme_invariant_coupling(const Matrix& p, const PointAction& a1, const PointAction& a2,
                                                        double support_tol = 1e-12) {
    detail::require_same_group(a1, a2, "is_extreme_invariant_coupling");
    const std::size_t n1 = a1.carrier_size(), n2 = a2.carrier_size();
    if (p.rows() != n1 || p.cols() != n2) throw InputError("is_extreme_invariant_coupling: table shape does not match the carriers");
    std::vector<std::vector<std::size_t>> classes;
    for (const auto& o : diagonal_orbits(a1, a2)) {
        const double v = p(o.front() / n2, o.front() % n2);
        for (auto k : o)
            if (std::abs(p(k / n2, k % n2) - v) > 1e-9) throw InputError("is_extreme_invariant_coupling: coupling is not invariant");
        if (v > support_tol) classes.push_back(o);
    }
    Matrix sys(n1 + n2, classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (auto k : classes[c]) {
            const double w = p(k / n2, k % n2);
            sys(k / n2, c) += w;
            sys(n1 + k % n2, c) += w;
        }
    const auto null = nullspace(sys, 1e-10);
    ExtremalityVerdict out;
    out.classes = classes.size();
    out.nullity = null.size();
    out.extreme = null.empty();
    out.witness = Matrix(n1, n2);
    if (!out.extreme) {
        const Vector& f = null.front();
        for (std::size_t c = 0; c < classes.size(); ++c)
            for (auto k : classes[c]) out.witness(k / n2, k % n2) = f[c];
        double nrm = 0.0, first = 0.0;
        for (double v : out.witness.data()) {
            nrm += v * v;
            if (first == 0.0 && std::abs(v) > 1e-12) first = v;
        }
        const double s = (first < 0.0 ? -1.0 : 1.0) / std::sqrt(nrm);
        out.witness = matscale(out.witness, s);
    }
    return out;
}

struct InvariantTransportReport {
    TransportSolution unconstrained;  // min over Λ
    Coupling coupling;                // invariant optimum, min over Λ_G
    DualPotentials potentials;        // orbit-constant, sup over Γ_G
    double primal = 0.0;              // min Λ
    double invariant_primal = 0.0;    // min Λ_G
    double invariant_dual = 0.0;      // sup Γ_G
    double gap_invariance = 0.0;      // |min Λ - min Λ_G|
    double gap_duality = 0.0;         // |min Λ_G - sup Γ_G|
    bool gaps_ok = false;             // both gaps <= 1e-7
    bool degenerate = false;
    bool extreme = false;             // coupling is extreme in Λ_G
};

inline InvariantTransportReport solve_mk_invariant(const CostMatrix& c, std::span<const double> p1, std::span<const double> p2,
                                                   const PointAction& a1, const PointAction& a2,
                                                   const Tolerances& tol = default_tolerances) {
    detail::require_same_group(a1, a2, "solve_mk_invariant");
    detail::require_marginals(c, p1, p2);
    const CostMatrix checked(c.table(), a1, a2);
    if (!checked.diagonally_invariant()) throw InputError("solve_mk_invariant: cost is not diagonally invariant");
    detail::require_invariant_measure(a1, p1, "solve_mk_invariant");
    detail::require_invariant_measure(a2, p2, "solve_mk_invariant");

    InvariantTransportReport rep;
    rep.unconstrained = solve_mk(c, p1, p2, tol);
    rep.primal = rep.unconstrained.primal;

    const auto inv = invariant_transport_lp(a1, a2, p1, p2);
    const std::size_t n1 = c.rows(), n2 = c.cols();
    lp::LinearProgram prog(inv.orbits.size());
    for (std::size_t o = 0; o < inv.orbits.size(); ++o) {
        const std::size_t k = inv.orbits[o].front();
        prog.objective[o] = c(k / n2, k % n2);
    }
    for (std::size_t r = 0; r < inv.rows.size(); ++r) prog.add_row(inv.rows[r], lp::Relation::Equal, inv.rhs[r]);
    const auto sol = lp::solve_lp(prog, tol);
    if (!sol.optimal()) throw NumericError(std::string("solve_mk_invariant: Λ_G LP ended with status ") + lp::to_string(sol.status));
    rep.coupling.table = inv.expand(sol.primal, n1, n2);
    rep.coupling.p1.assign(p1.begin(), p1.end());
    rep.coupling.p2.assign(p2.begin(), p2.end());
    rep.invariant_primal = risk(c, rep.coupling.table);
    rep.degenerate = sol.degenerate;

    rep.potentials = detail::invariant_dual(c, a1, a2, p1, p2, rep.invariant_dual);
    rep.gap_invariance = std::abs(rep.primal - rep.invariant_primal);
    rep.gap_duality = std::abs(rep.invariant_primal - rep.invariant_dual);
    rep.gaps_ok = rep.gap_invariance <= 1e-7 && rep.gap_duality <= 1e-7;
    // A basic optimum is a vertex; degenerate bases are re-checked by the nullspace test.
    rep.extreme = rep.degenerate ? is_extreme_invariant_coupling(rep.coupling.table, a1, a2).extreme : true;
    return rep;
}

struct SymmetrizedCoupling {
    Coupling coupling;
    bool input_invariant = false;
    double marginal_residual = 0.0;
};

/// |G|⁻¹ Σ_φ (φ⊗φ)_* Q, each entry averaged in sorted order.
inline SymmetrizedCoupling symmetrize_coupling(const Coupling& q, const PointAction& a1, const PointAction& a2) {
    detail::require_same_group(a1, a2, "symmetrize_coupling");
    const std::size_t n1 = a1.carrier_size(), n2 = a2.carrier_size();
    if (q.table.rows() != n1 || q.table.cols() != n2) throw InputError("symmetrize_coupling: table shape does not match the carriers");
    detail::require_invariant_measure(a1, q.p1, "symmetrize_coupling");
    detail::require_invariant_measure(a2, q.p2, "symmetrize_coupling");
    std::vector<std::vector<std::size_t>> p1, p2;
    for (const auto& g : a1.group().elements()) {
        p1.push_back(a1.permutation(g));
        p2.push_back(a2.permutation(g));
    }
    SymmetrizedCoupling out;
    out.input_invariant = true;
    for (std::size_t g = 0; g < p1.size() && out.input_invariant; ++g)
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j)
                if (std::abs(q.table(p1[g][i], p2[g][j]) - q.table(i, j)) > 1e-12) out.input_invariant = false;
    out.coupling.table = Matrix(n1, n2);
    std::vector<double> vals(p1.size());
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            for (std::size_t g = 0; g < p1.size(); ++g) vals[g] = q.table(p1[g][i], p2[g][j]);
            out.coupling.table(i, j) = sorted_mean(vals);
        }
    out.coupling.p1 = q.p1;
    out.coupling.p2 = q.p2;
    out.marginal_residual = out.coupling.marginal_residual();
    return out;
}

struct ApproximateCouplingReport {
    double primal = 0.0;          // inf over Λ(Q1,Q2) of Q(c)
    double invariant_dual = 0.0;  // sup over Γ_G(c) of Q1(f1) + Q2(f2)
    double gap = 0.0;
    bool gap_ok = false;
    DualPotentials potentials;
};

/// For separately invariant c, invariant potentials lose nothing even when the
/// marginals themselves are not invariant.
inline ApproximateCouplingReport approx_marginal_coupling(const CostMatrix& c, std::span<const double> q1,
                                                          std::span<const double> q2, const PointAction& a1,
                                                          const PointAction& a2) {
    detail::require_same_group(a1, a2, "approx_marginal_coupling");
    const CostMatrix checked(c.table(), a1, a2);
    if (!checked.separately_invariant()) throw InputError("approx_marginal_coupling: cost is not separately invariant");
    ApproximateCouplingReport rep;
    rep.primal = solve_mk(c, q1, q2).primal;
    rep.potentials = detail::invariant_dual(c, a1, a2, q1, q2, rep.invariant_dual);
    rep.gap = std::abs(rep.primal - rep.invariant_dual);
    rep.gap_ok = rep.gap <= 1e-7;
    return rep;
}

}  // namespace amenable
