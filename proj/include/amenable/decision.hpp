#pragma once

// Hunt-Stein maximin tests as linear programs, invariantisation of critical
// functions, and invariant minimisation of support functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "amenable/action.hpp"
#include "amenable/averaging.hpp"
#include "amenable/config.hpp"
#include "amenable/linalg.hpp"
#include "amenable/lp.hpp"

namespace amenable {

namespace detail {

inline bool contains_vector(const std::vector<Vector>& set, std::span<const double> v, double tol) {
    return std::any_of(set.begin(), set.end(), [&](const Vector& s) { return max_abs_diff(s, Vector(v.begin(), v.end())) <= tol; });
}

}  // namespace detail

/// Finite hypothesis H and alternative A, each a G-invariant set of measures.
struct TestingProblem {
    PointAction action;
    std::vector<Vector> hypothesis;
    std::vector<Vector> alternative;
    double alpha = 0.05;

    /// Checks probabilities, set invariance, 0 <= α <= 1 and (unless allowed) H ∩ A = ∅.
    void validate(bool allow_overlap = false) const {
        if (alpha < 0.0 || alpha > 1.0) throw InputError("TestingProblem: level must lie in [0,1]");
        if (alternative.empty()) throw InputError("TestingProblem: alternative set is empty");
        const std::size_t m = action.carrier_size();
        for (const auto* set : {&hypothesis, &alternative})
            for (const auto& p : *set) {
                if (p.size() != m) throw InputError("TestingProblem: measure length does not match the carrier");
                require_probability(p);
                for (const auto& g : action.probe_elements())
                    if (!detail::contains_vector(*set, action.apply(g, p), 1e-9))
                        throw InputError("TestingProblem: set is not invariant under " + g.str());
            }
        if (!allow_overlap)
            for (const auto& q : hypothesis)
                if (detail::contains_vector(alternative, q, 1e-12)) throw InputError("TestingProblem: H and A intersect");
    }
};

struct MaximinTest {
    Vector w;            // critical function
    double value = 0.0;  // min over A of P(w)
};

inline double test_power(const std::vector<Vector>& set, std::span<const double> w) {
    double v = lp::inf;
    for (const auto& p : set) v = std::min(v, dot(p, w));
    return v;
}

inline double test_size(const std::vector<Vector>& set, std::span<const double> w) {
    double v = -lp::inf;
    for (const auto& q : set) v = std::max(v, dot(q, w));
    return set.empty() ? 0.0 : v;
}

/// max t  s.t.  P(w) >= t (P ∈ A),  Q(w) <= α (Q ∈ H),  0 <= w <= 1.
inline MaximinTest solve_maximin_test(const TestingProblem& prob, bool allow_overlap = false) {
    prob.validate(allow_overlap);
    const std::size_t m = prob.action.carrier_size();
    lp::LinearProgram lp(m + 1, lp::Sense::Maximize);
    lp.objective[m] = 1.0;
    lp.set_free(m);
    for (std::size_t i = 0; i < m; ++i) lp.upper[i] = 1.0;
    for (const auto& p : prob.alternative) {
        Vector row(m + 1);
        for (std::size_t i = 0; i < m; ++i) row[i] = -p[i];
        row[m] = 1.0;
        lp.add_row(std::move(row), lp::Relation::LessEqual, 0.0);
    }
    for (const auto& q : prob.hypothesis) {
        Vector row(q.begin(), q.end());
        row.push_back(0.0);
        lp.add_row(std::move(row), lp::Relation::LessEqual, prob.alpha);
    }
    const auto sol = lp::solve_lp(lp);
    if (!sol.optimal()) throw NumericError(std::string("solve_maximin_test: LP ended with status ") + lp::to_string(sol.status));
    MaximinTest out;
    out.w.assign(sol.primal.begin(), sol.primal.begin() + static_cast<std::ptrdiff_t>(m));
    for (double& v : out.w) v = std::clamp(v, 0.0, 1.0);
    out.value = test_power(prob.alternative, out.w);
    return out;
}

struct InvariantTest {
    Vector w_bar;
    double value_hat = 0.0;   // min_A P(ŵ)
    double value_bar = 0.0;   // min_A P(w̄)
    double size_bar = 0.0;    // max_H Q(w̄)
    bool feasible = false;
    bool invariant = false;   // exact
    bool sandwich = false;    // min_φ φP(ŵ) <= P(w̄) <= max_φ φP(ŵ) for every P in H ∪ A
    bool value_preserved = false;  // |value_bar - value_hat| <= 1e-9
};

/// w̄ = Reynolds average of ŵ under the function action.
inline InvariantTest invariantize_test(const TestingProblem& prob, std::span<const double> w_hat, bool allow_overlap = false) {
    prob.validate(allow_overlap);
    const std::size_t m = prob.action.carrier_size();
    if (w_hat.size() != m) throw InputError("invariantize_test: critical function length does not match the carrier");
    for (double v : w_hat)
        if (v < -1e-9 || v > 1.0 + 1e-9) throw InputError("invariantize_test: critical function leaves [0,1]");
    if (test_size(prob.hypothesis, w_hat) > prob.alpha + 1e-9) throw InputError("invariantize_test: critical function exceeds the level");

    InvariantTest out;
    out.w_bar = reynolds_average(prob.action, w_hat);
    out.value_hat = test_power(prob.alternative, w_hat);
    out.value_bar = test_power(prob.alternative, out.w_bar);
    out.size_bar = test_size(prob.hypothesis, out.w_bar);
    out.feasible = out.size_bar <= prob.alpha + 1e-9 &&
                   std::all_of(out.w_bar.begin(), out.w_bar.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
    out.invariant = true;
    for (const auto& g : prob.action.probe_elements()) {
        const auto perm = prob.action.permutation(g);
        for (std::size_t i = 0; i < m; ++i)
            if (out.w_bar[perm[i]] != out.w_bar[i]) out.invariant = false;
    }
    out.sandwich = true;
    const auto elems = prob.action.group().elements();
    for (const auto* set : {&prob.hypothesis, &prob.alternative})
        for (const auto& p : *set) {
            double lo = lp::inf, hi = -lp::inf;
            for (const auto& g : elems) {
                const double v = dot(prob.action.apply(g, p), w_hat);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double mid = dot(p, out.w_bar);
            if (mid < lo - 1e-12 || mid > hi + 1e-12) out.sandwich = false;
        }
    out.value_preserved = std::abs(out.value_bar - out.value_hat) <= 1e-9;
    return out;
}

// ---- support-function minimisation ------------------------------------------

struct SupportMinimum {
    Vector y_hat;
    Vector y_bar;
    double value_hat = 0.0;  // H(y_hat | E) = max_{x∈E} ⟨x, y_hat⟩
    double value_bar = 0.0;
    bool y_bar_feasible = false;
    bool value_preserved = false;  // |value_bar - value_hat| <= 1e-9
    bool bracket = false;          // -H(-x|Π(ŷ)) <= ⟨x,ȳ⟩ <= H(x|Π(ŷ)) for x ∈ E
};

inline double support_value(const std::vector<Vector>& e, std::span<const double> y) {
    double v = -lp::inf;
    for (const auto& x : e) v = std::max(v, dot(x, y));
    return v;
}

/// Minimises H(y|E) over the polytope F. E and F must be invariant: E under the
/// action, F under its dual (checked on the vertices of F). ȳ is the Reynolds
/// average of ŷ under the dual action.
inline SupportMinimum minimize_support_function(const std::vector<Vector>& e, const lp::Polytope& f, const LinearAction& action) {
    const std::size_t d = action.dim();
    if (e.empty()) throw InputError("minimize_support_function: E is empty");
    if (f.dimension != d) throw InputError("minimize_support_function: F has the wrong dimension");
    if (!action.group().finite()) throw InputError("minimize_support_function: group must be finite-enumerated");
    for (const auto& x : e) {
        if (x.size() != d) throw InputError("minimize_support_function: element of E has the wrong dimension");
        for (const auto& g : action.probe_elements())
            if (!detail::contains_vector(e, action.apply(g, x), 1e-9))
                throw InputError("minimize_support_function: E is not invariant under " + g.str());
    }
    const auto verts = lp::enumerate_vertices(f);
    if (verts.empty()) throw InputError("minimize_support_function: F is empty");
    const LinearAction dual = dual_action(action);
    for (const auto& v : verts)
        for (const auto& g : dual.probe_elements())
            if (!f.contains(dual.apply(g, v))) throw InputError("minimize_support_function: F is not invariant under " + g.str());

    lp::LinearProgram prog(d + 1);
    prog.objective[d] = 1.0;
    for (std::size_t i = 0; i <= d; ++i) prog.set_free(i);
    for (const auto& x : e) {
        Vector row(x.begin(), x.end());
        row.push_back(-1.0);
        prog.add_row(std::move(row), lp::Relation::LessEqual, 0.0);
    }
    auto widen = [&](const Vector& r) {
        Vector w = r;
        w.push_back(0.0);
        return w;
    };
    for (std::size_t i = 0; i < f.eq_rows.size(); ++i) prog.add_row(widen(f.eq_rows[i]), lp::Relation::Equal, f.eq_rhs[i]);
    for (std::size_t i = 0; i < f.ineq_rows.size(); ++i) prog.add_row(widen(f.ineq_rows[i]), lp::Relation::LessEqual, f.ineq_rhs[i]);
    const auto sol = lp::solve_lp(prog);
    if (!sol.optimal()) throw NumericError(std::string("minimize_support_function: LP ended with status ") + lp::to_string(sol.status));

    SupportMinimum out;
    out.y_hat.assign(sol.primal.begin(), sol.primal.begin() + static_cast<std::ptrdiff_t>(d));
    out.y_bar = matvec(reynolds_projector(dual), out.y_hat);
    out.value_hat = support_value(e, out.y_hat);
    out.value_bar = support_value(e, out.y_bar);
    out.y_bar_feasible = f.contains(out.y_bar);
    out.value_preserved = std::abs(out.value_bar - out.value_hat) <= 1e-9;
    out.bracket = true;
    const auto elems = action.group().elements();
    for (const auto& x : e) {
        double lo = lp::inf, hi = -lp::inf;
        for (const auto& g : elems) {
            const double v = dot(x, dual.apply(g, out.y_hat));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double mid = dot(x, out.y_bar);
        if (mid < lo - 1e-9 || mid > hi + 1e-9) out.bracket = false;
    }
    return out;
}

}  // namespace amenable
