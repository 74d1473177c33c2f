#pragma once

// Dense two-phase primal simplex with Bland's anti-cycling rule, plus
// exhaustive vertex enumeration of small polytopes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "amenable/config.hpp"
#include "amenable/linalg.hpp"

namespace amenable::lp {

inline constexpr double inf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded, NumericBreakdown };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::NumericBreakdown: return "numeric_breakdown";
    }
    return "unknown";
}

/// A linear program over n variables with per-variable bounds (default [0, inf)).
struct LinearProgram {
    Sense sense = Sense::Minimize;
    Vector objective;
    std::vector<Vector> rows;
    std::vector<Relation> relations;
    Vector rhs;
    Vector lower;
    Vector upper;

    LinearProgram() = default;
    explicit LinearProgram(std::size_t num_vars, Sense s = Sense::Minimize)
        : sense(s), objective(num_vars, 0.0), lower(num_vars, 0.0), upper(num_vars, inf) {}

    std::size_t num_vars() const { return objective.size(); }
    std::size_t num_rows() const { return rows.size(); }

    void add_row(Vector coeffs, Relation rel, double b) {
        if (coeffs.size() != num_vars()) throw InputError("LinearProgram: row length does not match variable count");
        rows.push_back(std::move(coeffs));
        relations.push_back(rel);
        rhs.push_back(b);
    }

    void set_free(std::size_t j) {
        lower[j] = -inf;
        upper[j] = inf;
    }

    void validate() const {
        const std::size_t n = num_vars();
        if (lower.size() != n || upper.size() != n) throw InputError("LinearProgram: bound vectors have wrong length");
        if (relations.size() != rows.size() || rhs.size() != rows.size())
            throw InputError("LinearProgram: inconsistent row data");
        auto finite = [](double v) { return std::isfinite(v); };
        for (double c : objective)
            if (!finite(c)) throw InputError("LinearProgram: non-finite objective entry");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != n) throw InputError("LinearProgram: ragged constraint table");
            if (!finite(rhs[i])) throw InputError("LinearProgram: non-finite right-hand side");
            for (double a : rows[i])
                if (!finite(a)) throw InputError("LinearProgram: non-finite constraint entry");
        }
        for (std::size_t j = 0; j < n; ++j)
            if (lower[j] > upper[j]) throw InputError("LinearProgram: lower bound exceeds upper bound");
    }
};

struct LPSolution {
    Status status = Status::Infeasible;
    Vector primal;           // original variables
    Vector dual;             // one multiplier per original row
    double objective = 0.0;
    double dual_objective = 0.0;
    std::vector<std::size_t> basis;  // original variable indices that are basic
    bool degenerate = false;         // some basic variable sits at zero
    Vector farkas;                   // infeasible: row multipliers y with y'A <= 0 (componentwise, on the
                                     // standardised system) and y'b > 0
    double infeasibility = 0.0;      // phase-1 optimum
    double condition_estimate = 0.0;
    std::size_t iterations = 0;

    bool optimal() const { return status == Status::Optimal; }
};

namespace detail {

// Column mapping for one original variable: x = offset + sign * col [- col2].
struct VarMap {
    std::size_t col = 0;
    double sign = 1.0;
    double offset = 0.0;
    bool split = false;
    std::size_t col2 = 0;
};

class Tableau {
public:
    Tableau(std::size_t m, std::size_t ncols) : m_(m), n_(ncols), t_(m, ncols + 1), obj_(ncols + 1, 0.0), basis_(m) {}

    double& at(std::size_t i, std::size_t j) { return t_(i, j); }
    double at(std::size_t i, std::size_t j) const { return t_(i, j); }
    double& rhs(std::size_t i) { return t_(i, n_); }
    double rhs(std::size_t i) const { return t_(i, n_); }
    std::vector<double>& obj() { return obj_; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t r, std::size_t c) {
        const double p = t_(r, c);
        for (std::size_t j = 0; j <= n_; ++j) t_(r, j) /= p;
        t_(r, c) = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = t_(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) t_(i, j) -= f * t_(r, j);
            t_(i, c) = 0.0;
        }
        const double f = obj_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= f * t_(r, j);
            obj_[c] = 0.0;
        }
        basis_[r] = c;
    }

    void load_objective(const Vector& cost) {
        std::fill(obj_.begin(), obj_.end(), 0.0);
        for (std::size_t j = 0; j < n_; ++j) obj_[j] = cost[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= cb * t_(i, j);
        }
    }

private:
    std::size_t m_;
    std::size_t n_;
    Matrix t_;
    std::vector<double> obj_;  // reduced costs; last entry is -objective
    std::vector<std::size_t> basis_;
};

enum class IterResult { Optimal, Unbounded, IterationLimit };

// Bland's rule: lowest-index improving column; ratio ties go to the lowest basic index.
inline IterResult run_simplex(Tableau& tab, const std::vector<bool>& may_enter, double pivot_tol, double cost_tol,
                              std::size_t& iterations, std::size_t max_iterations) {
    const std::size_t m = tab.rows();
    const std::size_t n = tab.cols();
    while (iterations < max_iterations) {
        std::size_t enter = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (may_enter[j] && tab.obj()[j] < -cost_tol) {
                enter = j;
                break;
            }
        }
        if (enter == n) return IterResult::Optimal;
        std::size_t leave = m;
        double best_ratio = inf;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = tab.at(i, enter);
            if (a <= pivot_tol) continue;
            const double ratio = std::max(tab.rhs(i), 0.0) / a;
            if (leave == m || ratio < best_ratio - 1e-13) {
                best_ratio = ratio;
                leave = i;
            } else if (ratio <= best_ratio + 1e-13 && tab.basis()[i] < tab.basis()[leave]) {
                leave = i;
            }
        }
        if (leave == m) return IterResult::Unbounded;
        tab.pivot(leave, enter);
        ++iterations;
    }
    return IterResult::IterationLimit;
}

}  // namespace detail

/// Solve an LP by the two-phase dense simplex method.
///
/// Variables are mapped to nonnegative columns (shifted, reflected or split
/// according to their bounds), finite upper bounds become extra rows, every
/// row gets an artificial column, and the artificial columns are kept in the
/// tableau so that they carry B^{-1}; the row duals are read from their
/// reduced costs. Infeasible problems return the phase-1 dual as a Farkas ray.
inline LPSolution solve_lp(const LinearProgram& lp, const Tolerances& tol = default_tolerances,
                           const Limits& limits = default_limits) {
    lp.validate();
    const std::size_t n = lp.num_vars();
    if (n > limits.lp_variables || lp.num_rows() > limits.lp_rows)
        throw LimitError("solve_lp: problem exceeds the configured size limit");

    // 1. map variables to nonnegative columns
    std::vector<detail::VarMap> vmap(n);
    std::size_t ncol = 0;
    std::vector<std::pair<std::size_t, double>> bound_rows;  // (column, width)
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = lp.lower[j];
        const double hi = lp.upper[j];
        auto& vm = vmap[j];
        if (std::isfinite(lo)) {
            vm = {ncol++, 1.0, lo, false, 0};
            if (std::isfinite(hi)) bound_rows.emplace_back(vm.col, hi - lo);
        } else if (std::isfinite(hi)) {
            vm = {ncol++, -1.0, hi, false, 0};
        } else {
            vm.col = ncol++;
            vm.split = true;
            vm.col2 = ncol++;
        }
    }
    const std::size_t n_struct = ncol;
    const std::size_t m_orig = lp.num_rows();
    const std::size_t m = m_orig + bound_rows.size();

    // 2. standardised rows a'x' (rel) b'
    Matrix a(m, n_struct);
    Vector b(m, 0.0);
    std::vector<Relation> rel(m, Relation::LessEqual);
    Vector c(n_struct, 0.0);
    double c0 = 0.0;
    const double sense_sign = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& vm = vmap[j];
        const double cj = sense_sign * lp.objective[j];
        if (vm.split) {
            c[vm.col] += cj;
            c[vm.col2] -= cj;
        } else {
            c[vm.col] += cj * vm.sign;
            c0 += cj * vm.offset;
        }
    }
    for (std::size_t i = 0; i < m_orig; ++i) {
        double bi = lp.rhs[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = lp.rows[i][j];
            if (aij == 0.0) continue;
            const auto& vm = vmap[j];
            if (vm.split) {
                a(i, vm.col) += aij;
                a(i, vm.col2) -= aij;
            } else {
                a(i, vm.col) += aij * vm.sign;
                bi -= aij * vm.offset;
            }
        }
        b[i] = bi;
        rel[i] = lp.relations[i];
    }
    for (std::size_t k = 0; k < bound_rows.size(); ++k) {
        a(m_orig + k, bound_rows[k].first) = 1.0;
        b[m_orig + k] = bound_rows[k].second;
        rel[m_orig + k] = Relation::LessEqual;
    }

    // 3. slacks, sign flips, artificials
    std::size_t n_slack = 0;
    for (auto r : rel)
        if (r != Relation::Equal) ++n_slack;
    const std::size_t art0 = n_struct + n_slack;
    const std::size_t total = art0 + m;
    detail::Tableau tab(m, total);
    std::vector<double> flip(m, 1.0);
    std::size_t slack = n_struct;
    std::vector<std::size_t> slack_row;
    std::vector<double> slack_sign;
    for (std::size_t i = 0; i < m; ++i) {
        if (rel[i] != Relation::Equal) {
            slack_row.push_back(i);
            slack_sign.push_back(rel[i] == Relation::LessEqual ? 1.0 : -1.0);
        }
        const double f = b[i] < 0.0 ? -1.0 : 1.0;
        flip[i] = f;
        for (std::size_t j = 0; j < n_struct; ++j) tab.at(i, j) = f * a(i, j);
        if (rel[i] == Relation::LessEqual) tab.at(i, slack++) = f;
        else if (rel[i] == Relation::GreaterEqual) tab.at(i, slack++) = -f;
        tab.at(i, art0 + i) = 1.0;
        tab.rhs(i) = f * b[i];
        tab.basis()[i] = art0 + i;
    }

    LPSolution sol;
    const std::size_t max_iter = 50000 + 50 * total;
    double bscale = 1.0;
    for (double v : b) bscale = std::max(bscale, std::abs(v));

    // Phase 1
    Vector cost1(total, 0.0);
    for (std::size_t i = 0; i < m; ++i) cost1[art0 + i] = 1.0;
    tab.load_objective(cost1);
    std::vector<bool> may_enter(total, true);
    auto r1 = detail::run_simplex(tab, may_enter, tol.pivot, tol.pivot, sol.iterations, max_iter);
    if (r1 == detail::IterResult::IterationLimit) throw NumericError("solve_lp: iteration limit in phase 1");
    const double w = -tab.obj()[total];
    sol.infeasibility = std::max(w, 0.0);
    if (w > tol.feasibility * bscale) {
        sol.status = Status::Infeasible;
        sol.farkas.assign(m_orig, 0.0);
        for (std::size_t i = 0; i < m_orig; ++i) sol.farkas[i] = flip[i] * (1.0 - tab.obj()[art0 + i]);
        return sol;
    }

    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis()[i] < art0) continue;
        for (std::size_t j = 0; j < art0; ++j) {
            if (std::abs(tab.at(i, j)) > tol.pivot) {
                tab.pivot(i, j);
                break;
            }
        }
    }

    // Phase 2
    Vector cost2(total, 0.0);
    for (std::size_t j = 0; j < n_struct; ++j) cost2[j] = c[j];
    tab.load_objective(cost2);
    for (std::size_t i = 0; i < m; ++i) may_enter[art0 + i] = false;
    auto r2 = detail::run_simplex(tab, may_enter, tol.pivot, tol.pivot, sol.iterations, max_iter);
    if (r2 == detail::IterResult::IterationLimit) throw NumericError("solve_lp: iteration limit in phase 2");
    if (r2 == detail::IterResult::Unbounded) {
        sol.status = Status::Unbounded;
        return sol;
    }

    // Recover primal values.
    Vector xs(total, 0.0);
    for (std::size_t i = 0; i < m; ++i) xs[tab.basis()[i]] = tab.rhs(i);
    sol.primal.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& vm = vmap[j];
        sol.primal[j] = vm.split ? xs[vm.col] - xs[vm.col2] : vm.offset + vm.sign * xs[vm.col];
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * sol.primal[j];
    sol.objective = obj;

    // Duals in the standardised (minimisation) system, then undo flips and sense.
    // The artificial column of row i starts as e_i, so its reduced cost is -u_i
    // for the (possibly flipped) row; the unflipped multiplier is flip_i * u_i.
    Vector ystd(m);
    for (std::size_t i = 0; i < m; ++i) ystd[i] = -tab.obj()[art0 + i] * flip[i];
    double dual_obj = c0;
    for (std::size_t i = 0; i < m; ++i) dual_obj += ystd[i] * b[i];
    sol.dual_objective = sense_sign * dual_obj;
    sol.dual.assign(m_orig, 0.0);
    for (std::size_t i = 0; i < m_orig; ++i) sol.dual[i] = sense_sign * ystd[i];

    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t col = tab.basis()[i];
        if (std::abs(tab.rhs(i)) <= tol.feasibility) sol.degenerate = true;
        for (std::size_t j = 0; j < n; ++j) {
            const auto& vm = vmap[j];
            if (vm.col == col || (vm.split && vm.col2 == col)) sol.basis.push_back(j);
        }
    }
    std::sort(sol.basis.begin(), sol.basis.end());
    sol.basis.erase(std::unique(sol.basis.begin(), sol.basis.end()), sol.basis.end());

    // Condition estimate ||B||_1 * ||B^{-1}||_1 with B^{-1} read off the artificial columns.
    double norm_b = 0.0;
    double norm_binv = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t col = tab.basis()[k];
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double orig = 0.0;
            if (col < n_struct) orig = flip[i] * a(i, col);
            else if (col < art0) orig = slack_row[col - n_struct] == i ? flip[i] * slack_sign[col - n_struct] : 0.0;
            else orig = (col - art0 == i) ? 1.0 : 0.0;
            s += std::abs(orig);
        }
        norm_b = std::max(norm_b, s);
        double sinv = 0.0;
        for (std::size_t i = 0; i < m; ++i) sinv += std::abs(tab.at(i, art0 + k));
        norm_binv = std::max(norm_binv, sinv);
    }
    sol.condition_estimate = norm_b * norm_binv;
    sol.status = sol.condition_estimate > tol.condition_limit ? Status::NumericBreakdown : Status::Optimal;
    return sol;
}

/// Independent re-verification of an optimal solution: primal feasibility,
/// dual sign conditions, reduced-cost conditions, complementary slackness.
struct LPCheck {
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double slackness_residual = 0.0;
    double gap = 0.0;
    bool ok(double feas = 1e-9, double dual = 1e-8) const {
        return primal_residual <= feas && dual_residual <= dual && slackness_residual <= dual && gap <= dual;
    }
};

inline LPCheck verify_solution(const LinearProgram& lp, const LPSolution& sol) {
    LPCheck chk;
    const std::size_t n = lp.num_vars();
    const double sgn = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    double scale_obj = 1.0;
    for (double v : lp.objective) scale_obj = std::max(scale_obj, std::abs(v));
    for (std::size_t j = 0; j < n; ++j) {
        chk.primal_residual = std::max(chk.primal_residual, lp.lower[j] - sol.primal[j]);
        chk.primal_residual = std::max(chk.primal_residual, sol.primal[j] - lp.upper[j]);
    }
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        const double ax = dot(lp.rows[i], sol.primal);
        const double slack = lp.rhs[i] - ax;
        const double y = sgn * sol.dual[i];  // multiplier for the minimisation form
        switch (lp.relations[i]) {
            case Relation::LessEqual:
                chk.primal_residual = std::max(chk.primal_residual, -slack);
                chk.dual_residual = std::max(chk.dual_residual, y);
                break;
            case Relation::GreaterEqual:
                chk.primal_residual = std::max(chk.primal_residual, slack);
                chk.dual_residual = std::max(chk.dual_residual, -y);
                break;
            case Relation::Equal:
                chk.primal_residual = std::max(chk.primal_residual, std::abs(slack));
                break;
        }
        chk.slackness_residual = std::max(chk.slackness_residual, std::abs(y * slack));
    }
    for (std::size_t j = 0; j < n; ++j) {
        double d = sgn * lp.objective[j];
        for (std::size_t i = 0; i < lp.num_rows(); ++i) d -= lp.rows[i][j] * sgn * sol.dual[i];
        const double x = sol.primal[j];
        const bool at_lo = std::isfinite(lp.lower[j]) && x <= lp.lower[j] + 1e-9;
        const bool at_hi = std::isfinite(lp.upper[j]) && x >= lp.upper[j] - 1e-9;
        double viol = 0.0;
        if (at_lo && at_hi) viol = 0.0;
        else if (at_lo) viol = std::max(0.0, -d);
        else if (at_hi) viol = std::max(0.0, d);
        else viol = std::abs(d);
        chk.dual_residual = std::max(chk.dual_residual, viol / scale_obj);
    }
    chk.gap = std::abs(sol.objective - sol.dual_objective);
    return chk;
}

// ---- vertex enumeration ---------------------------------------------------

/// {x : eq_rows x = eq_rhs, ineq_rows x <= ineq_rhs}
struct Polytope {
    std::size_t dimension = 0;
    std::vector<Vector> eq_rows;
    Vector eq_rhs;
    std::vector<Vector> ineq_rows;
    Vector ineq_rhs;

    bool contains(const Vector& x, double tol = 1e-9) const {
        for (std::size_t i = 0; i < eq_rows.size(); ++i)
            if (std::abs(dot(eq_rows[i], x) - eq_rhs[i]) > tol) return false;
        for (std::size_t i = 0; i < ineq_rows.size(); ++i)
            if (dot(ineq_rows[i], x) > ineq_rhs[i] + tol) return false;
        return true;
    }

    LinearProgram as_lp(Vector objective, Sense sense) const {
        LinearProgram lp(dimension, sense);
        lp.objective = std::move(objective);
        for (std::size_t j = 0; j < dimension; ++j) lp.set_free(j);
        for (std::size_t i = 0; i < eq_rows.size(); ++i) lp.add_row(eq_rows[i], Relation::Equal, eq_rhs[i]);
        for (std::size_t i = 0; i < ineq_rows.size(); ++i) lp.add_row(ineq_rows[i], Relation::LessEqual, ineq_rhs[i]);
        return lp;
    }
};

/// All vertices of a bounded polytope, by enumerating bases of active
/// constraints. Output is deduplicated at `dedup` and sorted lexicographically.
inline std::vector<Vector> enumerate_vertices(const Polytope& poly, const Tolerances& tol = default_tolerances,
                                              const Limits& limits = default_limits) {
    const std::size_t d = poly.dimension;
    if (d > limits.vertex_dimension) throw LimitError("enumerate_vertices: dimension cap exceeded");
    if (poly.eq_rows.size() != poly.eq_rhs.size() || poly.ineq_rows.size() != poly.ineq_rhs.size())
        throw InputError("enumerate_vertices: inconsistent constraint data");

    // Boundedness and emptiness via 2d LPs.
    for (std::size_t j = 0; j < d; ++j) {
        for (auto sense : {Sense::Minimize, Sense::Maximize}) {
            Vector e(d, 0.0);
            e[j] = 1.0;
            auto sol = solve_lp(poly.as_lp(e, sense), tol, limits);
            if (sol.status == Status::Infeasible) return {};
            if (sol.status == Status::Unbounded) throw InputError("enumerate_vertices: polytope is unbounded");
        }
    }

    // Independent subset of the equality rows.
    std::vector<Vector> eq;
    Vector eqb;
    for (std::size_t i = 0; i < poly.eq_rows.size(); ++i) {
        std::vector<Vector> trial = eq;
        trial.push_back(poly.eq_rows[i]);
        if (rank(Matrix::from_rows(trial)) == trial.size()) {
            eq = std::move(trial);
            eqb.push_back(poly.eq_rhs[i]);
        }
    }
    if (eq.size() > d) return {};
    const std::size_t k = d - eq.size();
    const std::size_t m = poly.ineq_rows.size();
    if (k > m) return {};

    // Guard against combinatorial blow-up.
    double combos = 1.0;
    for (std::size_t i = 0; i < k; ++i) combos = combos * static_cast<double>(m - i) / static_cast<double>(i + 1);
    if (combos > 5e6) throw LimitError("enumerate_vertices: too many candidate bases");

    std::vector<Vector> verts;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
        Matrix sys(d, d);
        Vector rhs(d);
        for (std::size_t i = 0; i < eq.size(); ++i) {
            std::copy(eq[i].begin(), eq[i].end(), sys.row(i).begin());
            rhs[i] = eqb[i];
        }
        for (std::size_t i = 0; i < k; ++i) {
            std::copy(poly.ineq_rows[pick[i]].begin(), poly.ineq_rows[pick[i]].end(), sys.row(eq.size() + i).begin());
            rhs[eq.size() + i] = poly.ineq_rhs[pick[i]];
        }
        try {
            Vector x = solve(sys, rhs, 1e-10);
            if (poly.contains(x, tol.feasibility)) {
                bool dup = false;
                for (const auto& v : verts)
                    if (max_abs_diff(v, x) <= tol.dedup) {
                        dup = true;
                        break;
                    }
                if (!dup) verts.push_back(std::move(x));
            }
        } catch (const NumericError&) {
            // singular basis: not a vertex
        }
        if (k == 0) break;
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == m - k + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    for (auto& v : verts)
        for (double& x : v)
            if (std::abs(x) < tol.dedup) x = 0.0;
    std::sort(verts.begin(), verts.end());
    return verts;
}

}  // namespace amenable::lp
