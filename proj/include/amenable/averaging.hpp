#pragma once

// Følner averages F_n(x) = |A_n|^{-1} Σ_{φ∈A_n} φx, Reynolds projectors,
// mean-ergodic limits and the contraction width of orbitopes.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "amenable/action.hpp"
#include "amenable/config.hpp"
#include "amenable/group.hpp"
#include "amenable/linalg.hpp"

namespace amenable {

/// Anything that maps (element, vector) to a vector of the same dimension.
template <class A>
concept VectorAction = requires(const A& a, const Element& g, std::span<const double> x) {
    { a.group() } -> std::convertible_to<const Group&>;
    { a.dim() } -> std::convertible_to<std::size_t>;
    { a.apply(g, x) } -> std::convertible_to<Vector>;
    { a.probe_elements() } -> std::convertible_to<std::vector<Element>>;
};

struct AverageReport {
    std::size_t n = 0;
    Vector value;
    double residual = 0.0;           // ||F_n(x) - F_{n-1}(x)||, with F_0(x) := x
    double invariance_defect = 0.0;  // max over probed g of ||g·value - value||_inf
};

namespace detail {

template <VectorAction A>
void check_family(const A& action, const FolnerFamily& family) {
    if (!(action.group() == family.group()))
        throw InputError("Følner family belongs to " + family.group().name() + ", action to " + action.group().name());
}

template <VectorAction A>
Vector window_mean(const A& action, std::span<const double> x, const std::vector<Element>& window) {
    if (window.empty()) throw InputError("folner_average: empty window");
    CascadeSum acc(x.size());
    for (const auto& g : window) acc.push(action.apply(g, x));
    return divide(acc.total(), static_cast<double>(window.size()));
}

template <VectorAction A>
double invariance_defect(const A& action, std::span<const double> v) {
    double worst = 0.0;
    for (const auto& g : action.probe_elements()) worst = std::max(worst, max_abs_diff(action.apply(g, v), v));
    return worst;
}

}  // namespace detail

/// F_n(target), summed pairwise in canonical window order.
template <VectorAction A>
AverageReport folner_average(const A& action, std::span<const double> target, const FolnerFamily& family,
                             std::size_t n) {
    detail::check_family(action, family);
    if (target.size() != action.dim()) throw InputError("folner_average: dimension mismatch");
    AverageReport rep;
    rep.n = n;
    rep.value = detail::window_mean(action, target, family.window(n));
    const Vector prev = n > 1 ? detail::window_mean(action, target, family.window(n - 1))
                              : Vector(target.begin(), target.end());
    rep.residual = norm2(sub(rep.value, prev));
    rep.invariance_defect = detail::invariance_defect(action, rep.value);
    return rep;
}

/// R = |G|^{-1} Σ_g ρ(g), checked idempotent (and symmetric for orthogonal actions).
inline Matrix reynolds_projector(const LinearAction& action) {
    if (!action.group().finite()) throw InputError("reynolds_projector: group must be finite-enumerated");
    Matrix r = detail::mean_table(action);
    if (max_abs_diff(matmul(r, r), r) > 1e-10) throw VerificationError("reynolds_projector: R^2 != R");
    if (action.orthogonal() && max_abs_diff(r, r.transpose()) > 1e-10)
        throw VerificationError("reynolds_projector: orthogonal action but R != R^T");
    return r;
}

inline Matrix reynolds_projector(const PointAction& action) { return reynolds_projector(action.linear()); }

/// Full-group average of a table under a point action. Each entry is the mean
/// of h over one orbit (with multiplicity), summed in sorted order, so the
/// result is exactly constant on orbits.
inline Vector reynolds_average(const PointAction& action, std::span<const double> h) {
    if (h.size() != action.carrier_size()) throw InputError("reynolds_average: table length does not match the carrier");
    const auto elems = action.group().elements();
    Vector out(h.size());
    std::vector<double> vals(elems.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        for (std::size_t k = 0; k < elems.size(); ++k) vals[k] = h[action.image(elems[k], i)];
        out[i] = sorted_mean(vals);
    }
    return out;
}

// ---- mean ergodic theorem -------------------------------------------------

struct ErgodicTraceRow {
    std::size_t n = 0;
    double residual = 0.0;
    double invariance_defect = 0.0;
    double distance = 0.0;  // ||F_n(x) - limit||
    double bound = 0.0;     // 2 max_gen (1 - folner_ratio(n, gen)) ||x||
};

struct ErgodicResult {
    Vector limit;                 // projection of x onto X_G
    Vector last_average;          // F_n(x) at the final n
    std::size_t final_n = 0;
    bool converged = false;
    std::vector<ErgodicTraceRow> trace;
};

struct ErgodicOptions {
    double tol = 1e-6;
    std::size_t n_max = 1000;
    bool stop_at_convergence = true;
};

/// Runs F_n(x) for n = 1..n_max under an orthogonal action. The limit is the
/// orthogonal projection of x onto X_G, computed independently: through the
/// Reynolds projector for finite groups, through the common fixed space of the
/// generator tables otherwise. Convergence means ||F_n(x) - limit|| <= tol.
inline ErgodicResult ergodic_limit(const LinearAction& action, const FolnerFamily& family, std::span<const double> x,
                                   const ErgodicOptions& opt = {}) {
    if (!action.orthogonal()) throw InputError("ergodic_limit: action is not orthogonal");
    detail::check_family(action, family);
    if (x.size() != action.dim()) throw InputError("ergodic_limit: dimension mismatch");
    if (opt.n_max == 0) throw InputError("ergodic_limit: n_max must be >= 1");
    const auto& g = action.group();

    ErgodicResult res;
    if (g.finite()) {
        res.limit = matvec(reynolds_projector(action), x);
    } else {
        std::vector<Matrix> gens;
        for (const auto& s : g.generators()) gens.push_back(action.matrix(s));
        res.limit.assign(x.size(), 0.0);
        for (const auto& b : common_fixed_space(gens)) {
            const double c = dot(b, x);
            for (std::size_t i = 0; i < x.size(); ++i) res.limit[i] += c * b[i];
        }
    }

    const double xnorm = norm2(x);
    auto bound_at = [&](std::size_t n) {
        if (g.finite()) return 0.0;
        double worst = 0.0;
        const double size = static_cast<double>(family.window_size(n));
        for (const auto& s : g.generators()) {
            worst = std::max(worst, 1.0 - static_cast<double>(family.overlap(n, s)) / size);
            worst = std::max(worst, 1.0 - static_cast<double>(family.overlap(n, g.inverse(s))) / size);
        }
        return 2.0 * worst * xnorm;
    };

    Vector prev(x.begin(), x.end());
    auto record = [&](std::size_t n, Vector avg) {
        ErgodicTraceRow row;
        row.n = n;
        row.residual = norm2(sub(avg, prev));
        row.invariance_defect = detail::invariance_defect(action, avg);
        row.distance = norm2(sub(avg, res.limit));
        row.bound = bound_at(n);
        res.trace.push_back(row);
        res.final_n = n;
        res.converged = row.distance <= opt.tol;
        prev = avg;
        res.last_average = std::move(avg);
        return res.converged && opt.stop_at_convergence;
    };

    if (family.prefix_nested()) {
        // Windows grow by appending, so one cascade over window(n_max) yields
        // every F_n with the same bits as a fresh reduction.
        const auto big = family.window(opt.n_max);
        CascadeSum acc(x.size());
        std::size_t used = 0;
        for (std::size_t n = 1; n <= opt.n_max; ++n) {
            const std::size_t size = family.window_size(n);
            while (used < size) acc.push(action.apply(big[used++], x));
            if (record(n, divide(acc.total(), static_cast<double>(size)))) break;
        }
    } else {
        for (std::size_t n = 1; n <= opt.n_max; ++n)
            if (record(n, detail::window_mean(action, x, family.window(n)))) break;
    }
    return res;
}

inline void write_trace_csv(std::ostream& os, const std::vector<ErgodicTraceRow>& trace) {
    os << "n,residual,invariance_defect,bound\n";
    os.precision(17);
    for (const auto& r : trace) os << r.n << ',' << r.residual << ',' << r.invariance_defect << ',' << r.bound << '\n';
}

// ---- contraction width ----------------------------------------------------

struct ContractionSample {
    std::vector<Element> generators;  // z = mean of φ x0 over these
    double measured = 0.0;            // ||F_n(z - x0)||
    double bound = 0.0;               // max_i |A_n △ A_n φ_i| / |A_n| * ||x0||
};

struct ContractionReport {
    double width = 0.0;  // max over sampled pairs of ||F_n(z - z')||
    bool certificate_holds = true;
    std::vector<ContractionSample> samples;
};

/// Diagnostic width of F_n(Π(x0)) over a fixed grid of convex combinations of
/// orbit points (orbit points, pairwise midpoints, barycenter), with the
/// symmetric-difference certificate checked for every sample.
inline ContractionReport contraction_width(const LinearAction& action, std::span<const double> x0,
                                           const FolnerFamily& family, std::size_t n, std::size_t max_orbit = 24) {
    if (!action.orthogonal()) throw InputError("contraction_width: action is not orthogonal");
    detail::check_family(action, family);
    const auto& g = action.group();

    std::vector<Element> phis;
    auto add = [&](const Element& e) {
        if (phis.size() < max_orbit && std::find(phis.begin(), phis.end(), e) == phis.end()) phis.push_back(e);
    };
    add(g.identity());
    if (g.finite()) {
        for (const auto& e : g.elements()) add(e);
    } else {
        for (const auto& s : g.generators()) {
            add(s);
            add(g.inverse(s));
        }
        for (const auto& e : g.impl().window(1)) add(e);
    }

    const auto window = family.window(n);
    const double size = static_cast<double>(window.size());
    const double x0norm = norm2(x0);
    std::vector<Vector> f_orbit;  // F_n(φ x0)
    std::vector<double> ratio;    // |A_n △ A_n φ| / |A_n|
    for (const auto& phi : phis) {
        f_orbit.push_back(detail::window_mean(action, action.apply(phi, x0), window));
        ratio.push_back(static_cast<double>(translate_symmetric_difference(family, n, phi, TranslateSide::Right)) / size);
    }
    const Vector f_x0 = detail::window_mean(action, x0, window);

    std::vector<std::vector<std::size_t>> combos;
    for (std::size_t i = 0; i < phis.size(); ++i) combos.push_back({i});
    for (std::size_t i = 0; i < phis.size(); ++i)
        for (std::size_t j = i + 1; j < phis.size(); ++j) combos.push_back({i, j});
    if (phis.size() > 2) {
        std::vector<std::size_t> all(phis.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        combos.push_back(all);
    }

    ContractionReport rep;
    std::vector<Vector> f_z;
    for (const auto& c : combos) {
        Vector fz(x0.size(), 0.0);
        double b = 0.0;
        ContractionSample s;
        for (auto i : c) {
            for (std::size_t k = 0; k < fz.size(); ++k) fz[k] += f_orbit[i][k] / static_cast<double>(c.size());
            b = std::max(b, ratio[i]);
            s.generators.push_back(phis[i]);
        }
        s.measured = norm2(sub(fz, f_x0));
        s.bound = b * x0norm;
        if (s.measured > s.bound + 1e-10) rep.certificate_holds = false;
        rep.samples.push_back(std::move(s));
        f_z.push_back(std::move(fz));
    }
    for (std::size_t i = 0; i < f_z.size(); ++i)
        for (std::size_t j = i + 1; j < f_z.size(); ++j) rep.width = std::max(rep.width, norm2(sub(f_z[i], f_z[j])));
    return rep;
}

}  // namespace amenable
