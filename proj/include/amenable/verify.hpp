#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "amenable/averaging.hpp"
#include "amenable/cocycle.hpp"
#include "amenable/coupling.hpp"
#include "amenable/decision.hpp"
#include "amenable/embedding.hpp"
#include "amenable/group.hpp"
#include "amenable/lp.hpp"
#include "amenable/orbitope.hpp"

namespace amenable::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string detail;
    double seconds = 0.0;  // wall time; never part of the printed line
};

struct SuiteOptions {
    std::uint64_t seed = 7;
};

/// "[PASS] 4 invariant-kantorovich: 100 cases, ..." with no timing, so the
/// line is reproducible for a fixed seed.
inline std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << ": " << r.cases << " cases, " << r.failures
       << " failures";
    if (!r.detail.empty()) os << "; " << r.detail;
    return os.str();
}

// ---- oracles --------------------------------------------------------------
// Each oracle recomputes its quantity from first principles without the
// library routine under test.

namespace oracle {

inline Vector random_probability(std::mt19937_64& rng, std::size_t m) {
    std::exponential_distribution<double> ed(1.0);
    Vector p(m);
    double s = 0.0;
    for (auto& v : p) s += (v = ed(rng));
    for (auto& v : p) v /= s;
    return p;
}

inline Vector random_invariant_probability(std::mt19937_64& rng, const PointAction& a) {
    const auto orbs = a.orbits();
    const Vector w = random_probability(rng, orbs.size());
    Vector p(a.carrier_size());
    for (std::size_t o = 0; o < orbs.size(); ++o)
        for (auto i : orbs[o]) p[i] = w[o] / static_cast<double>(orbs[o].size());
    return p;
}

/// One uniform value per diagonal orbit class.
inline Matrix random_invariant_cost(std::mt19937_64& rng, const PointAction& a1, const PointAction& a2) {
    const std::size_t n1 = a1.carrier_size(), n2 = a2.carrier_size();
    std::uniform_real_distribution<double> ud(0.0, 5.0);
    Matrix c(n1, n2);
    std::vector<bool> done(n1 * n2, false);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            if (done[i * n2 + j]) continue;
            const double v = ud(rng);
            for (const auto& g : a1.group().elements()) {
                const std::size_t gi = a1.image(g, i), gj = a2.image(g, j);
                c(gi, gj) = v;
                done[gi * n2 + gj] = true;
            }
        }
    return c;
}

/// R[i][j] = |{g : g i = j}| / |G|.
inline Matrix counting_projector(const PointAction& a) {
    const std::size_t m = a.carrier_size();
    const auto elems = a.group().elements();
    Matrix r(m, m);
    for (const auto& g : elems)
        for (std::size_t i = 0; i < m; ++i) r(i, a.image(g, i)) += 1.0;
    for (auto& v : r.data()) v /= static_cast<double>(elems.size());
    return r;
}

/// Random PSD table, averaged over the diagonal action in sorted order.
inline Matrix random_invariant_gram(std::mt19937_64& rng, const PointAction& a) {
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

/// Cholesky of K + shift·I; succeeds iff K + shift·I is positive definite.
inline bool cholesky_succeeds(const Matrix& k, double shift) {
    const std::size_t n = k.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = k(j, j) + shift;
        for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
        if (!(d > 0.0)) return false;
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = k(i, j);
            for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
            l(i, j) = s / l(j, j);
        }
    }
    return true;
}

/// z ≺ λ: equal totals and dominated partial sums of the decreasing rearrangement.
inline bool majorized(Vector z, Vector lambda, double tol) {
    std::sort(z.begin(), z.end(), std::greater<>());
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    double sz = 0.0, sl = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        sz += z[k];
        sl += lambda[k];
        if (k + 1 < z.size() && sz > sl + tol) return false;
    }
    return std::abs(sz - sl) <= tol;
}

/// Λ_G in full coordinates: marginals, P >= 0 and P(gi,gj) = P(i,j) for generators g.
inline lp::Polytope invariant_coupling_polytope(const PointAction& a1, const PointAction& a2, const Vector& p1,
                                                const Vector& p2) {
    const std::size_t n1 = a1.carrier_size(), n2 = a2.carrier_size(), d = n1 * n2;
    lp::Polytope poly;
    poly.dimension = d;
    for (std::size_t i = 0; i < n1; ++i) {
        Vector r(d, 0.0);
        for (std::size_t j = 0; j < n2; ++j) r[i * n2 + j] = 1.0;
        poly.eq_rows.push_back(r);
        poly.eq_rhs.push_back(p1[i]);
    }
    for (std::size_t j = 0; j < n2; ++j) {
        Vector r(d, 0.0);
        for (std::size_t i = 0; i < n1; ++i) r[i * n2 + j] = 1.0;
        poly.eq_rows.push_back(r);
        poly.eq_rhs.push_back(p2[j]);
    }
    for (const auto& g : a1.group().generators())
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                const std::size_t k = i * n2 + j, gk = a1.image(g, i) * n2 + a2.image(g, j);
                if (k == gk) continue;
                Vector r(d, 0.0);
                r[k] = 1.0;
                r[gk] = -1.0;
                poly.eq_rows.push_back(r);
                poly.eq_rhs.push_back(0.0);
            }
    for (std::size_t k = 0; k < d; ++k) {
        Vector r(d, 0.0);
        r[k] = -1.0;
        poly.ineq_rows.push_back(r);
        poly.ineq_rhs.push_back(0.0);
    }
    return poly;
}

inline std::vector<Vector> measure_orbit(const PointAction& a, const Vector& p) {
    std::vector<Vector> out;
    for (const auto& g : a.group().elements()) {
        const Vector q = a.apply(g, p);
        if (std::none_of(out.begin(), out.end(), [&](const Vector& r) { return r == q; })) out.push_back(q);
    }
    return out;
}

inline double expectation(const Vector& p, const Vector& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * w[i];
    return s;
}

inline double min_power(const std::vector<Vector>& set, const Vector& w) {
    double v = lp::inf;
    for (const auto& p : set) v = std::min(v, expectation(p, w));
    return v;
}

inline bool exactly_invariant(const PointAction& a, const Vector& x) {
    for (const auto& g : a.group().elements()) {
        const auto perm = a.permutation(g);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[perm[i]] != x[i]) return false;
    }
    return true;
}

/// max t over orbit-constant tests, by vertex enumeration of {(w_O, t)}.
inline double invariant_maximin(const TestingProblem& prob) {
    const auto orbs = prob.action.orbits();
    const std::size_t k = orbs.size(), d = k + 1;
    auto orbit_row = [&](const Vector& p) {
        Vector r(d, 0.0);
        for (std::size_t o = 0; o < k; ++o)
            for (auto i : orbs[o]) r[o] += p[i];
        return r;
    };
    lp::Polytope poly;
    poly.dimension = d;
    auto add = [&](Vector r, double b) {
        poly.ineq_rows.push_back(std::move(r));
        poly.ineq_rhs.push_back(b);
    };
    for (const auto& p : prob.alternative) {
        Vector r = scale(orbit_row(p), -1.0);
        r[k] = 1.0;
        add(r, 0.0);
    }
    for (const auto& q : prob.hypothesis) add(orbit_row(q), prob.alpha);
    for (std::size_t o = 0; o < d; ++o) {
        Vector lo(d, 0.0), hi(d, 0.0);
        lo[o] = -1.0;
        hi[o] = 1.0;
        add(lo, 0.0);
        add(hi, 1.0);
    }
    double best = -lp::inf;
    for (const auto& v : lp::enumerate_vertices(poly)) best = std::max(best, v[k]);
    return best;
}

}  // namespace oracle

// ---- criteria -------------------------------------------------------------

namespace detail {

class Tally {
public:
    Tally(int id, std::string name) : t0_(std::chrono::steady_clock::now()) {
        r_.id = id;
        r_.name = std::move(name);
    }
    void check(bool ok, const std::string& what = {}) {
        ++r_.cases;
        if (!ok) {
            ++r_.failures;
            if (first_.empty()) first_ = what;
        }
    }
    void note(const std::string& s) { r_.detail += (r_.detail.empty() ? "" : "; ") + s; }
    double elapsed() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }
    CriterionResult finish(bool extra_ok = true) {
        r_.seconds = elapsed();
        r_.passed = r_.failures == 0 && extra_ok && r_.cases > 0;
        if (!first_.empty()) note("first failure: " + first_);
        return r_;
    }

private:
    CriterionResult r_;
    std::string first_;
    std::chrono::steady_clock::time_point t0_;
};

inline std::string sci(double v) {
    std::ostringstream os;
    os.precision(2);
    os << std::scientific << v;
    return os.str();
}

inline Vector flatten(const Matrix& m) { return m.data(); }

}  // namespace detail

/// Z windows [0,n]: ratio (n+1-t)/(n+1) for t in {1,2,5}, every n up to 10⁴;
/// the S_3 window of finsym has ratio 1 for every φ supported on its points.
inline CriterionResult folner_ratios(const SuiteOptions&, std::size_t n_max = 10000) {
    detail::Tally t(1, "folner-ratios");
    const FolnerFamily z(integer_lattice(1));
    for (std::int64_t shift : {1, 2, 5}) {
        const Element phi{shift};
        for (std::size_t n = static_cast<std::size_t>(shift) - 1; n <= n_max; ++n) {
            if (n == 0) continue;
            const auto r = folner_ratio(z, n, phi);
            const double expect = static_cast<double>(n + 1 - static_cast<std::size_t>(shift)) / static_cast<double>(n + 1);
            t.check(r.value == expect && r.overlap == n + 1 - static_cast<std::size_t>(shift),
                    "z t=" + std::to_string(shift) + " n=" + std::to_string(n));
        }
    }
    const std::size_t ambient = 6;
    const FolnerFamily fs(finitary_symmetric(ambient));
    std::vector<std::int64_t> head{0, 1, 2};
    do {
        Element phi(ambient);
        for (std::size_t i = 0; i < ambient; ++i) phi[i] = i < 3 ? head[i] : static_cast<std::int64_t>(i);
        const auto r = folner_ratio(fs, 3, phi);
        t.check(r.value == 1.0 && r.size == 6, "finsym phi=" + phi.str());
    } while (std::next_permutation(head.begin(), head.end()));
    t.note("Z shifts {1,2,5} for n <= " + std::to_string(n_max) + " exact; finsym:6 S_3 window ratio 1 for all 6 phi");
    return t.finish();
}

/// Rotation by one radian on R², x = (1,0): ‖F_n x‖ against 2/((n+1)|1-e^i|).
inline CriterionResult mean_ergodic(const SuiteOptions&, std::size_t n_max = 10000) {
    detail::Tally t(2, "mean-ergodic-rotation");
    const Group z = integer_lattice(1);
    const auto rot = LinearAction::rotation(z, 1.0);
    ErgodicOptions opt;
    opt.n_max = n_max;
    opt.stop_at_convergence = false;
    const auto res = ergodic_limit(rot, FolnerFamily(z), Vector{1, 0}, opt);
    const double gap = std::abs(1.0 - std::exp(std::complex<double>(0.0, 1.0)));
    t.check(norm2(res.limit) <= 1e-12, "limit is not 0");
    t.check(res.trace.size() == n_max, "trace length");
    double worst_ratio = 0.0;
    for (const auto& row : res.trace) {
        // F_n x computed here as a closed-form geometric sum, independently of the library.
        const double n1 = static_cast<double>(row.n) + 1.0;
        const std::complex<double> e = std::exp(std::complex<double>(0.0, 1.0));
        const double direct = std::abs((1.0 - std::pow(e, n1)) / (1.0 - e)) / n1;
        const double bound = 2.0 / (n1 * gap);
        t.check(std::abs(row.distance - direct) <= 1e-12 && row.distance <= bound, "n=" + std::to_string(row.n));
        worst_ratio = std::max(worst_ratio, row.distance / bound);
    }
    double at3000 = lp::inf;
    if (res.trace.size() >= 3000) at3000 = res.trace[2999].distance;
    t.check(at3000 <= 1e-3, "norm at n=3000 is " + detail::sci(at3000));
    const bool fast = t.elapsed() < 1.0;
    if (!fast) t.note("runtime limit 1 s exceeded");
    t.note("max norm/bound " + detail::sci(worst_ratio) + ", norm at 3000 " + detail::sci(at3000) + ", limit 1 s");
    return t.finish(fast);
}

/// κ̄ = R K Rᵀ, exact separate invariance and PSD for random invariant kernels.
inline CriterionResult kernel_identities(const SuiteOptions& o) {
    detail::Tally t(3, "reynolds-kernel-identities");
    std::mt19937_64 rng(o.seed * 1000 + 3);
    std::vector<PointAction> actions;
    for (std::size_t k = 2; k <= 6; ++k) actions.push_back(PointAction::natural(cyclic_group(k)));
    actions.push_back(PointAction::natural(symmetric_group(3)));
    actions.push_back(PointAction::natural(dihedral_group(4)));
    actions.push_back(PointAction::coordinate_permutation(cyclic_group(3), 2));
    actions.push_back(PointAction::coordinate_permutation(symmetric_group(3), 2));
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto& a = actions[static_cast<std::size_t>(rep) % actions.size()];
        const KernelGram k(oracle::random_invariant_gram(rng, a));
        const auto s = symmetrize_kernel(k, a);
        const Matrix r = oracle::counting_projector(a);
        const std::size_t m = a.carrier_size();
        double diff = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double v = 0.0;
                for (std::size_t p = 0; p < m; ++p)
                    for (std::size_t q = 0; q < m; ++q) v += r(i, p) * k(p, q) * r(j, q);
                diff = std::max(diff, std::abs(v - s.kernel(i, j)));
            }
        worst = std::max(worst, diff);
        bool separate = true;
        for (const auto& g : a.group().elements())
            for (const auto& h : a.group().elements())
                for (std::size_t i = 0; i < m && separate; ++i)
                    for (std::size_t j = 0; j < m; ++j)
                        if (s.kernel(a.image(g, i), a.image(h, j)) != s.kernel(i, j)) {
                            separate = false;
                            break;
                        }
        const bool psd = oracle::cholesky_succeeds(s.kernel.table(), 1e-8);
        t.check(diff <= 1e-10 && separate && psd, a.group().name() + " rep " + std::to_string(rep));
    }
    t.note("max |kbar - R K R^T| " + detail::sci(worst) + " (tol 1e-10), min eig >= -1e-8 by Cholesky");
    return t.finish();
}

/// Zero invariance and duality gaps, certified by a feasible invariant coupling
/// and feasible orbit-constant potentials with equal objective values.
inline CriterionResult invariant_kantorovich(const SuiteOptions& o) {
    detail::Tally t(4, "invariant-kantorovich");
    std::mt19937_64 rng(o.seed * 1000 + 4);
    std::vector<Group> groups;
    for (std::size_t k = 2; k <= 6; ++k) groups.push_back(cyclic_group(k));
    for (std::size_t k = 3; k <= 6; ++k) groups.push_back(dihedral_group(k));
    double worst_inv = 0.0, worst_dual = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const Group& g = groups[static_cast<std::size_t>(rep) % groups.size()];
        const auto a = PointAction::natural(g);
        const auto b = (rep / static_cast<int>(groups.size())) % 2 ? PointAction::natural(g) : PointAction::trivial(g, 2);
        const Matrix c = oracle::random_invariant_cost(rng, a, b);
        const Vector p1 = oracle::random_invariant_probability(rng, a), p2 = oracle::random_invariant_probability(rng, b);
        const auto r = solve_mk_invariant(CostMatrix(c), p1, p2, a, b);
        const std::size_t n1 = c.rows(), n2 = c.cols();
        const Matrix& p = r.coupling.table;
        double risk = 0.0, feas = 0.0, margin = lp::inf;
        bool invariant = true;
        for (std::size_t i = 0; i < n1; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n2; ++j) {
                row += p(i, j);
                risk += c(i, j) * p(i, j);
                feas = std::max(feas, -p(i, j));
                margin = std::min(margin, c(i, j) - r.potentials.f1[i] - r.potentials.f2[j]);
                for (const auto& e : g.elements())
                    invariant = invariant && std::abs(p(a.image(e, i), b.image(e, j)) - p(i, j)) <= 1e-12;
            }
            feas = std::max(feas, std::abs(row - p1[i]));
        }
        for (std::size_t j = 0; j < n2; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < n1; ++i) col += p(i, j);
            feas = std::max(feas, std::abs(col - p2[j]));
        }
        const double dual = oracle::expectation(p1, r.potentials.f1) + oracle::expectation(p2, r.potentials.f2);
        const bool potentials_invariant = oracle::exactly_invariant(a, r.potentials.f1) && oracle::exactly_invariant(b, r.potentials.f2);
        const double gap_dual = std::abs(risk - dual);
        const double gap_inv = std::abs(r.unconstrained.primal - risk);
        worst_inv = std::max(worst_inv, gap_inv);
        worst_dual = std::max(worst_dual, gap_dual);
        t.check(feas <= 1e-9 && invariant && margin >= -1e-9 && potentials_invariant && gap_dual <= 1e-7 && gap_inv <= 1e-7 &&
                    std::abs(r.invariant_primal - risk) <= 1e-9 && std::abs(r.invariant_dual - dual) <= 1e-9,
                g.name() + " rep " + std::to_string(rep));
    }
    const bool fast = t.elapsed() < 10.0;
    if (!fast) t.note("runtime limit 10 s exceeded");
    t.note("max |min L - min L_G| " + detail::sci(worst_inv) + ", max |min L_G - sup G_G| " + detail::sci(worst_dual) +
           " (tol 1e-7), limit 10 s");
    return t.finish(fast);
}

/// Nullspace extremality verdict against brute-force vertices of Λ_G.
inline CriterionResult extremality(const SuiteOptions& o) {
    detail::Tally t(5, "extremality-vs-vertices");
    std::mt19937_64 rng(o.seed * 1000 + 5);
    auto as_table = [](const Vector& v, std::size_t n1, std::size_t n2) { return Matrix(n1, n2, v); };
    auto agree = [&](const PointAction& a1, const PointAction& a2, const Vector& p1, const Vector& p2, const std::string& tag) {
        const std::size_t n1 = a1.carrier_size(), n2 = a2.carrier_size();
        const auto verts = lp::enumerate_vertices(oracle::invariant_coupling_polytope(a1, a2, p1, p2));
        t.check(!verts.empty(), tag + " no vertices");
        for (const auto& v : verts) t.check(is_extreme_invariant_coupling(as_table(v, n1, n2), a1, a2).extreme, tag + " vertex");
        for (std::size_t x = 0; x < verts.size(); ++x)
            for (std::size_t y = x + 1; y < verts.size(); ++y) {
                const Vector mid = scale(add(verts[x], verts[y]), 0.5);
                t.check(!is_extreme_invariant_coupling(as_table(mid, n1, n2), a1, a2).extreme, tag + " midpoint");
            }
        return verts.size();
    };
    const Group z3 = cyclic_group(3), one = trivial_group();
    auto carrier = [](const Group& g, std::size_t m) {
        return m == 3 && g.degree() == 3 ? PointAction::natural(g) : PointAction::trivial(g, m);
    };
    for (const Group* g : {&one, &z3})
        for (std::size_t n1 = 1; n1 <= 3; ++n1)
            for (std::size_t n2 = 1; n2 <= 3; ++n2)
                for (int rep = 0; rep < 3; ++rep) {
                    const auto a1 = carrier(*g, n1), a2 = carrier(*g, n2);
                    agree(a1, a2, oracle::random_invariant_probability(rng, a1), oracle::random_invariant_probability(rng, a2),
                          g->name() + " " + std::to_string(n1) + "x" + std::to_string(n2));
                }
    const auto two = PointAction::trivial(one, 2);
    const std::size_t birkhoff = agree(two, two, Vector{.5, .5}, Vector{.5, .5}, "birkhoff");
    t.check(birkhoff == 2, "Birkhoff 2x2 has " + std::to_string(birkhoff) + " vertices");
    t.note("trivial and cyclic:3, |Omega_i| <= 3, Birkhoff 2x2 vertices " + std::to_string(birkhoff));
    return t.finish();
}

/// Invariantized maximin tests: feasible, exactly invariant, same value.
inline CriterionResult hunt_stein(const SuiteOptions& o) {
    detail::Tally t(6, "hunt-stein");
    std::mt19937_64 rng(o.seed * 1000 + 6);
    const std::vector<PointAction> actions{
        PointAction::natural(cyclic_group(3)), PointAction::coordinate_permutation(symmetric_group(2), 2),
        PointAction::coordinate_permutation(cyclic_group(3), 2),
        PointAction::from_permutations(cyclic_group(2), 5, {{0, 1, 2, 3, 4}, {1, 0, 3, 2, 4}}),
        PointAction::from_permutations(cyclic_group(2), 6, {{0, 1, 2, 3, 4, 5}, {5, 4, 3, 2, 1, 0}})};
    const double alphas[] = {.05, .2, .5};
    double worst = 0.0;
    std::size_t oracle_checked = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const auto& a = actions[static_cast<std::size_t>(rep) % actions.size()];
        const std::size_t m = a.carrier_size();
        const TestingProblem prob{a, oracle::measure_orbit(a, oracle::random_probability(rng, m)),
                                  oracle::measure_orbit(a, oracle::random_probability(rng, m)), alphas[rep % 3]};
        const auto hat = solve_maximin_test(prob);
        const auto r = invariantize_test(prob, hat.w);
        const Vector& w = r.w_bar;
        bool feasible = w.size() == m;
        for (double v : w) feasible = feasible && v >= -1e-12 && v <= 1.0 + 1e-12;
        for (const auto& q : prob.hypothesis) feasible = feasible && oracle::expectation(q, w) <= prob.alpha + 1e-9;
        const double diff = std::abs(oracle::min_power(prob.alternative, w) - oracle::min_power(prob.alternative, hat.w));
        worst = std::max(worst, diff);
        bool ok = feasible && oracle::exactly_invariant(a, w) && diff <= 1e-9;
        if (a.orbits().size() <= 5) {
            ok = ok && std::abs(oracle::invariant_maximin(prob) - hat.value) <= 1e-9;
            ++oracle_checked;
        }
        t.check(ok, a.group().name() + " rep " + std::to_string(rep));
    }
    t.note("max |value(w_bar) - value(w_hat)| " + detail::sci(worst) + " (tol 1e-9); " + std::to_string(oracle_checked) +
           " values matched by vertex enumeration");
    return t.finish();
}

/// LP membership in the S_4 permutation orbitope against majorization.
inline CriterionResult permutation_orbitope(const SuiteOptions& o) {
    detail::Tally t(7, "permutation-orbitope");
    std::mt19937_64 rng(o.seed * 1000 + 7);
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    const auto rep = LinearAction::permutation_representation(symmetric_group(4));
    std::size_t inside = 0;
    for (int k = 0; k < 1000; ++k) {
        Vector lambda(4);
        for (auto& v : lambda) v = ud(rng);
        const Orbitope orb(rep, lambda);
        Vector z(4);
        if (k % 3 == 0) {
            const Vector w = oracle::random_probability(rng, orb.points().size());
            for (std::size_t i = 0; i < w.size(); ++i)
                for (std::size_t c = 0; c < 4; ++c) z[c] += w[i] * orb.points()[i][c];
        } else if (k % 10 == 1) {
            z = orb.points()[static_cast<std::size_t>(k) % orb.points().size()];
        } else {
            for (auto& v : z) v = ud(rng);
            const double shift = (std::accumulate(lambda.begin(), lambda.end(), 0.0) - std::accumulate(z.begin(), z.end(), 0.0)) / 4.0;
            for (auto& v : z) v += shift;
        }
        const bool lp_in = orbitope_membership(orb, z).inside;
        const bool maj = oracle::majorized(z, lambda, 1e-9);
        inside += maj;
        t.check(lp_in == maj, "pair " + std::to_string(k));
    }
    t.note(std::to_string(inside) + " inside, " + std::to_string(1000 - inside) + " outside");
    return t.finish();
}

/// MMD separates measures under a strictly positive definite kernel and is a metric.
inline CriterionResult mmd_metric(const SuiteOptions& o) {
    detail::Tally t(8, "mmd-metric");
    std::mt19937_64 rng(o.seed * 1000 + 8);
    const std::size_t m = 6;
    std::normal_distribution<double> nd;
    Matrix b(m, m);
    for (auto& v : b.data()) v = nd(rng);
    Matrix kt(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = i == j ? 0.5 : 0.0;
            for (std::size_t p = 0; p < m; ++p) s += b(i, p) * b(j, p) / static_cast<double>(m);
            kt(i, j) = kt(j, i) = s;
        }
    const KernelGram k(kt);
    t.check(oracle::cholesky_succeeds(kt, -0.1), "min eigenvalue below .1");
    // ‖p-q‖∞ <= 1e-9 caps MMD at zero_level = m·1e-9·sqrt(max K); otherwise
    // MMD >= sqrt(.1)·‖p-q‖₂, and identical inputs give exactly 0.
    const double zero_level = static_cast<double>(m) * 1e-9 * std::sqrt(norm_inf(kt.data()));
    auto classify = [&](const Vector& p, const Vector& q, const std::string& tag) {
        const double d = mmd(k, p, q);
        const bool near = max_abs_diff(p, q) <= 1e-9;
        const bool zero = d <= zero_level;
        const bool bound = near || d >= std::sqrt(0.1) * norm2(sub(p, q)) * (1.0 - 1e-6);
        const bool exact = !(p == q) || d == 0.0;
        t.check(zero == near && bound && exact, tag);
    };
    for (int rep = 0; rep < 100; ++rep) {
        const Vector p = oracle::random_probability(rng, m);
        classify(p, p, "identical");
        for (double eps : {1e-10, 1e-7, 1e-4}) {
            Vector q = p;
            const double move = std::min(eps, q[0]);
            q[0] -= move;
            q[1] += move;
            classify(p, q, "shift " + detail::sci(eps));
        }
        classify(p, oracle::random_probability(rng, m), "random pair");
    }
    double worst = -lp::inf;
    for (int rep = 0; rep < 100; ++rep) {
        const Vector p = oracle::random_probability(rng, m), q = oracle::random_probability(rng, m),
                     r = oracle::random_probability(rng, m);
        const double slack = mmd(k, p, r) - mmd(k, p, q) - mmd(k, q, r);
        worst = std::max(worst, slack);
        t.check(slack <= 1e-10, "triangle " + std::to_string(rep));
    }
    t.note("kernel min eig >= .1 by Cholesky; worst triangle slack " + detail::sci(worst));
    return t.finish();
}

/// Orbit-mass decomposition on {0,1}² under the bit swap.
inline CriterionResult ergodic_decomposition_bitswap(const SuiteOptions& o) {
    detail::Tally t(9, "ergodic-decomposition");
    std::mt19937_64 rng(o.seed * 1000 + 9);
    const auto a = PointAction::coordinate_permutation(symmetric_group(2), 2);
    // Invariant probabilities: p ≥ 0, Σp = 1, p(01) = p(10).
    lp::Polytope poly{4, {{1, 1, 1, 1}, {0, 1, -1, 0}}, {1, 0}, {}, {}};
    for (std::size_t i = 0; i < 4; ++i) {
        Vector r(4, 0.0);
        r[i] = -1.0;
        poly.ineq_rows.push_back(r);
        poly.ineq_rhs.push_back(0.0);
    }
    const auto verts = lp::enumerate_vertices(poly);
    t.check(verts.size() == 3, "invariant simplex has " + std::to_string(verts.size()) + " vertices");
    auto is_vertex = [&](const Vector& p) {
        return std::any_of(verts.begin(), verts.end(), [&](const Vector& v) { return max_abs_diff(v, p) <= 1e-12; });
    };
    std::vector<Vector> cases = verts;
    for (std::size_t x = 0; x < verts.size(); ++x)
        for (std::size_t y = x + 1; y < verts.size(); ++y) cases.push_back(scale(add(verts[x], verts[y]), 0.5));
    for (int rep = 0; rep < 50; ++rep) cases.push_back(oracle::random_invariant_probability(rng, a));
    std::size_t extreme = 0;
    for (const auto& p : cases) {
        const auto d = ergodic_decomposition(a, p);
        extreme += d.extreme;
        t.check(d.reconstruction == p && d.extreme == is_vertex(p), "p=" + std::to_string(p[0]) + "," + std::to_string(p[1]));
    }
    const auto u = ergodic_decomposition(a, Vector{.25, .25, .25, .25});
    t.check(u.weights == Vector{.25, .5, .25}, "uniform weights");
    t.note(std::to_string(cases.size()) + " invariant measures, " + std::to_string(extreme) +
           " marked extreme, all among the 3 orbit-uniform vertices");
    return t.finish();
}

/// Antisymmetrizer, equivariant maps and the equivariant kernel.
inline CriterionResult cocycle_projectors(const SuiteOptions& o) {
    detail::Tally t(10, "cocycle-projectors");
    std::mt19937_64 rng(o.seed * 1000 + 10);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random_vec = [&](std::size_t n) {
        Vector v(n);
        for (auto& x : v) x = u(rng);
        return v;
    };

    double idem = 0.0;
    for (std::size_t k = 1; k <= 4; ++k) {
        const std::size_t carrier = 3;
        std::size_t m = 1;
        for (std::size_t i = 0; i < k; ++i) m *= carrier;
        for (int rep = 0; rep < 5; ++rep) {
            const Vector y = skew_symmetrize(random_vec(m), k, carrier);
            const double d = max_abs_diff(skew_symmetrize(y, k, carrier), y);
            idem = std::max(idem, d);
            t.check(d <= 1e-12, "antisymmetrizer k=" + std::to_string(k));
        }
    }

    const Group c4 = cyclic_group(4);
    std::vector<Matrix> quarter;
    for (const auto& e : c4.elements()) {
        const double angle = std::acos(-1.0) / 2.0 * static_cast<double>(e[0]);
        quarter.push_back(Matrix::from_rows({{std::cos(angle), -std::sin(angle)}, {std::sin(angle), std::cos(angle)}}));
    }
    const std::vector<std::pair<LinearAction, LinearAction>> pairs{
        {LinearAction::permutation_representation(cyclic_group(3)), LinearAction::permutation_representation(cyclic_group(3))},
        {LinearAction::permutation_representation(symmetric_group(3)), LinearAction::permutation_representation(symmetric_group(3))},
        {LinearAction::permutation_representation(dihedral_group(4)), LinearAction::permutation_representation(dihedral_group(4))},
        {LinearAction::permutation_representation(c4), LinearAction::from_tables(c4, 2, quarter)}};
    double comm = 0.0;
    for (const auto& [in, out] : pairs)
        for (int rep = 0; rep < 5; ++rep) {
            const Matrix mm(out.dim(), in.dim(), random_vec(out.dim() * in.dim()));
            const auto pr = equivariant_projection(in, out, mm);
            double d = 0.0;
            for (const auto& e : in.group().elements())
                d = std::max(d, max_abs_diff(matmul(out.matrix(e), pr.map), matmul(pr.map, in.matrix(e))));
            comm = std::max(comm, d);
            t.check(d <= 1e-10, "equivariant map under " + in.group().name());
        }

    const Group d4 = dihedral_group(4);
    const auto square = PointAction::natural(d4);
    const auto elems = d4.elements();
    std::vector<std::vector<std::size_t>> perms;
    for (const auto& e : elems) {
        auto pm = square.permutation(e);
        pm.push_back(4);
        perms.push_back(pm);
    }
    const auto a = PointAction::from_permutations(d4, 5, perms);
    std::uniform_real_distribution<double> uh(0.0, 1.0);
    double eq_defect = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        Matrix eta(5, 5);
        for (std::size_t tt = 0; tt < 5; ++tt) {
            const Vector row = oracle::random_probability(rng, 5);
            for (std::size_t s = 0; s < 5; ++s) eta(tt, s) = row[s];
        }
        Matrix hv(5, 5);
        for (auto& v : hv.data()) v = uh(rng);
        const auto h = [&](std::size_t s, std::size_t tt) { return hv(s, tt); };
        const Vector w = oracle::random_probability(rng, 2);
        const Vector p{w[0] / 4, w[0] / 4, w[0] / 4, w[0] / 4, w[1]};
        const auto r = equivariant_kernel(eta, a, p, h);
        double defect = 0.0;
        for (const auto& e : elems) {
            const auto inv = d4.inverse(e);
            for (std::size_t tt = 0; tt < 5; ++tt)
                for (std::size_t s = 0; s < 5; ++s)
                    defect = std::max(defect, std::abs(r.eta_bar(tt, a.image(inv, s)) - r.eta_bar(a.image(e, tt), s)));
        }
        eq_defect = std::max(eq_defect, defect);
        double sup = -lp::inf, bar = 0.0;
        for (const auto& e : elems) {
            double v = 0.0;
            for (std::size_t tt = 0; tt < 5; ++tt)
                for (std::size_t s = 0; s < 5; ++s) v += p[tt] * eta(tt, s) * hv(a.image(e, s), a.image(e, tt));
            sup = std::max(sup, v);
        }
        for (std::size_t tt = 0; tt < 5; ++tt)
            for (std::size_t s = 0; s < 5; ++s) bar += p[tt] * r.eta_bar(tt, s) * hv(s, tt);
        t.check(defect <= 1e-12 && bar <= sup + 1e-10, "kernel triple " + std::to_string(rep));
    }
    t.note("idempotence " + detail::sci(idem) + ", commutation " + detail::sci(comm) + ", kernel equivariance " +
           detail::sci(eq_defect));
    return t.finish();
}

inline std::vector<CriterionResult> run_all(const SuiteOptions& o = {}) {
    std::vector<CriterionResult> out;
    out.push_back(folner_ratios(o));
    out.push_back(mean_ergodic(o));
    out.push_back(kernel_identities(o));
    out.push_back(invariant_kantorovich(o));
    out.push_back(extremality(o));
    out.push_back(hunt_stein(o));
    out.push_back(permutation_orbitope(o));
    out.push_back(mmd_metric(o));
    out.push_back(ergodic_decomposition_bitswap(o));
    out.push_back(cocycle_projectors(o));
    return out;
}

}  // namespace amenable::verify
