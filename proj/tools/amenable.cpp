// Command-line front end: experiments, certificates and the acceptance suite.
//
// Exit codes: 0 success, 1 input error, 2 verification failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "amenable/amenable.hpp"

namespace fs = std::filesystem;
using namespace amenable;
using io::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kVerificationFailure = 2;

struct Config {
    std::string group;
    std::string input;
    std::optional<double> tol;
    std::size_t nmax = 1000;
    std::uint64_t seed = 7;
    std::string out;
    std::string format = "json";
    bool allow_overlap = false;
    // group ratio
    std::size_t n = 1;
    std::string phi;
};

// ---- input helpers --------------------------------------------------------

class Input {
public:
    explicit Input(const Config& cfg) {
        if (cfg.input.empty()) throw InputError("--input is required for this command");
        doc_ = io::read_json(cfg.input);
        if (!doc_.is_object()) throw InputError(cfg.input + ": expected a JSON object");
        base_ = fs::path(cfg.input).parent_path();
    }

    const json& doc() const { return doc_; }
    bool has(const char* key) const { return doc_.contains(key); }
    const json& at(const char* key) const { return io::field(doc_, key, "input"); }

    /// Inline array, or a path (relative to the input file) to a CSV/JSON table.
    Matrix table(const char* key) const {
        const json& j = at(key);
        if (j.is_string()) return io::read_table(resolve(j.get<std::string>()));
        return io::table_from_json(j, key);
    }

    Vector vector(const char* key) const {
        const json& j = at(key);
        if (j.is_string()) return io::read_vector(resolve(j.get<std::string>()));
        return io::vector_from_json(j, key);
    }

    std::vector<Vector> vectors(const char* key) const {
        std::vector<Vector> out;
        const json& j = at(key);
        if (!j.is_array()) throw InputError(std::string(key) + ": expected an array of vectors");
        for (const auto& v : j) out.push_back(io::vector_from_json(v, key));
        return out;
    }

private:
    std::string resolve(const std::string& rel) const {
        const fs::path p(rel);
        return p.is_absolute() ? rel : (base_ / p).string();
    }

    json doc_;
    fs::path base_;
};

Group require_group(const Config& cfg, const Input* in = nullptr) {
    if (!cfg.group.empty()) return parse_group(cfg.group);
    if (in && in->has("group")) return io::group_from_json(in->at("group"));
    throw InputError("--group is required for this command");
}

/// "action" document, Z^d generator tables, a rotation angle, the Heisenberg
/// defining representation, or the permutation representation.
LinearAction linear_action(const Group& g, const Input& in) {
    if (in.has("action")) {
        auto a = io::linear_action_from_json(in.at("action"));
        if (!(a.group() == g)) throw InputError("action belongs to " + a.group().name() + ", not " + g.name());
        return a;
    }
    if (in.has("generators")) {
        std::vector<Matrix> gens;
        for (const auto& t : in.at("generators")) gens.push_back(io::table_from_json(t, "generator"));
        return LinearAction::lattice(g, gens);
    }
    if (in.has("rotation")) return LinearAction::rotation(g, io::number_from(in.at("rotation"), "rotation"));
    if (g.name() == "heis") return LinearAction::heisenberg_defining(g);
    return LinearAction::permutation_representation(g);
}

PointAction point_action(const Group& g, const Input& in, const char* key = "carrier") {
    if (in.has(key)) return io::point_action_from_json(in.at(key), g);
    return PointAction::natural(g);
}

// ---- output ---------------------------------------------------------------

json tolerance_block(double tol) { return json{{"tol", tol}, {"library", io::to_json(default_tolerances)}}; }

std::string csv_comment(double tol) {
    const auto& t = default_tolerances;
    return "# tol=" + io::decimal(tol) + " feasibility=" + io::decimal(t.feasibility) + " duality=" +
           io::decimal(t.duality) + " dedup=" + io::decimal(t.dedup) + " pivot=" + io::decimal(t.pivot) +
           " condition_limit=" + io::decimal(t.condition_limit) + "\n";
}

void emit(const Config& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + cfg.out + "'");
    f << text;
}

/// JSON report with the command name and tolerances, or a one-row CSV of the
/// scalar fields.
void report(const Config& cfg, const std::string& command, double tol, json body) {
    if (cfg.format == "csv") {
        std::string header, row;
        for (auto it = body.begin(); it != body.end(); ++it) {
            if (!it->is_primitive()) continue;
            header += (header.empty() ? "" : ",") + it.key();
            std::string cell = it->is_number_float() ? io::decimal(it->get<double>()) : it->dump();
            if (it->is_string()) cell = it->get<std::string>();
            row += (row.empty() ? "" : ",") + cell;
        }
        emit(cfg, csv_comment(tol) + header + "\n" + row + "\n");
        return;
    }
    json doc{{"command", command}};
    for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
    doc["tolerances"] = tolerance_block(tol);
    emit(cfg, doc.dump(2) + "\n");
}

json potentials_json(const DualPotentials& d) {
    return json{{"f1", io::to_json(d.f1)}, {"f2", io::to_json(d.f2)}, {"margin", d.margin}};
}

// ---- commands -------------------------------------------------------------

int cmd_group_ratio(const Config& cfg) {
    const auto model = make_group(cfg.group.empty() ? throw InputError("--group is required") : cfg.group);
    if (cfg.phi.empty()) throw InputError("--phi is required");
    const Element phi = io::parse_element(cfg.phi);
    const auto r = folner_ratio(model.family, cfg.n, phi);
    report(cfg, "group ratio", 0.0,
           json{{"group", model.group.name()}, {"n", cfg.n}, {"phi", phi.str()}, {"overlap", r.overlap},
                {"size", r.size}, {"ratio", r.value}});
    return kOk;
}

int cmd_average(const Config& cfg) {
    const Input in(cfg);
    const Group g = require_group(cfg, &in);
    const auto action = linear_action(g, in);
    const Vector x = in.vector("x");
    const std::size_t n = in.has("n") ? io::index_from(in.at("n"), "n") : 1;
    const auto r = folner_average(action, x, FolnerFamily(g), n);
    report(cfg, "average", cfg.tol.value_or(0.0),
           json{{"group", g.name()}, {"n", n}, {"value", io::to_json(r.value)}, {"residual", r.residual},
                {"invariance_defect", r.invariance_defect}});
    return kOk;
}

int cmd_ergodic(const Config& cfg) {
    const Input in(cfg);
    const Group g = require_group(cfg, &in);
    const auto action = linear_action(g, in);
    ErgodicOptions opt;
    opt.tol = cfg.tol.value_or(1e-6);
    opt.n_max = cfg.nmax;
    opt.stop_at_convergence = !(in.has("full_trace") && in.at("full_trace").get<bool>());
    const auto r = ergodic_limit(action, FolnerFamily(g), in.vector("x"), opt);
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << csv_comment(opt.tol);
        write_trace_csv(os, r.trace);
        emit(cfg, os.str());
    } else {
        const auto& last = r.trace.back();
        report(cfg, "ergodic", opt.tol,
               json{{"group", g.name()}, {"converged", r.converged}, {"final_n", r.final_n},
                    {"limit", io::to_json(r.limit)}, {"last_average", io::to_json(r.last_average)},
                    {"distance", last.distance}, {"residual", last.residual},
                    {"invariance_defect", last.invariance_defect}, {"bound", last.bound}});
    }
    if (!r.converged) {
        std::cerr << "ergodic: tolerance " << io::decimal(opt.tol) << " not reached by n_max=" << cfg.nmax << "\n";
        return kVerificationFailure;
    }
    return kOk;
}

Orbitope make_orbitope(const Group& g, const Input& in) {
    std::optional<std::size_t> window;
    if (in.has("window")) window = io::index_from(in.at("window"), "window");
    return Orbitope(linear_action(g, in), in.vector("x0"), window);
}

int cmd_orbitope(const Config& cfg, const std::string& sub) {
    const Input in(cfg);
    const Group g = require_group(cfg, &in);
    const Orbitope orb = make_orbitope(g, in);
    const double tol = cfg.tol.value_or(1e-9);
    if (sub == "member") {
        const auto m = orbitope_membership(orb, in.vector("z"), tol);
        json body{{"group", g.name()}, {"orbit_size", orb.points().size()}, {"inside", m.inside}};
        if (m.inside) body["weights"] = io::to_json(m.weights);
        else {
            body["separator"] = io::to_json(m.separator);
            body["margin"] = m.margin;
        }
        report(cfg, "orbitope member", tol, body);
        return kOk;
    }
    if (sub == "support") {
        const auto s = support_function(orb, in.vector("y"));
        report(cfg, "orbitope support", tol,
               json{{"group", g.name()}, {"value", s.value}, {"index", s.index}, {"point", io::to_json(s.point)}});
        return kOk;
    }
    ErgodicOptions opt;
    opt.tol = cfg.tol.value_or(1e-6);
    opt.n_max = cfg.nmax;
    const auto e = invariant_element(orb, opt);
    json body{{"group", g.name()},
              {"value", io::to_json(e.value)},
              {"in_orbitope", e.in_orbitope},
              {"invariance_defect", e.invariance_defect}};
    if (e.unique_checked) body["unique"] = e.unique;
    if (e.in_orbitope) body["weights"] = io::to_json(e.membership.weights);
    report(cfg, "orbitope invariant", opt.tol, body);
    return e.in_orbitope && (!e.unique_checked || e.unique) ? kOk : kVerificationFailure;
}

KernelGram load_kernel(const PointAction& a, const Input& in) {
    const json& spec = in.at("kernel");
    if (spec.is_object() && spec.contains("builtin")) {
        const std::string kind = spec.at("builtin").get<std::string>();
        const std::size_t m = a.carrier_size();
        if (kind == "identity") return identity_kernel(m);
        if (kind == "orbit-indicator") return orbit_indicator_kernel(a);
        if (kind == "gaussian") {
            const double gamma = io::number_from(io::field(spec, "gamma", "kernel"), "gamma");
            const std::string metric = spec.value("metric", std::string("cyclic"));
            if (metric == "cyclic") return gaussian_kernel(m, gamma, cyclic_metric(m));
            if (metric == "hamming")
                return gaussian_kernel(m, gamma, hamming_metric(a.group().degree(), io::index_from(io::field(spec, "alphabet", "kernel"), "alphabet")));
            throw InputError("kernel: unknown metric '" + metric + "'");
        }
        throw InputError("kernel: unknown builtin '" + kind + "'");
    }
    return KernelGram(in.table("kernel"));
}

int cmd_kernel(const Config& cfg, const std::string& sub) {
    const Input in(cfg);
    const Group g = require_group(cfg, &in);
    const PointAction a = point_action(g, in);
    if (sub == "decompose") {
        const auto d = ergodic_decomposition(a, in.vector("p"));
        json orbs = json::array();
        for (const auto& o : d.orbits) orbs.push_back(o);
        report(cfg, "kernel decompose", cfg.tol.value_or(1e-9),
               json{{"group", g.name()}, {"orbits", orbs}, {"weights", io::to_json(d.weights)},
                    {"extreme", d.extreme}, {"reconstruction", io::to_json(d.reconstruction)}});
        return kOk;
    }
    const KernelGram k = load_kernel(a, in);
    if (sub == "symmetrize") {
        const auto s = symmetrize_kernel(k, a);
        if (cfg.format == "csv") {
            std::ostringstream os;
            os << csv_comment(1e-10);
            io::write_csv(os, s.kernel.table());
            emit(cfg, os.str());
        } else {
            report(cfg, "kernel symmetrize", 1e-10,
                   json{{"group", g.name()}, {"kernel", io::to_json(s.kernel.table())},
                        {"projector_residual", s.projector_residual},
                        {"separate_invariance_defect", separate_invariance_defect(s.kernel, a)},
                        {"min_eigenvalue", s.kernel.min_eigenvalue_report()}});
        }
        return kOk;
    }
    const Vector p = in.vector("p"), q = in.vector("q");
    json body{{"group", g.name()}, {"mmd", mmd(k, p, q)}, {"characteristic", k.characteristic()}};
    if (check_diagonal_invariance(k, a).invariant) {
        const auto ep = invariant_embedding(k, a, p), eq = invariant_embedding(k, a, q);
        body["mmd_invariant"] = mmd(k, ep.embedding.weights, eq.embedding.weights);
    }
    report(cfg, "kernel mmd", 1e-12, body);
    return kOk;
}

int cmd_transport(const Config& cfg, const std::string& sub) {
    const Input in(cfg);
    const double tol = cfg.tol.value_or(1e-7);
    if (sub == "solve") {
        const CostMatrix c(in.table("cost"));
        const auto s = solve_mk(c, in.vector("p1"), in.vector("p2"));
        report(cfg, "transport solve", tol,
               json{{"primal", s.primal}, {"dual", s.dual}, {"gap", std::abs(s.primal - s.dual)},
                    {"degenerate", s.degenerate}, {"complementary_slackness", s.complementary_slackness},
                    {"coupling", io::to_json(s.coupling.table)}, {"potentials", potentials_json(s.potentials)}});
        return std::abs(s.primal - s.dual) <= tol ? kOk : kVerificationFailure;
    }
    const Group g = require_group(cfg, &in);
    const PointAction a1 = point_action(g, in, "carrier1");
    const PointAction a2 = point_action(g, in, "carrier2");
    if (sub == "invariant") {
        const auto r = solve_mk_invariant(CostMatrix(in.table("cost")), in.vector("p1"), in.vector("p2"), a1, a2);
        const bool ok = r.gap_invariance <= tol && r.gap_duality <= tol;
        report(cfg, "transport invariant", tol,
               json{{"group", g.name()},
                    {"primal", r.primal},
                    {"dual", r.unconstrained.dual},
                    {"invariant_primal", r.invariant_primal},
                    {"invariant_dual", r.invariant_dual},
                    {"gap", json{{"invariance", r.gap_invariance}, {"duality", r.gap_duality}}},
                    {"gaps_ok", ok},
                    {"extreme", r.extreme},
                    {"degenerate", r.degenerate},
                    {"coupling", io::to_json(r.coupling.table)},
                    {"potentials", potentials_json(r.potentials)}});
        return ok ? kOk : kVerificationFailure;
    }
    const Matrix p = in.table("coupling");
    if (sub == "extreme") {
        const auto v = is_extreme_invariant_coupling(p, a1, a2);
        json body{{"group", g.name()}, {"extreme", v.extreme}};
        if (!v.extreme) body["witness"] = io::to_json(v.witness);
        report(cfg, "transport extreme", tol, body);
        return kOk;
    }
    Vector p1(p.rows(), 0.0), p2(p.cols(), 0.0);
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j) {
            p1[i] += p(i, j);
            p2[j] += p(i, j);
        }
    const auto s = symmetrize_coupling(Coupling{p, p1, p2}, a1, a2);
    report(cfg, "transport symmetrize", tol,
           json{{"group", g.name()}, {"input_invariant", s.input_invariant},
                {"marginal_residual", s.marginal_residual}, {"coupling", io::to_json(s.coupling.table)}});
    return s.marginal_residual <= tol ? kOk : kVerificationFailure;
}

int cmd_test(const Config& cfg, const std::string& sub) {
    const Input in(cfg);
    const TestingProblem prob = io::testing_problem_from_json(in.doc());
    const double tol = cfg.tol.value_or(1e-9);
    const auto hat = solve_maximin_test(prob, cfg.allow_overlap);
    if (sub == "maximin") {
        report(cfg, "test maximin", tol,
               json{{"group", prob.action.group().name()}, {"value", hat.value}, {"w", io::to_json(hat.w)},
                    {"size", test_size(prob.hypothesis, hat.w)}});
        return kOk;
    }
    const Vector w_hat = in.has("w") ? in.vector("w") : hat.w;
    const auto r = invariantize_test(prob, w_hat, cfg.allow_overlap);
    const bool ok = r.feasible && r.invariant && std::abs(r.value_bar - r.value_hat) <= tol;
    report(cfg, "test invariantize", tol,
           json{{"group", prob.action.group().name()},
                {"value", r.value_bar},
                {"w", io::to_json(w_hat)},
                {"w_bar", io::to_json(r.w_bar)},
                {"certificates",
                 json{{"value_hat", r.value_hat}, {"value_bar", r.value_bar}, {"size_bar", r.size_bar},
                      {"feasible", r.feasible}, {"invariant", r.invariant}, {"sandwich", r.sandwich}}}});
    return ok ? kOk : kVerificationFailure;
}

int cmd_cocycle(const Config& cfg, const std::string& sub) {
    const Input in(cfg);
    const Group g = require_group(cfg, &in);
    const PointAction a = point_action(g, in);
    const double tol = cfg.tol.value_or(1e-10);
    if (sub == "equivariant-kernel") {
        const Matrix eta = in.table("eta");
        const Matrix h = in.table("h");
        if (h.rows() != a.carrier_size() || h.cols() != a.carrier_size()) throw InputError("h: table must be carrier x carrier");
        const auto r = equivariant_kernel(eta, a, in.vector("p"), [&h](std::size_t s, std::size_t t) { return h(s, t); });
        const bool ok = r.equivariance_defect <= tol && r.risk_ok;
        report(cfg, "cocycle equivariant-kernel", tol,
               json{{"group", g.name()}, {"eta_bar", io::to_json(r.eta_bar)},
                    {"equivariance_defect", r.equivariance_defect}, {"risk_bar", r.risk_bar},
                    {"risk_sup", r.risk_sup}, {"risk_ok", r.risk_ok}});
        return ok ? kOk : kVerificationFailure;
    }
    const Cocycle c = io::cocycle_from_json(in.at("cocycle"), a);
    const Vector x = in.vector("x");
    if (sub == "apply") {
        const Element e = in.at("element").is_string() ? io::parse_element(in.at("element").get<std::string>())
                                                       : Element(in.at("element").begin(), in.at("element").end());
        if (!g.contains(e)) throw InputError("element " + e.str() + " is not in " + g.name());
        report(cfg, "cocycle apply", tol,
               json{{"group", g.name()}, {"kind", to_string(c.kind())}, {"element", e.str()},
                    {"value", io::to_json(surrogate_apply(c, e, x))}});
        return kOk;
    }
    const auto r = theta_average(c, x);
    report(cfg, "cocycle average", tol,
           json{{"group", g.name()}, {"kind", to_string(c.kind())}, {"value", io::to_json(r.value)},
                {"defect", r.defect}});
    return r.defect <= tol ? kOk : kVerificationFailure;
}

int cmd_verify(const Config& cfg) {
    verify::SuiteOptions opt;
    opt.seed = cfg.seed;
    const auto results = verify::run_all(opt);
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto& r : results)
            rows.push_back(json{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"cases", r.cases},
                                {"failures", r.failures}, {"detail", r.detail}});
        report(cfg, "verify all", 0.0, json{{"seed", cfg.seed}, {"passed", all}, {"criteria", rows}});
    } else {
        std::string text = csv_comment(0.0) + "id,name,passed,cases,failures\n";
        for (const auto& r : results)
            text += std::to_string(r.id) + "," + r.name + "," + (r.passed ? "true" : "false") + "," +
                    std::to_string(r.cases) + "," + std::to_string(r.failures) + "\n";
        emit(cfg, text);
    }
    for (const auto& r : results) std::cerr << verify::format_line(r) << "\n";
    return all ? kOk : kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Amenable-symmetry toolkit: Følner averaging, orbitopes, invariant embeddings, transport and tests"};
    app.require_subcommand(1);
    Config cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--group", cfg.group, "group spec, e.g. cyclic:3, z:box, product(cyclic:2,cyclic:3)");
        sub->add_option("--input", cfg.input, "JSON input document");
        sub->add_option("--tol", cfg.tol, "verification tolerance");
        sub->add_option("--nmax", cfg.nmax, "largest window index")->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--out", cfg.out, "write the report here instead of stdout");
        sub->add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    };
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
        auto* s = parent->add_subcommand(name, help);
        common(s);
        return s;
    };

    auto* group = app.add_subcommand("group", "group utilities");
    group->require_subcommand(1);
    auto* ratio = leaf(group, "ratio", "Følner ratio |A_n ∩ φA_n| / |A_n|");
    ratio->add_option("--n", cfg.n, "window index")->required()->check(CLI::PositiveNumber);
    ratio->add_option("--phi", cfg.phi, "element as comma-separated integers")->required();

    auto* average = leaf(&app, "average", "Følner average F_n(x)");
    auto* ergodic = leaf(&app, "ergodic", "mean ergodic limit with a convergence trace");

    auto* orbitope = app.add_subcommand("orbitope", "orbitope geometry");
    orbitope->require_subcommand(1);
    std::vector<std::pair<CLI::App*, std::string>> orbitope_subs;
    for (const char* s : {"member", "support", "invariant"}) orbitope_subs.emplace_back(leaf(orbitope, s, std::string("orbitope ") + s), s);

    auto* kernel = app.add_subcommand("kernel", "kernel mean embeddings");
    kernel->require_subcommand(1);
    std::vector<std::pair<CLI::App*, std::string>> kernel_subs;
    for (const char* s : {"symmetrize", "mmd", "decompose"}) kernel_subs.emplace_back(leaf(kernel, s, std::string("kernel ") + s), s);

    auto* transport = app.add_subcommand("transport", "optimal transport couplings");
    transport->require_subcommand(1);
    std::vector<std::pair<CLI::App*, std::string>> transport_subs;
    for (const char* s : {"solve", "invariant", "extreme", "symmetrize"})
        transport_subs.emplace_back(leaf(transport, s, std::string("transport ") + s), s);

    auto* test = app.add_subcommand("test", "maximin tests");
    test->require_subcommand(1);
    std::vector<std::pair<CLI::App*, std::string>> test_subs;
    for (const char* s : {"maximin", "invariantize"}) {
        auto* sub = leaf(test, s, std::string("test ") + s);
        sub->add_flag("--allow-overlap", cfg.allow_overlap, "accept hypothesis and alternative sets that intersect");
        test_subs.emplace_back(sub, s);
    }

    auto* cocycle = app.add_subcommand("cocycle", "cocycle surrogate actions");
    cocycle->require_subcommand(1);
    std::vector<std::pair<CLI::App*, std::string>> cocycle_subs;
    for (const char* s : {"apply", "average", "equivariant-kernel"}) cocycle_subs.emplace_back(leaf(cocycle, s, std::string("cocycle ") + s), s);

    auto* verify_cmd = app.add_subcommand("verify", "acceptance suite");
    verify_cmd->require_subcommand(1);
    auto* verify_all = leaf(verify_cmd, "all", "run every acceptance criterion");
    verify_all->get_option("--format")->default_str("json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    auto dispatch = [&](const std::vector<std::pair<CLI::App*, std::string>>& subs, auto&& fn) -> std::optional<int> {
        for (const auto& [s, name] : subs)
            if (s->parsed()) return fn(cfg, name);
        return std::nullopt;
    };

    try {
        if (ratio->parsed()) return cmd_group_ratio(cfg);
        if (average->parsed()) return cmd_average(cfg);
        if (ergodic->parsed()) return cmd_ergodic(cfg);
        if (auto r = dispatch(orbitope_subs, cmd_orbitope)) return *r;
        if (auto r = dispatch(kernel_subs, cmd_kernel)) return *r;
        if (auto r = dispatch(transport_subs, cmd_transport)) return *r;
        if (auto r = dispatch(test_subs, cmd_test)) return *r;
        if (auto r = dispatch(cocycle_subs, cmd_cocycle)) return *r;
        if (verify_all->parsed()) return cmd_verify(cfg);
        std::cerr << "error: unknown subcommand\n";
        return kInputError;
    } catch (const VerificationError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kVerificationFailure;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kVerificationFailure;
    } catch (const Error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    }
}
