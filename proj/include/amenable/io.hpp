#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "amenable/action.hpp"
#include "amenable/cocycle.hpp"
#include "amenable/config.hpp"
#include "amenable/decision.hpp"
#include "amenable/group.hpp"
#include "amenable/linalg.hpp"
#include "amenable/lp.hpp"

namespace amenable::io {

using json = nlohmann::ordered_json;

// ---- scalars --------------------------------------------------------------

/// Shortest decimal string that reads back to the same double.
inline std::string decimal(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_number(std::string_view text, std::string_view what = "number") {
    std::string s(text);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    s = s.substr(b);
    if (s == "inf" || s == "+inf") return lp::inf;
    if (s == "-inf") return -lp::inf;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    double v = 0.0;
    const auto r = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw InputError("malformed " + std::string(what) + " '" + s + "'");
    return v;
}

/// A JSON number or a decimal string.
inline double number_from(const json& j, std::string_view what = "number") {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_number(j.get<std::string>(), what);
    throw InputError("expected a " + std::string(what) + ", got " + j.dump());
}

inline std::size_t index_from(const json& j, std::string_view what) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw InputError("expected a nonnegative integer for " + std::string(what) + ", got " + j.dump());
    return j.get<std::size_t>();
}

inline const json& field(const json& j, const char* key, std::string_view where) {
    if (!j.is_object() || !j.contains(key))
        throw InputError(std::string(where) + ": missing field '" + key + "'");
    return j.at(key);
}

// ---- files ----------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(std::string_view text, std::string_view what = "input") {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("malformed JSON in " + std::string(what) + ": " + e.what());
    }
}

inline json read_json(const std::string& path) { return parse_json(read_file(path), path); }

inline bool has_json_suffix(const std::string& path) {
    return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

// ---- tables ---------------------------------------------------------------

/// CSV with one header row; every later nonblank row is numeric and of equal width.
inline Matrix parse_csv(std::string_view text, std::string_view what = "CSV") {
    std::vector<Vector> rows;
    bool header = true;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (header) {
            header = false;
            continue;
        }
        Vector row;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            row.push_back(parse_number(cell, std::string(what) + " cell on line " + std::to_string(line_no)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw InputError(std::string(what) + ": line " + std::to_string(line_no) + " has " +
                             std::to_string(row.size()) + " cells, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (header) throw InputError(std::string(what) + ": missing header row");
    if (rows.empty()) throw InputError(std::string(what) + ": no data rows");
    return Matrix::from_rows(rows);
}

inline Vector vector_from_json(const json& j, std::string_view what = "vector") {
    if (!j.is_array()) throw InputError(std::string(what) + ": expected an array");
    Vector v;
    for (const auto& x : j) v.push_back(number_from(x, what));
    return v;
}

/// Array of rows, or {"rows": [...]}.
inline Matrix table_from_json(const json& j, std::string_view what = "table") {
    const json& rows = j.is_object() ? field(j, "rows", what) : j;
    if (!rows.is_array() || rows.empty()) throw InputError(std::string(what) + ": expected a nonempty array of rows");
    std::vector<Vector> out;
    for (const auto& r : rows) {
        out.push_back(vector_from_json(r, what));
        if (out.back().size() != out.front().size()) throw InputError(std::string(what) + ": ragged rows");
    }
    if (out.front().empty()) throw InputError(std::string(what) + ": empty rows");
    return Matrix::from_rows(out);
}

inline Matrix read_table(const std::string& path) {
    if (has_json_suffix(path)) return table_from_json(read_json(path), path);
    return parse_csv(read_file(path), path);
}

/// A single row or a single column.
inline Vector read_vector(const std::string& path) {
    if (has_json_suffix(path)) return vector_from_json(read_json(path), path);
    const Matrix t = parse_csv(read_file(path), path);
    if (t.rows() == 1) return Vector(t.row(0).begin(), t.row(0).end());
    if (t.cols() == 1) return t.column(0);
    throw InputError(path + ": expected a single row or column");
}

inline json to_json(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline json to_json(const Matrix& m) {
    json a = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(to_json(m.row(i)));
    return a;
}

inline void write_csv(std::ostream& os, const Matrix& m, const std::vector<std::string>& header = {}) {
    for (std::size_t j = 0; j < m.cols(); ++j)
        os << (j ? "," : "") << (header.size() == m.cols() ? header[j] : "c" + std::to_string(j));
    os << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << decimal(m(i, j));
        os << '\n';
    }
}

// ---- groups ---------------------------------------------------------------

/// Text grammar, or {kind, params} with params a scalar or an array.
inline std::string group_spec(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    const std::string kind = field(j, "kind", "group").get<std::string>();
    json params = j.contains("params") ? j.at("params") : json::array();
    if (!params.is_array()) params = json::array({params});
    if (kind == "product") {
        if (params.size() != 2) throw InputError("group: product takes exactly two factors");
        return "product(" + group_spec(params[0]) + "," + group_spec(params[1]) + ")";
    }
    std::string s = kind;
    for (const auto& p : params) {
        if (p.is_string()) s += ":" + p.get<std::string>();
        else if (p.is_number_integer()) s += ":" + std::to_string(p.get<long long>());
        else throw InputError("group: parameter " + p.dump() + " is neither an integer nor a word");
    }
    return s;
}

inline Group group_from_json(const json& j) { return parse_group(group_spec(j)); }

/// Comma-separated integers, e.g. "1" for Z or "1,0,2" for a permutation.
inline Element parse_element(std::string_view text) {
    Element e;
    std::size_t start = 0;
    const std::string s(text);
    while (true) {
        const auto comma = s.find(',', start);
        const auto cell = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        long long v = 0;
        const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty() || r.ec != std::errc() || r.ptr != cell.data() + cell.size())
            throw InputError("malformed group element '" + s + "'");
        e.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return e;
}

// ---- actions --------------------------------------------------------------

/// {group, dim, tables}: one row-major table of decimal strings per element, in
/// canonical element order.
inline LinearAction linear_action_from_json(const json& j) {
    const Group g = group_from_json(field(j, "group", "action"));
    const std::size_t d = index_from(field(j, "dim", "action"), "dim");
    const json& tabs = field(j, "tables", "action");
    if (!tabs.is_array()) throw InputError("action: tables must be an array");
    std::vector<Matrix> tables;
    for (const auto& t : tabs) {
        const Vector flat = vector_from_json(t, "action table entry");
        if (flat.size() != d * d) throw InputError("action: each table needs dim*dim entries");
        tables.push_back(Matrix(d, d, flat));
    }
    return LinearAction::from_tables(g, d, tables);
}

inline json to_json(const LinearAction& a) {
    json tabs = json::array();
    for (const auto& e : a.group().elements()) {
        const Matrix m = a.matrix(e);
        json t = json::array();
        for (double v : m.data()) t.push_back(decimal(v));
        tabs.push_back(std::move(t));
    }
    return json{{"group", a.group().name()}, {"dim", a.dim()}, {"tables", std::move(tabs)}};
}

/// Point action on a finite carrier. Either explicit "permutations" (index
/// arrays, one per element in canonical order) or "kind": natural | trivial |
/// coordinate (with "alphabet") | trivial (with "carrier").
inline PointAction point_action_from_json(const json& j, const Group& g) {
    if (j.is_number_integer()) {
        const std::size_t m = index_from(j, "carrier");
        if (g.degree() == m) return PointAction::natural(g);
        if (g.order() == 1) return PointAction::trivial(g, m);
        throw InputError("carrier size " + std::to_string(m) + " does not match the degree of " + g.name());
    }
    if (!j.is_object()) throw InputError("carrier: expected an integer or an object");
    if (j.contains("permutations")) {
        const std::size_t m = index_from(field(j, "carrier", "carrier"), "carrier");
        std::vector<std::vector<std::size_t>> perms;
        for (const auto& p : j.at("permutations")) {
            std::vector<std::size_t> row;
            for (const auto& v : p) row.push_back(index_from(v, "permutation entry"));
            perms.push_back(std::move(row));
        }
        return PointAction::from_permutations(g, m, perms);
    }
    const std::string kind = j.value("kind", std::string("natural"));
    if (kind == "natural") return PointAction::natural(g);
    if (kind == "trivial") return PointAction::trivial(g, index_from(field(j, "carrier", "carrier"), "carrier"));
    if (kind == "coordinate") return PointAction::coordinate_permutation(g, index_from(field(j, "alphabet", "carrier"), "alphabet"));
    throw InputError("carrier: unknown kind '" + kind + "'");
}

inline PointAction point_action_from_json(const json& j) {
    const Group g = group_from_json(field(j, "group", "action"));
    return point_action_from_json(j.contains("carrier") && !j.contains("permutations") && !j.contains("kind") ? j.at("carrier") : j, g);
}

inline json to_json(const PointAction& a) {
    json perms = json::array();
    for (const auto& e : a.group().elements()) {
        json p = json::array();
        for (auto v : a.permutation(e)) p.push_back(v);
        perms.push_back(std::move(p));
    }
    return json{{"group", a.group().name()}, {"carrier", a.carrier_size()}, {"permutations", std::move(perms)}};
}

// ---- cocycles -------------------------------------------------------------

/// {kind: identity|sign|equivariance|character, params}. Equivariance takes
/// params.representation = "permutation" or an action document; character
/// takes params.chi = "sign" | "trivial" or one ±1 per element.
inline Cocycle cocycle_from_json(const json& j, const PointAction& carrier) {
    const std::string kind = field(j, "kind", "cocycle").get<std::string>();
    const json params = j.contains("params") ? j.at("params") : json::object();
    const std::size_t t = params.contains("value_dim") ? index_from(params.at("value_dim"), "value_dim") : 1;
    const Group& g = carrier.group();
    if (kind == "identity") return Cocycle::identity(carrier, t);
    if (kind == "sign") return Cocycle::sign(carrier, t);
    if (kind == "equivariance") {
        const json rep = params.value("representation", json("permutation"));
        if (rep.is_string() && rep.get<std::string>() == "permutation")
            return Cocycle::equivariance(carrier, LinearAction::permutation_representation(g));
        if (rep.is_object()) return Cocycle::equivariance(carrier, linear_action_from_json(rep));
        throw InputError("cocycle: unknown representation " + rep.dump());
    }
    if (kind == "character") {
        const json chi = params.value("chi", json("sign"));
        if (chi.is_string() && chi.get<std::string>() == "sign")
            return Cocycle::character(carrier, [](const Element& e) { return permutation_sign(e); }, t);
        if (chi.is_string() && chi.get<std::string>() == "trivial")
            return Cocycle::character(carrier, [](const Element&) { return 1.0; }, t);
        if (chi.is_array()) {
            const auto elems = g.elements();
            const Vector vals = vector_from_json(chi, "character value");
            if (vals.size() != elems.size()) throw InputError("cocycle: character needs one value per element");
            auto table = std::make_shared<std::map<Element, double>>();
            for (std::size_t k = 0; k < elems.size(); ++k) table->emplace(elems[k], vals[k]);
            return Cocycle::character(carrier, [table](const Element& e) { return table->at(e); }, t);
        }
        throw InputError("cocycle: unknown character " + chi.dump());
    }
    throw InputError("cocycle: unknown kind '" + kind + "'");
}

// ---- testing problems -----------------------------------------------------

/// {carrier, group, H, A, alpha}.
inline TestingProblem testing_problem_from_json(const json& j) {
    const Group g = group_from_json(field(j, "group", "testing problem"));
    TestingProblem prob{point_action_from_json(field(j, "carrier", "testing problem"), g), {}, {}, 0.05};
    for (const auto& p : field(j, "H", "testing problem")) prob.hypothesis.push_back(vector_from_json(p, "H"));
    for (const auto& p : field(j, "A", "testing problem")) prob.alternative.push_back(vector_from_json(p, "A"));
    prob.alpha = number_from(field(j, "alpha", "testing problem"), "alpha");
    return prob;
}

// ---- LP debug format ------------------------------------------------------

inline const char* to_string(lp::Relation r) {
    switch (r) {
        case lp::Relation::LessEqual: return "<=";
        case lp::Relation::Equal: return "=";
        case lp::Relation::GreaterEqual: return ">=";
    }
    return "?";
}

inline json to_json(const lp::LinearProgram& prog) {
    auto strings = [](const Vector& v) {
        json a = json::array();
        for (double x : v) a.push_back(decimal(x));
        return a;
    };
    json rows = json::array(), rels = json::array();
    for (const auto& r : prog.rows) rows.push_back(strings(r));
    for (auto r : prog.relations) rels.push_back(to_string(r));
    return json{{"sense", prog.sense == lp::Sense::Minimize ? "min" : "max"},
                {"objective", strings(prog.objective)},
                {"rows", std::move(rows)},
                {"relations", std::move(rels)},
                {"rhs", strings(prog.rhs)},
                {"lower", strings(prog.lower)},
                {"upper", strings(prog.upper)}};
}

inline lp::LinearProgram lp_from_json(const json& j) {
    const std::string sense = field(j, "sense", "lp").get<std::string>();
    if (sense != "min" && sense != "max") throw InputError("lp: sense must be 'min' or 'max'");
    const Vector obj = vector_from_json(field(j, "objective", "lp"), "objective");
    lp::LinearProgram prog(obj.size(), sense == "min" ? lp::Sense::Minimize : lp::Sense::Maximize);
    prog.objective = obj;
    const json& rows = field(j, "rows", "lp");
    const json& rels = field(j, "relations", "lp");
    const Vector rhs = vector_from_json(field(j, "rhs", "lp"), "rhs");
    if (rows.size() != rels.size() || rows.size() != rhs.size()) throw InputError("lp: rows, relations and rhs differ in length");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string r = rels[i].get<std::string>();
        const lp::Relation rel = r == "<=" ? lp::Relation::LessEqual
                                 : r == "=" ? lp::Relation::Equal
                                 : r == ">=" ? lp::Relation::GreaterEqual
                                             : throw InputError("lp: unknown relation '" + r + "'");
        prog.add_row(vector_from_json(rows[i], "lp row"), rel, rhs[i]);
    }
    if (j.contains("lower")) prog.lower = vector_from_json(j.at("lower"), "lower bound");
    if (j.contains("upper")) prog.upper = vector_from_json(j.at("upper"), "upper bound");
    prog.validate();
    return prog;
}

// ---- reports --------------------------------------------------------------

inline json to_json(const Tolerances& t) {
    return json{{"feasibility", t.feasibility},
                {"duality", t.duality},
                {"dedup", t.dedup},
                {"pivot", t.pivot},
                {"condition_limit", t.condition_limit}};
}

}  // namespace amenable::io
