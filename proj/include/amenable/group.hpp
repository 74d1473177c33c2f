#pragma once

// Finite permutation groups and windowed amenable groups (integer lattices,
// finitary symmetric truncations, the discrete Heisenberg group), together
// with their canonical Følner windows.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <cstdlib>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "amenable/config.hpp"

namespace amenable {

/// A group element: a short integer tuple whose meaning depends on the group
/// (permutation image array, lattice coordinates, Heisenberg triple, ...).
class Element {
public:
    static constexpr std::size_t capacity = 16;

    Element() = default;
    Element(std::initializer_list<std::int64_t> vals) {
        if (vals.size() > capacity) throw LimitError("Element: too many coordinates");
        for (auto v : vals) data_[size_++] = v;
    }
    explicit Element(std::size_t n) {
        if (n > capacity) throw LimitError("Element: too many coordinates");
        size_ = static_cast<std::uint8_t>(n);
    }
    template <class It>
    Element(It first, It last) {
        for (; first != last; ++first) push_back(static_cast<std::int64_t>(*first));
    }

    std::size_t size() const { return size_; }
    std::int64_t operator[](std::size_t i) const { return data_[i]; }
    std::int64_t& operator[](std::size_t i) { return data_[i]; }
    const std::int64_t* begin() const { return data_.data(); }
    const std::int64_t* end() const { return data_.data() + size_; }

    void push_back(std::int64_t v) {
        if (size_ == capacity) throw LimitError("Element: too many coordinates");
        data_[size_++] = v;
    }

    friend bool operator==(const Element& a, const Element& b) {
        return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
    }
    friend bool operator<(const Element& a, const Element& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

    std::string str() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < size_; ++i) os << (i ? "," : "") << data_[i];
        os << ')';
        return os.str();
    }

private:
    std::array<std::int64_t, capacity> data_{};
    std::uint8_t size_ = 0;
};

enum class GroupKind { FiniteEnumerated, IntegerWindow };

namespace detail {

class GroupImpl {
public:
    virtual ~GroupImpl() = default;
    virtual std::string name() const = 0;
    virtual GroupKind kind() const = 0;
    virtual Element identity() const = 0;
    virtual Element compose(const Element& a, const Element& b) const = 0;
    virtual Element inverse(const Element& a) const = 0;
    virtual bool contains(const Element& a) const = 0;
    /// Canonical window A_n (the whole group for finite groups).
    virtual std::vector<Element> window(std::size_t n) const = 0;
    virtual std::size_t window_size(std::size_t n) const { return window(n).size(); }
    /// Whether window(n) is a prefix of window(n + 1) in canonical order.
    virtual bool prefix_nested() const { return false; }
    virtual std::vector<Element> generators() const = 0;
    /// Degree of the permutation presentation, 0 if elements are not permutations.
    virtual std::size_t degree() const { return 0; }
    /// Closed-form |A_n ∩ φA_n| where one is known.
    virtual std::optional<std::size_t> closed_form_overlap(std::size_t, const Element&) const { return std::nullopt; }
};

inline Element compose_permutations(const Element& a, const Element& b) {
    Element r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[static_cast<std::size_t>(b[i])];
    return r;
}

inline Element invert_permutation(const Element& a) {
    Element r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[static_cast<std::size_t>(a[i])] = static_cast<std::int64_t>(i);
    return r;
}

inline bool is_permutation(const Element& a, std::size_t degree) {
    if (a.size() != degree) return false;
    std::vector<bool> seen(degree, false);
    for (auto v : a) {
        if (v < 0 || static_cast<std::size_t>(v) >= degree || seen[static_cast<std::size_t>(v)]) return false;
        seen[static_cast<std::size_t>(v)] = true;
    }
    return true;
}

inline Element identity_permutation(std::size_t degree) {
    Element e(degree);
    for (std::size_t i = 0; i < degree; ++i) e[i] = static_cast<std::int64_t>(i);
    return e;
}

/// All permutations of {0..k-1} fixing {k..degree-1}, in lexicographic order.
inline std::vector<Element> symmetric_embedded(std::size_t k, std::size_t degree) {
    std::vector<std::int64_t> p(degree);
    std::iota(p.begin(), p.end(), 0);
    std::vector<Element> out;
    do {
        out.emplace_back(p.begin(), p.end());
    } while (std::next_permutation(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k)));
    return out;
}

/// Finite group of permutations of {0..degree-1}, closed under composition.
class PermutationGroup final : public GroupImpl {
public:
    PermutationGroup(std::string name, std::size_t degree, const std::vector<Element>& gens,
                     std::size_t max_order = 40320)
        : name_(std::move(name)), degree_(degree), gens_(gens) {
        if (degree == 0 || degree > Element::capacity) throw LimitError("permutation degree out of range");
        for (const auto& g : gens)
            if (!is_permutation(g, degree)) throw InputError("generator is not a permutation of the carrier");
        std::set<Element> seen{identity_permutation(degree)};
        std::queue<Element> todo;
        todo.push(identity_permutation(degree));
        while (!todo.empty()) {
            Element g = todo.front();
            todo.pop();
            for (const auto& s : gens) {
                Element h = compose_permutations(s, g);
                if (seen.insert(h).second) {
                    if (seen.size() > max_order) throw LimitError("permutation group exceeds the order limit");
                    todo.push(h);
                }
            }
        }
        elements_.assign(seen.begin(), seen.end());
    }

    std::string name() const override { return name_; }
    GroupKind kind() const override { return GroupKind::FiniteEnumerated; }
    Element identity() const override { return identity_permutation(degree_); }
    Element compose(const Element& a, const Element& b) const override { return compose_permutations(a, b); }
    Element inverse(const Element& a) const override { return invert_permutation(a); }
    bool contains(const Element& a) const override {
        return std::binary_search(elements_.begin(), elements_.end(), a);
    }
    std::vector<Element> window(std::size_t) const override { return elements_; }
    std::size_t window_size(std::size_t) const override { return elements_.size(); }
    bool prefix_nested() const override { return true; }
    std::vector<Element> generators() const override { return gens_; }
    std::size_t degree() const override { return degree_; }

private:
    std::string name_;
    std::size_t degree_;
    std::vector<Element> gens_;
    std::vector<Element> elements_;
};

/// The finitary symmetric group truncated to permutations of {0..N-1}; the
/// window A_n is S_min(n, N), the permutations moving only the first n points.
class FinitarySymmetric final : public GroupImpl {
public:
    explicit FinitarySymmetric(std::size_t ambient) : n_(ambient) {
        if (ambient < 1) throw InputError("finsym: ambient degree must be >= 1");
        if (ambient > default_limits.symmetric_degree) throw LimitError("finsym: ambient degree exceeds the limit");
    }
    std::string name() const override { return "finsym:" + std::to_string(n_); }
    GroupKind kind() const override { return GroupKind::IntegerWindow; }
    Element identity() const override { return identity_permutation(n_); }
    Element compose(const Element& a, const Element& b) const override { return compose_permutations(a, b); }
    Element inverse(const Element& a) const override { return invert_permutation(a); }
    bool contains(const Element& a) const override { return is_permutation(a, n_); }
    std::vector<Element> window(std::size_t n) const override {
        if (n == 0) throw InputError("window index must be >= 1");
        return symmetric_embedded(std::min(n, n_), n_);
    }
    std::size_t window_size(std::size_t n) const override {
        std::size_t f = 1;
        for (std::size_t i = 2; i <= std::min(n, n_); ++i) f *= i;
        return f;
    }
    std::vector<Element> generators() const override {
        std::vector<Element> out;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            Element t = identity_permutation(n_);
            std::swap(t[i], t[i + 1]);
            out.push_back(t);
        }
        return out;
    }
    std::size_t degree() const override { return n_; }

private:
    std::size_t n_;
};

/// Z^d with box windows [0,n]^d or symmetric windows [-n,n]^d, lexicographic order.
class Lattice final : public GroupImpl {
public:
    Lattice(std::size_t d, bool symmetric) : d_(d), symmetric_(symmetric) {
        if (d < 1) throw InputError("zd: dimension must be >= 1");
        if (d > Element::capacity) throw LimitError("zd: dimension exceeds the element capacity");
    }
    std::string name() const override {
        const std::string w = symmetric_ ? "sym" : "box";
        return d_ == 1 ? "z:" + w : "zd:" + std::to_string(d_) + ":" + w;
    }
    GroupKind kind() const override { return GroupKind::IntegerWindow; }
    Element identity() const override { return Element(d_); }
    Element compose(const Element& a, const Element& b) const override {
        Element r(d_);
        for (std::size_t i = 0; i < d_; ++i) r[i] = a[i] + b[i];
        return r;
    }
    Element inverse(const Element& a) const override {
        Element r(d_);
        for (std::size_t i = 0; i < d_; ++i) r[i] = -a[i];
        return r;
    }
    bool contains(const Element& a) const override { return a.size() == d_; }
    std::vector<Element> window(std::size_t n) const override {
        if (n == 0) throw InputError("window index must be >= 1");
        const std::int64_t lo = symmetric_ ? -static_cast<std::int64_t>(n) : 0;
        const std::int64_t hi = static_cast<std::int64_t>(n);
        std::vector<Element> out;
        out.reserve(window_size(n));
        Element cur(d_);
        for (std::size_t i = 0; i < d_; ++i) cur[i] = lo;
        while (true) {
            out.push_back(cur);
            std::size_t k = d_;
            while (k > 0 && cur[k - 1] == hi) cur[--k] = lo;
            if (k == 0) break;
            ++cur[k - 1];
        }
        return out;
    }
    std::size_t window_size(std::size_t n) const override {
        const std::size_t side = symmetric_ ? 2 * n + 1 : n + 1;
        std::size_t s = 1;
        for (std::size_t i = 0; i < d_; ++i) s *= side;
        return s;
    }
    bool prefix_nested() const override { return d_ == 1 && !symmetric_; }
    std::vector<Element> generators() const override {
        std::vector<Element> out;
        for (std::size_t i = 0; i < d_; ++i) {
            Element e(d_);
            e[i] = 1;
            out.push_back(e);
        }
        return out;
    }
    std::size_t rank() const { return d_; }
    std::optional<std::size_t> closed_form_overlap(std::size_t n, const Element& t) const override {
        const std::int64_t side = symmetric_ ? 2 * static_cast<std::int64_t>(n) + 1 : static_cast<std::int64_t>(n) + 1;
        std::size_t c = 1;
        for (std::size_t i = 0; i < d_; ++i) c *= static_cast<std::size_t>(std::max<std::int64_t>(0, side - std::abs(t[i])));
        return c;
    }

private:
    std::size_t d_;
    bool symmetric_;
};

/// Integer Heisenberg group of matrices M[a,b,c] = [[1,a,b],[0,1,c],[0,0,1]],
/// stored as triples (a,b,c); windows |a|,|b|,|c| <= n.
class Heisenberg final : public GroupImpl {
public:
    std::string name() const override { return "heis"; }
    GroupKind kind() const override { return GroupKind::IntegerWindow; }
    Element identity() const override { return {0, 0, 0}; }
    Element compose(const Element& x, const Element& y) const override {
        return {x[0] + y[0], x[1] + y[1] + x[0] * y[2], x[2] + y[2]};
    }
    Element inverse(const Element& x) const override { return {-x[0], -x[1] + x[0] * x[2], -x[2]}; }
    bool contains(const Element& a) const override { return a.size() == 3; }
    std::vector<Element> window(std::size_t n) const override {
        if (n == 0) throw InputError("window index must be >= 1");
        const auto m = static_cast<std::int64_t>(n);
        std::vector<Element> out;
        out.reserve(window_size(n));
        for (std::int64_t a = -m; a <= m; ++a)
            for (std::int64_t b = -m; b <= m; ++b)
                for (std::int64_t c = -m; c <= m; ++c) out.push_back({a, b, c});
        return out;
    }
    std::size_t window_size(std::size_t n) const override { return (2 * n + 1) * (2 * n + 1) * (2 * n + 1); }
    std::vector<Element> generators() const override { return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}; }
};

/// Direct product with componentwise windows A_n x B_n (lexicographic order).
class DirectProduct final : public GroupImpl {
public:
    DirectProduct(std::shared_ptr<const GroupImpl> a, std::shared_ptr<const GroupImpl> b)
        : a_(std::move(a)), b_(std::move(b)), sa_(a_->identity().size()), sb_(b_->identity().size()) {
        if (sa_ + sb_ > Element::capacity)
            throw InputError("product of incompatible carriers: combined element exceeds capacity");
    }
    std::string name() const override { return "product(" + a_->name() + "," + b_->name() + ")"; }
    GroupKind kind() const override {
        return a_->kind() == GroupKind::FiniteEnumerated && b_->kind() == GroupKind::FiniteEnumerated
                   ? GroupKind::FiniteEnumerated
                   : GroupKind::IntegerWindow;
    }
    Element identity() const override { return join(a_->identity(), b_->identity()); }
    Element compose(const Element& x, const Element& y) const override {
        return join(a_->compose(left(x), left(y)), b_->compose(right(x), right(y)));
    }
    Element inverse(const Element& x) const override { return join(a_->inverse(left(x)), b_->inverse(right(x))); }
    bool contains(const Element& x) const override {
        return x.size() == sa_ + sb_ && a_->contains(left(x)) && b_->contains(right(x));
    }
    std::vector<Element> window(std::size_t n) const override {
        std::vector<Element> out;
        const auto wa = a_->window(n);
        const auto wb = b_->window(n);
        out.reserve(wa.size() * wb.size());
        for (const auto& x : wa)
            for (const auto& y : wb) out.push_back(join(x, y));
        return out;
    }
    std::size_t window_size(std::size_t n) const override { return a_->window_size(n) * b_->window_size(n); }
    bool prefix_nested() const override { return kind() == GroupKind::FiniteEnumerated; }
    std::vector<Element> generators() const override {
        std::vector<Element> out;
        for (const auto& g : a_->generators()) out.push_back(join(g, b_->identity()));
        for (const auto& g : b_->generators()) out.push_back(join(a_->identity(), g));
        return out;
    }

private:
    Element join(const Element& x, const Element& y) const {
        Element r;
        for (auto v : x) r.push_back(v);
        for (auto v : y) r.push_back(v);
        return r;
    }
    Element left(const Element& x) const { return Element(x.begin(), x.begin() + sa_); }
    Element right(const Element& x) const { return Element(x.begin() + sa_, x.end()); }

    std::shared_ptr<const GroupImpl> a_, b_;
    std::size_t sa_, sb_;
};

}  // namespace detail

/// Immutable handle to a group model. Copies share the underlying data.
class Group {
public:
    explicit Group(std::shared_ptr<const detail::GroupImpl> impl) : impl_(std::move(impl)) { validate(); }

    std::string name() const { return impl_->name(); }
    GroupKind kind() const { return impl_->kind(); }
    bool finite() const { return kind() == GroupKind::FiniteEnumerated; }
    Element identity() const { return impl_->identity(); }
    Element compose(const Element& a, const Element& b) const { return impl_->compose(a, b); }
    Element inverse(const Element& a) const { return impl_->inverse(a); }
    bool contains(const Element& a) const { return impl_->contains(a); }
    std::vector<Element> generators() const { return impl_->generators(); }
    std::size_t degree() const { return impl_->degree(); }

    /// All elements of a finite group, in canonical (lexicographic) order.
    std::vector<Element> elements() const {
        if (!finite()) throw InputError("group '" + name() + "' is not finite-enumerated; supply a window index");
        return impl_->window(1);
    }
    std::size_t order() const { return elements().size(); }

    /// Image of carrier point i under a permutation element.
    std::size_t apply_point(const Element& g, std::size_t i) const {
        if (degree() == 0) throw InputError("group '" + name() + "' has no permutation presentation");
        return static_cast<std::size_t>(g[i]);
    }

    const detail::GroupImpl& impl() const { return *impl_; }
    std::shared_ptr<const detail::GroupImpl> shared_impl() const { return impl_; }

    friend bool operator==(const Group& a, const Group& b) { return a.impl_ == b.impl_ || a.name() == b.name(); }

private:
    void validate() const {
        const Element e = identity();
        const std::vector<Element> probe = impl_->window(1);
        if (probe.empty()) throw InputError("group has an empty window");
        for (const auto& g : probe) {
            if (!(compose(g, e) == g) || !(compose(e, g) == g)) throw InputError("identity law fails");
            if (!(compose(g, inverse(g)) == e)) throw InputError("inverse law fails");
        }
        if (finite()) {
            for (const auto& g : probe)
                if (!contains(inverse(g))) throw InputError("element list not closed under inverse");
            for (const auto& g : impl_->generators())
                for (const auto& h : probe)
                    if (!contains(compose(g, h))) throw InputError("element list not closed under composition");
        }
    }

    std::shared_ptr<const detail::GroupImpl> impl_;
};

/// The canonical Følner windows of a group.
class FolnerFamily {
public:
    explicit FolnerFamily(Group g) : group_(std::move(g)) {}

    const Group& group() const { return group_; }
    std::vector<Element> window(std::size_t n) const {
        if (n == 0) throw InputError("window index must be >= 1");
        return group_.impl().window(n);
    }
    std::size_t window_size(std::size_t n) const { return group_.impl().window_size(n); }
    bool prefix_nested() const { return group_.impl().prefix_nested(); }

    /// |A_n ∩ φA_n|, from a closed form when the group has one, else by set intersection.
    std::size_t overlap(std::size_t n, const Element& phi) const;

private:
    Group group_;
};

struct GroupModel {
    Group group;
    FolnerFamily family;
};

// ---- built-in constructors ------------------------------------------------

inline Group trivial_group() {
    return Group(std::make_shared<detail::PermutationGroup>("trivial", 1, std::vector<Element>{}));
}

inline Group cyclic_group(std::size_t k) {
    if (k < 1) throw InputError("cyclic: k must be >= 1");
    if (k > Element::capacity) throw LimitError("cyclic: k exceeds the permutation degree limit");
    Element r(k);
    for (std::size_t i = 0; i < k; ++i) r[i] = static_cast<std::int64_t>((i + 1) % k);
    return Group(std::make_shared<detail::PermutationGroup>("cyclic:" + std::to_string(k), k, std::vector<Element>{r}));
}

/// Symmetries of the regular k-gon acting on its k vertices (order 2k, k >= 3).
inline Group dihedral_group(std::size_t k) {
    if (k < 1) throw InputError("dihedral: k must be >= 1");
    if (k < 3) throw InputError("dihedral: the vertex presentation needs k >= 3");
    if (k > Element::capacity) throw LimitError("dihedral: k exceeds the permutation degree limit");
    Element r(k), s(k);
    for (std::size_t i = 0; i < k; ++i) {
        r[i] = static_cast<std::int64_t>((i + 1) % k);
        s[i] = static_cast<std::int64_t>((k - i) % k);
    }
    return Group(
        std::make_shared<detail::PermutationGroup>("dihedral:" + std::to_string(k), k, std::vector<Element>{r, s}));
}

inline Group symmetric_group(std::size_t k) {
    if (k < 1) throw InputError("sym: k must be >= 1");
    if (k > default_limits.symmetric_degree) throw LimitError("sym: k exceeds the enumeration limit");
    std::vector<Element> gens;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        Element t = detail::identity_permutation(k);
        std::swap(t[i], t[i + 1]);
        gens.push_back(t);
    }
    return Group(std::make_shared<detail::PermutationGroup>("sym:" + std::to_string(k), k, gens));
}

/// Group generated by explicit permutations of {0..degree-1}.
inline Group permutation_group(std::string name, std::size_t degree, std::vector<Element> generators) {
    return Group(std::make_shared<detail::PermutationGroup>(std::move(name), degree, generators));
}

inline Group integer_lattice(std::size_t d, bool symmetric_windows = false) {
    return Group(std::make_shared<detail::Lattice>(d, symmetric_windows));
}

inline Group finitary_symmetric(std::size_t ambient) {
    return Group(std::make_shared<detail::FinitarySymmetric>(ambient));
}

inline Group heisenberg_group() { return Group(std::make_shared<detail::Heisenberg>()); }

/// Direct product. Two permutation groups act on the disjoint union of their
/// carriers; any other pair uses componentwise windows.
inline Group product_group(const Group& a, const Group& b) {
    if (a.finite() && b.finite() && a.degree() > 0 && b.degree() > 0) {
        const std::size_t da = a.degree();
        const std::size_t db = b.degree();
        if (da + db > Element::capacity)
            throw InputError("product of incompatible carriers: disjoint union exceeds the degree limit");
        std::vector<Element> gens;
        for (const auto& g : a.generators()) {
            Element p = detail::identity_permutation(da + db);
            for (std::size_t i = 0; i < da; ++i) p[i] = g[i];
            gens.push_back(p);
        }
        for (const auto& g : b.generators()) {
            Element p = detail::identity_permutation(da + db);
            for (std::size_t i = 0; i < db; ++i) p[da + i] = g[i] + static_cast<std::int64_t>(da);
            gens.push_back(p);
        }
        return permutation_group("product(" + a.name() + "," + b.name() + ")", da + db, gens);
    }
    return Group(std::make_shared<detail::DirectProduct>(a.shared_impl(), b.shared_impl()));
}

// ---- spec parsing ---------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_top_level(std::string_view s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::size_t parse_count(const std::string& s, const std::string& what) {
    if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos)
        throw InputError("group spec: expected an integer for " + what + ", got '" + s + "'");
    const long long v = std::stoll(s);
    if (v < 1) throw InputError("group spec: " + what + " must be >= 1");
    return static_cast<std::size_t>(v);
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Parse the structured text form, e.g. "cyclic:5", "sym:3", "zd:2:box",
/// "heis", "finsym:6", "product(cyclic:2,cyclic:3)".
inline Group parse_group(std::string_view text) {
    const std::string s = detail::trim(text);
    if (s.rfind("product(", 0) == 0) {
        if (s.back() != ')') throw InputError("group spec: unbalanced product(...)");
        auto parts = detail::split_top_level(std::string_view(s).substr(8, s.size() - 9), ',');
        if (parts.size() != 2) throw InputError("group spec: product takes exactly two factors");
        return product_group(parse_group(parts[0]), parse_group(parts[1]));
    }
    auto fields = detail::split_top_level(s, ':');
    const std::string& kind = fields[0];
    auto need = [&](std::size_t n) {
        if (fields.size() < n + 1) throw InputError("group spec '" + s + "': missing parameter");
    };
    auto window_style = [&](std::size_t idx) {
        if (fields.size() <= idx) return false;
        if (fields[idx] == "box") return false;
        if (fields[idx] == "sym") return true;
        throw InputError("group spec '" + s + "': window must be 'box' or 'sym'");
    };
    if (kind == "trivial") return trivial_group();
    if (kind == "cyclic") {
        need(1);
        return cyclic_group(detail::parse_count(fields[1], "k"));
    }
    if (kind == "dihedral") {
        need(1);
        return dihedral_group(detail::parse_count(fields[1], "k"));
    }
    if (kind == "sym") {
        need(1);
        return symmetric_group(detail::parse_count(fields[1], "k"));
    }
    if (kind == "z") return integer_lattice(1, window_style(1));
    if (kind == "zd") {
        need(1);
        return integer_lattice(detail::parse_count(fields[1], "d"), window_style(2));
    }
    if (kind == "heis") return heisenberg_group();
    if (kind == "finsym") {
        need(1);
        return finitary_symmetric(detail::parse_count(fields[1], "N"));
    }
    throw InputError("unknown group spec '" + s + "'");
}

inline GroupModel make_group(std::string_view spec) {
    Group g = parse_group(spec);
    return {g, FolnerFamily(g)};
}

// ---- Følner ratios --------------------------------------------------------

struct FolnerRatio {
    std::size_t overlap = 0;  // |A_n ∩ φA_n|
    std::size_t size = 0;     // |A_n|
    double value = 0.0;
};

/// |A_n ∩ φA_n| / |A_n| by exact set intersection.
inline FolnerRatio folner_ratio(const FolnerFamily& family, std::size_t n, const Element& phi) {
    const auto& g = family.group();
    if (!g.contains(phi)) throw InputError("folner_ratio: phi is not an element of " + g.name());
    auto w = family.window(n);
    if (w.empty()) throw InputError("folner_ratio: empty window");
    std::vector<Element> moved;
    moved.reserve(w.size());
    for (const auto& a : w) moved.push_back(g.compose(phi, a));
    if (!std::is_sorted(w.begin(), w.end())) std::sort(w.begin(), w.end());
    if (!std::is_sorted(moved.begin(), moved.end())) std::sort(moved.begin(), moved.end());
    std::size_t hits = 0;
    for (auto i = w.begin(), j = moved.begin(); i != w.end() && j != moved.end();) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else {
            ++hits;
            ++i;
            ++j;
        }
    }
    return {hits, w.size(), static_cast<double>(hits) / static_cast<double>(w.size())};
}

inline std::size_t FolnerFamily::overlap(std::size_t n, const Element& phi) const {
    if (auto c = group_.impl().closed_form_overlap(n, phi)) return *c;
    return folner_ratio(*this, n, phi).overlap;
}

enum class TranslateSide { Left, Right };

/// |A_n △ φA_n| (left) or |A_n △ A_nφ| (right).
inline std::size_t translate_symmetric_difference(const FolnerFamily& family, std::size_t n, const Element& phi,
                                                  TranslateSide side) {
    const auto& g = family.group();
    auto w = family.window(n);
    std::sort(w.begin(), w.end());
    std::size_t hits = 0;
    for (const auto& a : w) {
        const Element t = side == TranslateSide::Left ? g.compose(phi, a) : g.compose(a, phi);
        if (std::binary_search(w.begin(), w.end(), t)) ++hits;
    }
    return 2 * (w.size() - hits);
}

}  // namespace amenable
