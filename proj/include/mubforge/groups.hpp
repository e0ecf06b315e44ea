#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mubforge/detail/util.hpp"
#include "mubforge/report.hpp"

namespace mubforge {

namespace detail {

struct GroupData {
    int n = 0;
    std::vector<int> table;    // row-major, table[a*n+b] = a*b
    std::vector<int> inverse;  // two-sided inverses
    std::string label;
};

}  // namespace detail

/// Finite group as a multiplication table over element indices 0..n-1 with
/// 0 the identity. Construction validates the group axioms: associativity
/// exhaustively for n <= 256 and on 10^6 deterministic samples above.
class FiniteGroup {
public:
    FiniteGroup() = default;

    static FiniteGroup from_table(int n, std::vector<int> table, std::string label = "") {
        if (n < 1) throw std::invalid_argument("group order must be >= 1");
        if (table.size() != static_cast<std::size_t>(n) * n) {
            throw std::invalid_argument("multiplication table must have n^2 entries");
        }
        auto data = std::make_shared<detail::GroupData>();
        data->n = n;
        data->table = std::move(table);
        data->label = std::move(label);
        validate(*data);
        FiniteGroup g;
        g.data_ = std::move(data);
        return g;
    }

    int order() const { return data_->n; }
    const std::string& label() const { return data_->label; }

    int mult(int a, int b) const {
        return data_->table[static_cast<std::size_t>(a) * data_->n + b];
    }

    int inverse(int a) const { return data_->inverse[a]; }

    int power(int x, long long k) const {
        int acc = 0;
        int base = x;
        while (k > 0) {
            if (k & 1) acc = mult(acc, base);
            base = mult(base, base);
            k >>= 1;
        }
        return acc;
    }

    int element_order(int x) const {
        int acc = x;
        int ord = 1;
        while (acc != 0) {
            acc = mult(acc, x);
            ++ord;
        }
        return ord;
    }

    bool is_abelian() const {
        for (int a = 0; a < data_->n; ++a) {
            for (int b = a + 1; b < data_->n; ++b) {
                if (mult(a, b) != mult(b, a)) return false;
            }
        }
        return true;
    }

    bool same_group(const FiniteGroup& other) const { return data_ == other.data_; }

    /// "GROUP v1 order=<n>" followed by n rows of n indices.
    std::string to_table_string() const {
        std::ostringstream os;
        os << "GROUP v1 order=" << data_->n << "\n";
        for (int a = 0; a < data_->n; ++a) {
            for (int b = 0; b < data_->n; ++b) {
                if (b) os << ' ';
                os << mult(a, b);
            }
            os << "\n";
        }
        return os.str();
    }

private:
    friend class Subgroup;

    static void validate(detail::GroupData& data) {
        const int n = data.n;
        for (int v : data.table) {
            if (v < 0 || v >= n) {
                throw std::invalid_argument("table entry " + std::to_string(v) +
                                            " out of range [0," + std::to_string(n) + ")");
            }
        }
        auto at = [&](int a, int b) { return data.table[static_cast<std::size_t>(a) * n + b]; };
        for (int x = 0; x < n; ++x) {
            if (at(0, x) != x || at(x, 0) != x) {
                throw std::invalid_argument("element 0 is not a two-sided identity: witness " +
                                            std::to_string(x));
            }
        }
        // Latin square: every row and column is a permutation
        std::vector<int> seen(n);
        for (int a = 0; a < n; ++a) {
            std::fill(seen.begin(), seen.end(), -1);
            for (int b = 0; b < n; ++b) {
                int v = at(a, b);
                if (seen[v] >= 0) {
                    throw std::invalid_argument(
                        "not a Latin square: row " + std::to_string(a) + " repeats value " +
                        std::to_string(v) + " at columns " + std::to_string(seen[v]) + " and " +
                        std::to_string(b));
                }
                seen[v] = b;
            }
        }
        for (int b = 0; b < n; ++b) {
            std::fill(seen.begin(), seen.end(), -1);
            for (int a = 0; a < n; ++a) {
                int v = at(a, b);
                if (seen[v] >= 0) {
                    throw std::invalid_argument(
                        "not a Latin square: column " + std::to_string(b) + " repeats value " +
                        std::to_string(v) + " at rows " + std::to_string(seen[v]) + " and " +
                        std::to_string(a));
                }
                seen[v] = a;
            }
        }
        // two-sided inverses
        data.inverse.assign(n, -1);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (at(a, b) == 0 && at(b, a) == 0) {
                    data.inverse[a] = b;
                    break;
                }
            }
            if (data.inverse[a] < 0) {
                throw std::invalid_argument("element " + std::to_string(a) +
                                            " has no two-sided inverse");
            }
        }
        auto check_triple = [&](int a, int b, int c) {
            if (at(at(a, b), c) != at(a, at(b, c))) {
                throw std::invalid_argument("not associative: witness triple (" +
                                            std::to_string(a) + "," + std::to_string(b) + "," +
                                            std::to_string(c) + ")");
            }
        };
        if (n <= 256) {
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    for (int c = 0; c < n; ++c) check_triple(a, b, c);
                }
            }
        } else {
            detail::Rng rng(0x61736f63ULL);  // fixed seed: deterministic sampling
            for (int i = 0; i < 1000000; ++i) {
                int a = static_cast<int>(rng.next() % n);
                int b = static_cast<int>(rng.next() % n);
                int c = static_cast<int>(rng.next() % n);
                check_triple(a, b, c);
            }
        }
    }

    std::shared_ptr<const detail::GroupData> data_;
};

namespace detail {

// Canonical invariant factors d_1 | d_2 | ... of a multiset of prime powers.
inline std::vector<long long> invariant_factors_from_primary(
    std::map<int, std::vector<long long>> primary) {
    for (auto& [p, powers] : primary) std::sort(powers.begin(), powers.end(), std::greater<>());
    std::vector<long long> chain;
    bool more = true;
    while (more) {
        more = false;
        long long factor = 1;
        for (auto& [p, powers] : primary) {
            if (!powers.empty()) {
                factor *= powers.front();
                powers.erase(powers.begin());
                more = true;
            }
        }
        if (more) chain.push_back(factor);
    }
    std::sort(chain.begin(), chain.end());
    return chain;
}

inline std::string factor_list_string(const std::vector<long long>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "]";
}

}  // namespace detail

/// Direct product of cyclic groups Z_{f_1} x ... x Z_{f_k}; element index
/// encodes mixed-radix coordinates, first factor fastest.
inline FiniteGroup group_from_invariant_factors(const std::vector<int>& factors) {
    if (factors.empty()) throw std::invalid_argument("need at least one cyclic factor");
    long long order = 1;
    for (int f : factors) {
        if (f < 2) throw std::invalid_argument("cyclic factor " + std::to_string(f) + " is < 2");
        order *= f;
        if (order > 4096) throw std::invalid_argument("group order exceeds the 4096 limit");
    }
    const int n = static_cast<int>(order);
    std::vector<int> table(static_cast<std::size_t>(n) * n);
    auto decode = [&](int idx, std::vector<int>& c) {
        for (std::size_t i = 0; i < factors.size(); ++i) {
            c[i] = idx % factors[i];
            idx /= factors[i];
        }
    };
    std::vector<int> a(factors.size()), b(factors.size());
    for (int i = 0; i < n; ++i) {
        decode(i, a);
        for (int j = 0; j < n; ++j) {
            decode(j, b);
            int idx = 0;
            for (std::size_t t = factors.size(); t > 0;) {
                --t;
                idx = idx * factors[t] + (a[t] + b[t]) % factors[t];
            }
            table[static_cast<std::size_t>(i) * n + j] = idx;
        }
    }
    std::map<int, std::vector<long long>> primary;
    for (int f : factors) {
        long long rest = f;
        for (int p = 2; rest > 1; ++p) {
            if (rest % p == 0) {
                long long pp = 1;
                while (rest % p == 0) {
                    rest /= p;
                    pp *= p;
                }
                primary[p].push_back(pp);
            }
        }
    }
    std::string label = "abelian invariant factors " +
                        detail::factor_list_string(detail::invariant_factors_from_primary(
                            std::move(primary)));
    return FiniteGroup::from_table(n, std::move(table), std::move(label));
}

/// Parses the "GROUP v1 order=<n>" table format.
inline FiniteGroup group_from_table(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) {
        throw std::invalid_argument("group table parse error at line 1: empty input");
    }
    int n = 0;
    if (std::sscanf(line.c_str(), "GROUP v1 order=%d", &n) != 1 || n < 1) {
        throw std::invalid_argument(
            "group table parse error at line 1: expected 'GROUP v1 order=<n>'");
    }
    std::vector<int> table;
    table.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        if (!std::getline(is, line)) {
            throw std::invalid_argument("group table parse error at line " + std::to_string(r + 2) +
                                        ": missing row");
        }
        std::istringstream row(line);
        for (int c = 0; c < n; ++c) {
            int v;
            if (!(row >> v)) {
                throw std::invalid_argument("group table parse error at line " +
                                            std::to_string(r + 2) + ": row has fewer than " +
                                            std::to_string(n) + " entries");
            }
            table.push_back(v);
        }
        int extra;
        if (row >> extra) {
            throw std::invalid_argument("group table parse error at line " + std::to_string(r + 2) +
                                        ": row has more than " + std::to_string(n) + " entries");
        }
    }
    return FiniteGroup::from_table(n, std::move(table));
}

/// Subgroup as a sorted element-index set sharing its parent's table.
class Subgroup {
public:
    Subgroup() = default;

    static Subgroup closure(const FiniteGroup& g, const std::vector<int>& generators) {
        auto s = closure_capped(g, generators, g.order());
        return *s;  // cap = |G| never trips
    }

    /// Closure of the generators, abandoned (nullopt) as soon as it grows
    /// past max_size. Keeps subgroup enumeration from materializing huge
    /// throwaway closures.
    static std::optional<Subgroup> closure_capped(const FiniteGroup& g,
                                                  const std::vector<int>& generators,
                                                  int max_size) {
        for (int x : generators) {
            if (x < 0 || x >= g.order()) {
                throw std::invalid_argument("generator index " + std::to_string(x) +
                                            " out of range");
            }
        }
        std::vector<char> in(g.order(), 0);
        std::vector<int> work{0};
        in[0] = 1;
        for (int x : generators) {
            if (!in[x]) {
                in[x] = 1;
                work.push_back(x);
            }
        }
        if (static_cast<int>(work.size()) > max_size) return std::nullopt;
        // every pair is multiplied in both orders once the later element
        // is reached, so the result is closed even for nonabelian groups
        for (std::size_t i = 0; i < work.size(); ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                for (int v : {g.mult(work[i], work[j]), g.mult(work[j], work[i])}) {
                    if (!in[v]) {
                        in[v] = 1;
                        work.push_back(v);
                        if (static_cast<int>(work.size()) > max_size) return std::nullopt;
                    }
                }
            }
        }
        std::sort(work.begin(), work.end());
        Subgroup s;
        s.data_ = g.data_;
        s.elements_ = std::move(work);
        return s;
    }

    int size() const { return static_cast<int>(elements_.size()); }
    const std::vector<int>& elements() const { return elements_; }

    bool contains(int x) const {
        return std::binary_search(elements_.begin(), elements_.end(), x);
    }

    FiniteGroup parent() const {
        FiniteGroup g;
        g.data_ = data_;
        return g;
    }

    bool is_abelian() const {
        FiniteGroup g = parent();
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            for (std::size_t j = i + 1; j < elements_.size(); ++j) {
                if (g.mult(elements_[i], elements_[j]) != g.mult(elements_[j], elements_[i])) {
                    return false;
                }
            }
        }
        return true;
    }

    bool is_normal() const {
        FiniteGroup g = parent();
        for (int x = 0; x < g.order(); ++x) {
            int xi = g.inverse(x);
            for (int a : elements_) {
                if (!contains(g.mult(g.mult(x, a), xi))) return false;
            }
        }
        return true;
    }

    int intersection_size(const Subgroup& other) const {
        std::size_t i = 0, j = 0;
        int count = 0;
        while (i < elements_.size() && j < other.elements_.size()) {
            if (elements_[i] < other.elements_[j]) {
                ++i;
            } else if (elements_[i] > other.elements_[j]) {
                ++j;
            } else {
                ++count;
                ++i;
                ++j;
            }
        }
        return count;
    }

    bool operator==(const Subgroup& rhs) const { return elements_ == rhs.elements_; }
    bool operator<(const Subgroup& rhs) const { return elements_ < rhs.elements_; }

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            s += (i ? "," : "") + std::to_string(elements_[i]);
        }
        return s + "}";
    }

private:
    friend class FiniteGroup;
    std::shared_ptr<const detail::GroupData> data_;
    std::vector<int> elements_;
};

inline Subgroup subgroup_generate(const FiniteGroup& g, const std::vector<int>& generators) {
    return Subgroup::closure(g, generators);
}

/// |E_p(a)|: elements with h^p = identity (order 1 or p).
inline int e_p_count(const Subgroup& a, int p) {
    if (p < 2) throw std::invalid_argument("p must be a prime >= 2");
    FiniteGroup g = a.parent();
    int count = 0;
    for (int x : a.elements()) {
        if (g.power(x, p) == 0) ++count;
    }
    return count;
}

/// O_p(a): the largest normal p-subgroup. Fast path: the p-power-order
/// elements, when closed, form the unique Sylow p-subgroup. Otherwise all
/// Sylow p-subgroups are enumerated and intersected.
inline Subgroup o_p_subgroup(const Subgroup& a, int p) {
    if (p < 2) throw std::invalid_argument("p must be a prime >= 2");
    FiniteGroup g = a.parent();
    auto is_p_power = [&](int ord) {
        while (ord % p == 0) ord /= p;
        return ord == 1;
    };
    std::vector<int> torsion;
    for (int x : a.elements()) {
        if (is_p_power(g.element_order(x))) torsion.push_back(x);
    }
    bool closed = true;
    std::set<int> tset(torsion.begin(), torsion.end());
    for (int x : torsion) {
        for (int y : torsion) {
            if (!tset.count(g.mult(x, y))) {
                closed = false;
                break;
            }
        }
        if (!closed) break;
    }
    if (closed) return Subgroup::closure(g, torsion);

    // general case: intersect all Sylow p-subgroups of a
    int p_part = 1;
    int rest = a.size();
    while (rest % p == 0) {
        rest /= p;
        p_part *= p;
    }
    std::set<Subgroup> sylows;
    std::set<Subgroup> seen;
    std::vector<Subgroup> work{Subgroup::closure(g, {})};
    seen.insert(work.front());
    while (!work.empty()) {
        Subgroup s = std::move(work.back());
        work.pop_back();
        if (s.size() == p_part) {
            sylows.insert(s);
            continue;
        }
        for (int x : torsion) {
            if (s.contains(x)) continue;
            std::vector<int> gens = s.elements();
            gens.push_back(x);
            auto t = Subgroup::closure_capped(g, gens, p_part);
            if (!t || p_part % t->size() != 0) continue;
            bool in_a = true;
            for (int y : t->elements()) {
                if (!a.contains(y)) in_a = false;
            }
            if (!in_a) continue;
            if (seen.insert(*t).second) work.push_back(std::move(*t));
        }
    }
    if (sylows.empty()) return Subgroup::closure(g, {});
    std::vector<int> common;
    for (int x : sylows.begin()->elements()) {
        bool everywhere = true;
        for (const Subgroup& s : sylows) {
            if (!s.contains(x)) everywhere = false;
        }
        if (everywhere) common.push_back(x);
    }
    return Subgroup::closure(g, common);
}

/// |Ebar_p(a)|: size of the image of x -> x^(p^(e-1)) on O_p(a), where p^e
/// is the exponent of O_p(a).
inline int ebar_p_count(const Subgroup& a, int p) {
    if (p < 2) throw std::invalid_argument("p must be a prime >= 2");
    if (a.size() % p != 0) {
        throw std::invalid_argument("p = " + std::to_string(p) +
                                    " does not divide the subgroup order " +
                                    std::to_string(a.size()));
    }
    FiniteGroup g = a.parent();
    Subgroup op = o_p_subgroup(a, p);
    long long exponent = 1;
    for (int x : op.elements()) {
        exponent = std::max<long long>(exponent, g.element_order(x));
    }
    long long power = exponent / p;  // p^(e-1)
    std::set<int> image;
    for (int x : op.elements()) image.insert(g.power(x, power));
    return static_cast<int>(image.size());
}

/// Abelian isomorphism signature: invariant factors d_1 | d_2 | ...,
/// recovered from element-order statistics.
inline std::vector<long long> abelian_invariant_factors(const Subgroup& a) {
    if (!a.is_abelian()) throw std::invalid_argument("subgroup is not abelian");
    FiniteGroup g = a.parent();
    std::map<int, std::vector<long long>> primary;
    int rest = a.size();
    for (int p = 2; rest > 1; ++p) {
        if (rest % p != 0) continue;
        while (rest % p == 0) rest /= p;
        // s_k = log_p #{x in a : x^(p^k) = 1}; conjugate partition increments
        std::vector<int> s;
        long long pk = 1;
        while (true) {
            int count = 0;
            for (int x : a.elements()) {
                if (g.power(x, pk) == 0) ++count;
            }
            int logp = 0;
            while (count > 1) {
                count /= p;
                ++logp;
            }
            s.push_back(logp);
            if (s.size() > 1 && s.back() == s[s.size() - 2]) break;
            pk *= p;
        }
        std::vector<int> conj;  // conj[k] = #parts >= k+1
        for (std::size_t k = 1; k < s.size(); ++k) {
            if (s[k] > s[k - 1]) conj.push_back(s[k] - s[k - 1]);
            else conj.push_back(0);
        }
        // partition parts lambda_i = #{k : conj[k] >= i}
        int max_parts = conj.empty() ? 0 : *std::max_element(conj.begin(), conj.end());
        for (int i = 1; i <= max_parts; ++i) {
            int lambda = 0;
            for (std::size_t k = 0; k < conj.size(); ++k) {
                if (conj[k] >= i) lambda = static_cast<int>(k) + 1;
            }
            long long pp = 1;
            for (int t = 0; t < lambda; ++t) pp *= p;
            primary[p].push_back(pp);
        }
    }
    return detail::invariant_factors_from_primary(std::move(primary));
}

/// Trivially intersecting subgroups of order d = sqrt(|G|).
struct SubgroupFamily {
    FiniteGroup group;
    std::vector<Subgroup> members;
};

/// Validates family shape: member order d, pairwise trivial intersection,
/// and (optionally) abelian members.
inline void validate_family(const FiniteGroup& g, const std::vector<Subgroup>& members,
                            bool require_abelian) {
    long long n = g.order();
    long long d = 1;
    while (d * d < n) ++d;
    if (d * d != n) {
        throw std::invalid_argument("group order " + std::to_string(n) +
                                    " is not a perfect square");
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i].size() != d) {
            throw std::invalid_argument("family member " + std::to_string(i) + " has order " +
                                        std::to_string(members[i].size()) + ", expected " +
                                        std::to_string(d));
        }
        if (require_abelian && !members[i].is_abelian()) {
            throw std::invalid_argument("family member " + std::to_string(i) + " is not abelian");
        }
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            if (members[i].intersection_size(members[j]) != 1) {
                throw std::invalid_argument("family members " + std::to_string(i) + " and " +
                                            std::to_string(j) + " do not intersect trivially");
            }
        }
    }
}

/// All abelian subgroups of order d, by breadth-first closure extension:
/// a subgroup grows only by elements that commute with it and have order
/// dividing d, and only while its order divides d.
inline std::vector<Subgroup> enumerate_abelian_subgroups_of_order(const FiniteGroup& g, int d) {
    std::vector<int> candidates;
    for (int x = 1; x < g.order(); ++x) {
        if (d % g.element_order(x) == 0) candidates.push_back(x);
    }
    std::set<std::vector<int>> seen;
    std::vector<Subgroup> work{Subgroup::closure(g, {})};
    seen.insert(work.front().elements());
    std::vector<Subgroup> found;
    while (!work.empty()) {
        Subgroup s = std::move(work.back());
        work.pop_back();
        if (s.size() == d) {
            found.push_back(std::move(s));
            continue;
        }
        for (int x : candidates) {
            if (s.contains(x)) continue;
            bool commutes_all = true;
            for (int y : s.elements()) {
                if (g.mult(x, y) != g.mult(y, x)) {
                    commutes_all = false;
                    break;
                }
            }
            if (!commutes_all) continue;
            std::vector<int> gens = s.elements();
            gens.push_back(x);
            auto t = Subgroup::closure_capped(g, gens, d);
            if (!t || d % t->size() != 0) continue;
            // canonical-chain prune: every target is reachable by always
            // adjoining its smallest element outside the current subgroup,
            // so extensions where x is not that element are redundant
            int min_new = -1;
            for (int v : t->elements()) {
                if (!s.contains(v)) {
                    min_new = v;
                    break;
                }
            }
            if (min_new != x) continue;
            if (seen.insert(t->elements()).second) work.push_back(std::move(*t));
        }
    }
    std::sort(found.begin(), found.end());
    return found;
}

enum class SearchMode { Exhaustive, Heuristic };

struct FamilySearchTrace {
    std::size_t subgroups_enumerated = 0;
    std::size_t clique_nodes = 0;
    bool exhaustive = true;
};

struct FamilySearchResult {
    SubgroupFamily family;
    FamilySearchTrace trace;
};

namespace detail {

// Branch-and-bound maximum clique with greedy-coloring upper bounds.
class CliqueSearch {
public:
    CliqueSearch(std::size_t m, const std::vector<std::vector<std::uint64_t>>& adj)
        : m_(m), words_((m + 63) / 64), adj_(adj) {}

    std::vector<int> run(std::size_t& nodes) {
        // greedy first-fit clique seeds the bound
        for (std::size_t v = 0; v < m_; ++v) {
            bool compatible = true;
            for (int u : best_) {
                if (!(adj_[u][v / 64] >> (v % 64) & 1ULL)) {
                    compatible = false;
                    break;
                }
            }
            if (compatible) best_.push_back(static_cast<int>(v));
        }
        std::vector<std::uint64_t> all(words_, 0);
        for (std::size_t v = 0; v < m_; ++v) all[v / 64] |= 1ULL << (v % 64);
        std::vector<int> r;
        expand(r, all);
        nodes = nodes_;
        return best_;
    }

private:
    void expand(std::vector<int>& r, const std::vector<std::uint64_t>& p) {
        ++nodes_;
        std::vector<int> verts;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = p[w];
            while (bits) {
                int b = std::countr_zero(bits);
                verts.push_back(static_cast<int>(w * 64 + b));
                bits &= bits - 1;
            }
        }
        if (verts.empty()) {
            if (r.size() > best_.size()) best_ = r;
            return;
        }
        // greedy coloring in index order; color[v] is a clique-size bound
        std::vector<int> color(verts.size());
        std::vector<std::vector<std::uint64_t>> class_masks;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            int v = verts[i];
            std::size_t c = 0;
            while (c < class_masks.size() && intersects(class_masks[c], adj_[v])) ++c;
            if (c == class_masks.size()) class_masks.emplace_back(words_, 0);
            class_masks[c][v / 64] |= 1ULL << (v % 64);
            color[i] = static_cast<int>(c) + 1;
        }
        // process highest color first
        std::vector<std::size_t> order(verts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return color[a] < color[b]; });
        std::vector<std::uint64_t> remaining = p;
        for (std::size_t oi = order.size(); oi > 0;) {
            --oi;
            std::size_t i = order[oi];
            int v = verts[i];
            if (r.size() + color[i] <= best_.size()) return;
            std::vector<std::uint64_t> next(words_);
            for (std::size_t w = 0; w < words_; ++w) next[w] = remaining[w] & adj_[v][w];
            next[v / 64] &= ~(1ULL << (v % 64));
            r.push_back(v);
            expand(r, next);
            r.pop_back();
            remaining[v / 64] &= ~(1ULL << (v % 64));
        }
    }

    bool intersects(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
        for (std::size_t w = 0; w < words_; ++w) {
            if (a[w] & b[w]) return true;
        }
        return false;
    }

    std::size_t m_;
    std::size_t words_;
    const std::vector<std::vector<std::uint64_t>>& adj_;
    std::vector<int> best_;
    std::size_t nodes_ = 0;
};

}  // namespace detail

/// Maximum family of pairwise trivially intersecting abelian subgroups of
/// order d in a group of order d^2. Exhaustive mode proves maximality via
/// branch-and-bound clique search (|G| <= 1296); heuristic mode is
/// first-fit greedy and makes no maximality claim.
inline FamilySearchResult max_family_search(const FiniteGroup& g,
                                            SearchMode mode = SearchMode::Exhaustive,
                                            bool require_normal = false) {
    long long n = g.order();
    long long d = 1;
    while (d * d < n) ++d;
    if (d * d != n) {
        throw std::invalid_argument("group order " + std::to_string(n) +
                                    " is not a perfect square");
    }
    if (mode == SearchMode::Exhaustive && n > 1296) {
        throw std::invalid_argument("order " + std::to_string(n) +
                                    " exceeds the exhaustive limit 1296; rerun in heuristic mode");
    }
    std::vector<Subgroup> subs = enumerate_abelian_subgroups_of_order(g, static_cast<int>(d));
    if (require_normal) {
        std::vector<Subgroup> normal;
        for (Subgroup& s : subs) {
            if (s.is_normal()) normal.push_back(std::move(s));
        }
        subs = std::move(normal);
    }

    FamilySearchResult out;
    out.family.group = g;
    out.trace.subgroups_enumerated = subs.size();
    out.trace.exhaustive = (mode == SearchMode::Exhaustive);
    if (subs.empty()) return out;

    const std::size_t m = subs.size();
    const std::size_t words = (m + 63) / 64;
    std::vector<std::vector<std::uint64_t>> adj(m, std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (subs[i].intersection_size(subs[j]) == 1) {
                adj[i][j / 64] |= 1ULL << (j % 64);
                adj[j][i / 64] |= 1ULL << (i % 64);
            }
        }
    }

    std::vector<int> picked;
    if (mode == SearchMode::Exhaustive) {
        detail::CliqueSearch search(m, adj);
        picked = search.run(out.trace.clique_nodes);
    } else {
        for (std::size_t v = 0; v < m; ++v) {
            bool compatible = true;
            for (int u : picked) {
                if (!(adj[u][v / 64] >> (v % 64) & 1ULL)) {
                    compatible = false;
                    break;
                }
            }
            if (compatible) picked.push_back(static_cast<int>(v));
            ++out.trace.clique_nodes;
        }
    }
    std::sort(picked.begin(), picked.end());
    for (int v : picked) out.family.members.push_back(subs[v]);
    validate_family(g, out.family.members, /*require_abelian=*/true);
    return out;
}

/// Family-size bound for abelian G = H x H with H given as prime-power
/// cyclic factors: min over p of p^(nu_p) + 1, where nu_p counts factors
/// equal to the largest p-power factor.
inline long long abelian_bound(const std::vector<long long>& h_prime_power_factors) {
    if (h_prime_power_factors.empty()) throw std::invalid_argument("need at least one factor");
    std::map<int, std::pair<long long, int>> stats;  // p -> (mu_p, nu_p)
    for (long long f : h_prime_power_factors) {
        if (f < 2) throw std::invalid_argument("factor " + std::to_string(f) + " is < 2");
        int p = 2;
        while (f % p != 0) ++p;
        long long rest = f;
        while (rest % p == 0) rest /= p;
        if (rest != 1) {
            throw std::invalid_argument("factor " + std::to_string(f) +
                                        " is not a prime power; refine the decomposition");
        }
        auto& [mu, nu] = stats[p];
        if (f > mu) {
            mu = f;
            nu = 1;
        } else if (f == mu) {
            ++nu;
        }
    }
    long long best = -1;
    for (auto& [p, mn] : stats) {
        long long pnu = 1;
        for (int i = 0; i < mn.second; ++i) pnu *= p;
        if (best < 0 || pnu + 1 < best) best = pnu + 1;
    }
    return best;
}

// -------------------------------------------------------------------------
// Structural verification reports. Each check restates a proved fact about
// trivially intersecting families, so a FAIL means a construction bug (or
// a counterexample); none is expected to trigger on valid input.

inline std::vector<int> prime_divisors(long long n) {
    std::vector<int> out;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(static_cast<int>(p));
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(static_cast<int>(n));
    return out;
}

/// |family| <= min_{p,A} |E_p(A)|+1 and |family| <= N(d).
inline Report check_bounds(const FiniteGroup& g, const SubgroupFamily& family) {
    validate_family(g, family.members, /*require_abelian=*/true);
    long long d = 1;
    while (d * d < g.order()) ++d;
    Report r("bounds");
    r.fact("order", g.order());
    r.fact("d", d);
    r.fact("family_size", family.members.size());
    if (family.members.empty()) {
        r.check("empty family satisfies all bounds vacuously", true);
        return r;
    }
    long long min_ep = -1;
    for (int p : prime_divisors(d)) {
        for (std::size_t i = 0; i < family.members.size(); ++i) {
            int ep = e_p_count(family.members[i], p);
            r.fact("E_" + std::to_string(p) + "(A" + std::to_string(i) + ")", ep);
            if (min_ep < 0 || ep < min_ep) min_ep = ep;
        }
    }
    // N(d) = min_p d_p + 1
    long long nd = -1;
    {
        long long rest = d;
        for (int p : prime_divisors(d)) {
            long long pp = 1;
            while (rest % p == 0) {
                rest /= p;
                pp *= p;
            }
            if (nd < 0 || pp + 1 < nd) nd = pp + 1;
        }
    }
    r.fact("N(d)", nd);
    r.fact("min_EpA_plus_1", min_ep + 1);
    r.check("family size <= min |E_p(A)|+1",
            static_cast<long long>(family.members.size()) <= min_ep + 1);
    r.check("family size <= N(d)", static_cast<long long>(family.members.size()) <= nd);
    return r;
}

/// G = AB, and O_p(A)O_p(B) is a Sylow p-subgroup for each p | d.
inline Report check_decompose(const FiniteGroup& g, const Subgroup& a, const Subgroup& b) {
    Report r("decompose");
    if (a == b) throw std::invalid_argument("check_decompose needs two distinct subgroups");
    std::vector<char> hit(g.order(), 0);
    int count = 0;
    for (int x : a.elements()) {
        for (int y : b.elements()) {
            int v = g.mult(x, y);
            if (!hit[v]) {
                hit[v] = 1;
                ++count;
            }
        }
    }
    r.fact("product_set_size", count);
    r.check("product set AB covers G", count == g.order());

    long long d = 1;
    while (d * d < g.order()) ++d;
    for (int p : prime_divisors(d)) {
        long long dp = 1;
        long long rest = d;
        while (rest % p == 0) {
            rest /= p;
            dp *= p;
        }
        Subgroup oa = o_p_subgroup(a, p);
        Subgroup ob = o_p_subgroup(b, p);
        std::set<int> prod;
        for (int x : oa.elements()) {
            for (int y : ob.elements()) prod.insert(g.mult(x, y));
        }
        bool closed = true;
        for (int x : prod) {
            for (int y : prod) {
                if (!prod.count(g.mult(x, y))) closed = false;
            }
        }
        r.fact("P_" + std::to_string(p) + "_size", prod.size());
        r.check("O_" + std::to_string(p) + "(A)O_" + std::to_string(p) + "(B) is a subgroup",
                closed);
        r.check("O_" + std::to_string(p) + "(A)O_" + std::to_string(p) + "(B) has Sylow order " +
                    std::to_string(dp * dp),
                static_cast<long long>(prod.size()) == dp * dp);
    }
    return r;
}

/// The p-part reduction: A -> O_p(A) maps the family bijectively onto a
/// trivially intersecting family inside a group of order d_p^2.
inline Report check_reduce(const FiniteGroup& g, const SubgroupFamily& family, int p) {
    if (family.members.size() < 2) {
        throw std::invalid_argument("reduction check needs a family of size >= 2");
    }
    long long d = 1;
    while (d * d < g.order()) ++d;
    long long dp = 1;
    long long rest = d;
    while (rest % p == 0) {
        rest /= p;
        dp *= p;
    }
    Report r("reduce-p" + std::to_string(p));
    r.fact("d_p", dp);
    std::vector<Subgroup> reduced;
    for (const Subgroup& a : family.members) reduced.push_back(o_p_subgroup(a, p));
    std::vector<int> gens;
    for (const Subgroup& s : reduced) {
        for (int x : s.elements()) gens.push_back(x);
    }
    Subgroup gp = Subgroup::closure(g, gens);
    r.fact("G_p_order", gp.size());
    r.check("|G_p| = d_p^2", static_cast<long long>(gp.size()) == dp * dp);
    bool orders_ok = true;
    for (const Subgroup& s : reduced) {
        if (static_cast<long long>(s.size()) != dp) orders_ok = false;
    }
    r.check("every O_p(A) has order d_p", orders_ok);
    bool trivial = true;
    bool injective = true;
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        for (std::size_t j = i + 1; j < reduced.size(); ++j) {
            if (reduced[i].intersection_size(reduced[j]) != 1) trivial = false;
            if (reduced[i] == reduced[j]) injective = false;
        }
    }
    r.check("reduced members intersect trivially", trivial);
    r.check("A -> O_p(A) is injective on the family", injective);
    return r;
}

/// When a family of size d+1 exists, G must be elementary abelian.
inline Report check_elementary_abelian(const FiniteGroup& g, const SubgroupFamily& family) {
    long long d = 1;
    while (d * d < g.order()) ++d;
    Report r("elementary-abelian");
    r.fact("family_size", family.members.size());
    r.fact("d_plus_1", d + 1);
    if (static_cast<long long>(family.members.size()) != d + 1) {
        r.check("no complete family: elementary-abelian conclusion vacuous", true);
        return r;
    }
    bool abelian = g.is_abelian();
    r.check("group is abelian", abelian);
    auto primes = prime_divisors(g.order());
    bool single_prime = primes.size() == 1;
    r.check("group order is a prime power", single_prime);
    if (single_prime) {
        int p = primes.front();
        bool exponent_p = true;
        for (int x = 1; x < g.order(); ++x) {
            if (g.element_order(x) != p) exponent_p = false;
        }
        r.check("every non-identity element has order " + std::to_string(p), exponent_p);
    }
    return r;
}

/// Normal-family structure: pairwise direct products, isomorphic abelian
/// members, and the stronger bound |family| <= min_p |Ebar_p(A)| + 1.
inline Report check_normal_family(const FiniteGroup& g, const SubgroupFamily& family) {
    if (family.members.size() <= 2) {
        throw std::invalid_argument("normal-family check needs |family| > 2");
    }
    for (std::size_t i = 0; i < family.members.size(); ++i) {
        if (!family.members[i].is_normal()) {
            throw std::invalid_argument("family member " + std::to_string(i) +
                                        " is not normal in G");
        }
    }
    validate_family(g, family.members, /*require_abelian=*/false);
    Report r("normal-family");
    bool direct = true;
    for (std::size_t i = 0; i < family.members.size() && direct; ++i) {
        for (std::size_t j = i + 1; j < family.members.size(); ++j) {
            std::vector<char> hit(g.order(), 0);
            int count = 0;
            for (int x : family.members[i].elements()) {
                for (int y : family.members[j].elements()) {
                    int v = g.mult(x, y);
                    if (!hit[v]) {
                        hit[v] = 1;
                        ++count;
                    }
                }
            }
            if (count != g.order()) {
                direct = false;
                break;
            }
        }
    }
    r.check("G = A x B for all distinct members (normal, trivial intersection, AB = G)", direct);

    bool all_abelian = true;
    for (const Subgroup& s : family.members) {
        if (!s.is_abelian()) all_abelian = false;
    }
    r.check("all members are abelian", all_abelian);
    if (all_abelian) {
        std::vector<long long> signature = abelian_invariant_factors(family.members.front());
        r.fact("invariant_factors", detail::factor_list_string(signature));
        bool isomorphic = true;
        for (const Subgroup& s : family.members) {
            if (abelian_invariant_factors(s) != signature) isomorphic = false;
        }
        r.check("all members share one invariant-factor signature", isomorphic);
    }

    long long d = 1;
    while (d * d < g.order()) ++d;
    long long min_ebar = -1;
    for (int p : prime_divisors(d)) {
        for (std::size_t i = 0; i < family.members.size(); ++i) {
            int eb = ebar_p_count(family.members[i], p);
            r.fact("Ebar_" + std::to_string(p) + "(A" + std::to_string(i) + ")", eb);
            if (min_ebar < 0 || eb < min_ebar) min_ebar = eb;
        }
    }
    r.fact("min_Ebar_plus_1", min_ebar + 1);
    r.check("family size <= min |Ebar_p(A)| + 1",
            static_cast<long long>(family.members.size()) <= min_ebar + 1);
    return r;
}

}  // namespace mubforge
