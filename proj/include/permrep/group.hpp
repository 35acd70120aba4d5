// Finite groups given by multiplication tables, free products, normal-form
// arithmetic, and the torsion / proper-power / reversible classification.
//
// Elements of a free product G_1 * ... * G_m are alternating syllable words
// (factor, element) with element != identity; the empty word is the group
// identity. All operations return fully reduced words.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "permrep/numeric.hpp"

namespace permrep {

class FiniteGroup {
public:
    FiniteGroup(std::string name, std::vector<std::vector<unsigned>> table,
                std::vector<std::string> element_names)
        : name_(std::move(name)), table_(std::move(table)), names_(std::move(element_names)) {
        validate();
    }

    const std::string& name() const { return name_; }
    unsigned order() const { return static_cast<unsigned>(table_.size()); }
    unsigned mul(unsigned a, unsigned b) const { return table_[a][b]; }
    const std::vector<std::string>& element_names() const { return names_; }
    const std::string& element_name(unsigned g) const { return names_[g]; }

    unsigned inverse(unsigned g) const {
        for (unsigned h = 0; h < order(); ++h)
            if (table_[g][h] == 0) return h;
        throw std::logic_error("no inverse"); // unreachable after validate()
    }

    // Order of an element, by iterated multiplication (bounded by |G|).
    unsigned element_order(unsigned g) const {
        unsigned acc = g, ord = 1;
        while (acc != 0) {
            acc = table_[acc][g];
            ++ord;
        }
        return ord;
    }

    bool is_cyclic_of(unsigned k) const {
        if (order() != k) return false;
        for (unsigned g = 0; g < order(); ++g)
            if (element_order(g) == k) return true;
        return false;
    }

    static FiniteGroup trivial() {
        return FiniteGroup("C1", {{0}}, {"e"});
    }

    static FiniteGroup cyclic(unsigned k) {
        if (k == 0) throw std::invalid_argument("cyclic group order must be positive");
        std::vector<std::vector<unsigned>> table(k, std::vector<unsigned>(k));
        for (unsigned a = 0; a < k; ++a)
            for (unsigned b = 0; b < k; ++b) table[a][b] = (a + b) % k;
        std::vector<std::string> names(k);
        for (unsigned a = 0; a < k; ++a) {
            if (a == 0) names[a] = "e";
            else if (k == 2) names[a] = "x";
            else if (k == 3) names[a] = a == 1 ? "y" : "y2";
            else names[a] = a == 1 ? "g" : "g" + std::to_string(a);
        }
        return FiniteGroup("C" + std::to_string(k), std::move(table), std::move(names));
    }

    // S3 with elements ordered e, r, r2, s, sr, sr2 (r of order 3, s of order 2).
    static FiniteGroup symmetric3() {
        const std::array<std::array<unsigned, 3>, 6> perms = {{
            {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}}};
        auto compose = [&](unsigned a, unsigned b) { // (a.b)(p) = a(b(p))
            std::array<unsigned, 3> c{};
            for (unsigned p = 0; p < 3; ++p) c[p] = perms[a][perms[b][p]];
            for (unsigned g = 0; g < 6; ++g)
                if (perms[g] == c) return g;
            throw std::logic_error("S3 composition");
        };
        std::vector<std::vector<unsigned>> table(6, std::vector<unsigned>(6));
        for (unsigned a = 0; a < 6; ++a)
            for (unsigned b = 0; b < 6; ++b) table[a][b] = compose(a, b);
        return FiniteGroup("S3", std::move(table), {"e", "r", "r2", "s", "sr", "sr2"});
    }

    // Table file format: first line m, then m rows of m indices (g.h at row g,
    // column h); identity must be index 0.
    static FiniteGroup from_table_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open group table file: " + path);
        unsigned m = 0;
        if (!(in >> m) || m == 0) throw std::invalid_argument("bad group table header in " + path);
        std::vector<std::vector<unsigned>> table(m, std::vector<unsigned>(m));
        for (unsigned a = 0; a < m; ++a)
            for (unsigned b = 0; b < m; ++b)
                if (!(in >> table[a][b]) || table[a][b] >= m)
                    throw std::invalid_argument("bad group table entry in " + path);
        std::vector<std::string> names(m);
        for (unsigned a = 0; a < m; ++a) names[a] = a == 0 ? "e" : "g" + std::to_string(a);
        return FiniteGroup("table:" + path, std::move(table), std::move(names));
    }

private:
    void validate() const {
        const unsigned m = order();
        if (m == 0 || m > 512) throw std::invalid_argument("group order must be in [1, 512]");
        if (names_.size() != m) throw std::invalid_argument("element name list size mismatch");
        for (const auto& row : table_)
            if (row.size() != m) throw std::invalid_argument("group table is not square");
        for (unsigned g = 0; g < m; ++g)
            if (table_[0][g] != g || table_[g][0] != g)
                throw std::invalid_argument("identity law fails (identity must be index 0)");
        // Latin square: every row and column is a permutation.
        std::vector<bool> seen(m);
        for (unsigned a = 0; a < m; ++a) {
            std::fill(seen.begin(), seen.end(), false);
            for (unsigned b = 0; b < m; ++b) {
                if (seen[table_[a][b]]) throw std::invalid_argument("row is not a permutation");
                seen[table_[a][b]] = true;
            }
            std::fill(seen.begin(), seen.end(), false);
            for (unsigned b = 0; b < m; ++b) {
                if (seen[table_[b][a]]) throw std::invalid_argument("column is not a permutation");
                seen[table_[b][a]] = true;
            }
        }
        for (unsigned g = 0; g < m; ++g) {
            bool has_inverse = false;
            for (unsigned h = 0; h < m && !has_inverse; ++h)
                has_inverse = table_[g][h] == 0 && table_[h][g] == 0;
            if (!has_inverse) throw std::invalid_argument("element without two-sided inverse");
        }
        // Associativity: exhaustive for m <= 24, random triples otherwise.
        if (m <= 24) {
            for (unsigned a = 0; a < m; ++a)
                for (unsigned b = 0; b < m; ++b)
                    for (unsigned c = 0; c < m; ++c)
                        if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
                            throw std::invalid_argument("multiplication table is not associative");
        } else {
            Xoshiro256 rng(0x5eedu);
            for (unsigned t = 0; t < 100000; ++t) {
                const unsigned a = static_cast<unsigned>(rng.below(m));
                const unsigned b = static_cast<unsigned>(rng.below(m));
                const unsigned c = static_cast<unsigned>(rng.below(m));
                if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
                    throw std::invalid_argument("multiplication table is not associative");
            }
        }
    }

    std::string name_;
    std::vector<std::vector<unsigned>> table_;
    std::vector<std::string> names_;
};

struct Syllable {
    std::uint32_t factor;
    std::uint32_t element; // != 0
    friend bool operator==(const Syllable&, const Syllable&) = default;
    friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

// Reduced alternating-syllable word; the empty word is the identity.
class NormalForm {
public:
    NormalForm() = default;
    explicit NormalForm(std::vector<Syllable> syllables) : syllables_(std::move(syllables)) {}

    const std::vector<Syllable>& syllables() const { return syllables_; }
    std::size_t length() const { return syllables_.size(); }
    bool is_identity() const { return syllables_.empty(); }

    friend bool operator==(const NormalForm&, const NormalForm&) = default;
    friend auto operator<=>(const NormalForm&, const NormalForm&) = default;

    std::size_t hash() const {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (const auto& s : syllables_) {
            h ^= (static_cast<std::size_t>(s.factor) << 32 | s.element) + 0x9e3779b97f4a7c15ULL +
                 (h << 6) + (h >> 2);
        }
        return h;
    }

private:
    std::vector<Syllable> syllables_;
};

struct NormalFormHash {
    std::size_t operator()(const NormalForm& w) const { return w.hash(); }
};

enum class ElementKind { Torsion, Infinite };

// Classification of a free-product element. Torsion elements carry the factor
// they conjugate into and their order (identity: order 1, no factor).
// Infinite-order elements carry the root decomposition w = root^d and
// h = omega(d) + sigma(d) when the root is inverted by an involution,
// h = omega(d) otherwise.
struct ElementClass {
    ElementKind kind;
    std::optional<std::uint32_t> torsion_factor;
    unsigned torsion_order = 1;
    unsigned power = 1; // d
    NormalForm root;
    bool reversible = false;
    std::optional<NormalForm> witness;
    unsigned h_count = 1;
};

class FreeProduct {
public:
    explicit FreeProduct(std::vector<FiniteGroup> factors) : factors_(std::move(factors)) {
        if (factors_.empty()) throw std::invalid_argument("free product needs at least one factor");
        mu_ = 1;
        big_m_ = 0;
        for (const auto& g : factors_) {
            mu_ = std::lcm(mu_, g.order());
            big_m_ += g.order();
        }
        build_generator_names();
    }

    const std::vector<FiniteGroup>& factors() const { return factors_; }
    const FiniteGroup& factor(std::uint32_t i) const { return factors_.at(i); }
    std::size_t factor_count() const { return factors_.size(); }
    unsigned mu() const { return mu_; }
    unsigned big_m() const { return big_m_; }

    // The exceptional amenable case, flagged in reports only.
    bool is_c2_star_c2() const {
        return factors_.size() == 2 && factors_[0].order() == 2 && factors_[1].order() == 2;
    }

    std::string name() const {
        std::string out;
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (i) out += "*";
            out += factors_[i].name();
        }
        return out;
    }

    NormalForm syllable(std::uint32_t factor, std::uint32_t element) const {
        if (factor >= factors_.size() || element == 0 || element >= factors_[factor].order())
            throw std::invalid_argument("bad syllable");
        return NormalForm({Syllable{factor, element}});
    }

    NormalForm mul(const NormalForm& u, const NormalForm& v) const {
        std::vector<Syllable> out = u.syllables();
        for (const auto& s : v.syllables()) append_reduced(out, s);
        return NormalForm(std::move(out));
    }

    NormalForm inverse(const NormalForm& w) const {
        std::vector<Syllable> out;
        out.reserve(w.length());
        for (auto it = w.syllables().rbegin(); it != w.syllables().rend(); ++it)
            out.push_back(Syllable{it->factor, factors_[it->factor].inverse(it->element)});
        return NormalForm(std::move(out));
    }

    // g^-1 w g
    NormalForm conjugate(const NormalForm& w, const NormalForm& g) const {
        return mul(mul(inverse(g), w), g);
    }

    NormalForm power(const NormalForm& w, unsigned k) const {
        NormalForm out;
        for (unsigned i = 0; i < k; ++i) out = mul(out, w);
        return out;
    }

    // Reduce an arbitrary letter sequence to normal form.
    NormalForm normalize(const std::vector<Syllable>& letters) const {
        std::vector<Syllable> out;
        for (const auto& s : letters) {
            if (s.factor >= factors_.size() || s.element >= factors_[s.factor].order())
                throw std::invalid_argument("letter outside factor range");
            if (s.element == 0) continue;
            append_reduced(out, s);
        }
        return NormalForm(std::move(out));
    }

    // Whitespace- or comma-separated generator labels.
    NormalForm parse_word(const std::string& text) const {
        std::vector<Syllable> letters;
        std::string token;
        std::istringstream in(normalize_separators(text));
        while (in >> token) letters.push_back(parse_letter(token));
        return normalize(letters);
    }

    Syllable parse_letter(const std::string& label) const {
        auto it = generator_names_.find(label);
        if (it != generator_names_.end()) return it->second;
        const auto dot = label.find('.');
        if (dot != std::string::npos) {
            const std::string head = label.substr(0, dot);
            const std::string tail = label.substr(dot + 1);
            try {
                const unsigned f = static_cast<unsigned>(std::stoul(head));
                if (f < factors_.size()) {
                    const auto& names = factors_[f].element_names();
                    for (std::uint32_t e = 1; e < names.size(); ++e)
                        if (names[e] == tail) return Syllable{f, e};
                }
            } catch (const std::exception&) {
            }
        }
        throw std::invalid_argument("unknown generator label: " + label);
    }

    std::string format(const NormalForm& w) const {
        if (w.is_identity()) return "e";
        std::string out;
        for (const auto& s : w.syllables()) {
            if (!out.empty()) out += " ";
            out += label_of(s);
        }
        return out;
    }

    std::string label_of(const Syllable& s) const {
        for (const auto& [name, syl] : generator_names_)
            if (syl == s) return name;
        return std::to_string(s.factor) + "." + factors_[s.factor].element_name(s.element);
    }

    const std::map<std::string, Syllable>& generator_names() const { return generator_names_; }

    // --- cyclic reduction and classification ---------------------------------

    // core cyclically reduced, w = conj^-1 . core . conj.
    std::pair<NormalForm, NormalForm> cyclic_reduce(const NormalForm& w) const {
        NormalForm core = w;
        NormalForm conj;
        while (core.length() >= 2 &&
               core.syllables().front().factor == core.syllables().back().factor) {
            const Syllable last = core.syllables().back();
            std::vector<Syllable> head(core.syllables().begin(), core.syllables().end() - 1);
            // core = last^-1 . (last . head) . last
            core = mul(NormalForm({last}), NormalForm(std::move(head)));
            conj = mul(NormalForm({last}), conj);
        }
        return {core, conj};
    }

    // w = root^d with root not a proper power; requires infinite order.
    std::pair<NormalForm, unsigned> extract_root(const NormalForm& w) const {
        auto [core, conj] = cyclic_reduce(w);
        if (core.length() < 2)
            throw std::domain_error("extract_root: torsion input, use the Torsion branch");
        const auto& syl = core.syllables();
        const std::size_t len = syl.size();
        for (std::size_t period = 1; period <= len; ++period) {
            if (len % period != 0) continue;
            bool periodic = true;
            for (std::size_t i = period; i < len && periodic; ++i)
                periodic = syl[i] == syl[i % period];
            if (periodic) {
                NormalForm root0(std::vector<Syllable>(syl.begin(), syl.begin() + period));
                NormalForm root = mul(mul(inverse(conj), root0), conj);
                return {root, static_cast<unsigned>(len / period)};
            }
        }
        throw std::logic_error("extract_root: no period found"); // unreachable
    }

    // Whether some involution tau satisfies tau.delta.tau = delta^-1, for delta
    // of infinite order and not a proper power. Conjugating a cyclically
    // reduced non-power to its inverse happens along a unique syllable
    // rotation, and the conjugators form a single coset u<delta>, on which the
    // square (u delta^j)^2 = u^2 is constant; testing one representative is an
    // exact decision.
    std::pair<bool, std::optional<NormalForm>> is_reversible(const NormalForm& delta) const {
        auto [core, conj] = cyclic_reduce(delta);
        if (core.length() < 2)
            throw std::domain_error("is_reversible: torsion input");
        const auto& syl = core.syllables();
        const std::size_t len = syl.size();
        for (std::size_t period = 1; period < len; ++period) {
            if (len % period != 0) continue;
            bool periodic = true;
            for (std::size_t i = period; i < len && periodic; ++i)
                periodic = syl[i] == syl[i % period];
            if (periodic) throw std::domain_error("is_reversible: input is a proper power");
        }
        const NormalForm core_inv = inverse(core);
        for (std::size_t k = 0; k < len; ++k) {
            std::vector<Syllable> rot(syl.begin() + k, syl.end());
            rot.insert(rot.end(), syl.begin(), syl.begin() + k);
            if (NormalForm(rot) != core_inv) continue;
            // rotation by k is conjugation by the prefix p_k: p_k^-1 core p_k
            NormalForm prefix(std::vector<Syllable>(syl.begin(), syl.begin() + k));
            NormalForm u = inverse(prefix); // u core u^-1 = core^-1
            if (!mul(u, u).is_identity()) return {false, std::nullopt};
            NormalForm tau = mul(mul(inverse(conj), u), conj);
            return {true, tau};
        }
        return {false, std::nullopt};
    }

    ElementClass classify(const NormalForm& w) const {
        auto [core, conj] = cyclic_reduce(w);
        ElementClass out;
        if (core.length() == 0) {
            out.kind = ElementKind::Torsion;
            out.torsion_order = 1;
            return out;
        }
        if (core.length() == 1) {
            const Syllable s = core.syllables()[0];
            out.kind = ElementKind::Torsion;
            out.torsion_factor = s.factor;
            out.torsion_order = factors_[s.factor].element_order(s.element);
            return out;
        }
        out.kind = ElementKind::Infinite;
        auto [root, d] = extract_root(w);
        out.power = d;
        out.root = root;
        auto [rev, witness] = is_reversible(root);
        out.reversible = rev;
        out.witness = witness;
        out.h_count = divisor_count(d) + (rev ? divisor_sum(d) : 0);
        return out;
    }

private:
    void append_reduced(std::vector<Syllable>& out, const Syllable& s) const {
        if (!out.empty() && out.back().factor == s.factor) {
            const unsigned prod = factors_[s.factor].mul(out.back().element, s.element);
            if (prod == 0) out.pop_back();
            else out.back().element = prod;
        } else {
            out.push_back(s);
        }
    }

    static std::string normalize_separators(const std::string& text) {
        std::string out = text;
        for (char& c : out)
            if (c == ',') c = ' ';
        return out;
    }

    void build_generator_names() {
        const bool all_c2 =
            std::all_of(factors_.begin(), factors_.end(),
                        [](const FiniteGroup& g) { return g.order() == 2; });
        if (all_c2 && factors_.size() >= 2 && factors_.size() <= 26) {
            for (std::uint32_t i = 0; i < factors_.size(); ++i)
                generator_names_[std::string(1, static_cast<char>('a' + i))] = Syllable{i, 1};
            return;
        }
        bool used_x = false, used_y = false;
        for (std::uint32_t i = 0; i < factors_.size(); ++i) {
            if (!used_x && factors_[i].is_cyclic_of(2)) {
                generator_names_["x"] = Syllable{i, 1};
                used_x = true;
            } else if (!used_y && factors_[i].is_cyclic_of(3)) {
                generator_names_["y"] = Syllable{i, 1};
                generator_names_["y2"] = Syllable{i, 2};
                used_y = true;
            }
        }
        // Element names that are unambiguous across factors work as labels too.
        std::map<std::string, std::vector<Syllable>> candidates;
        for (std::uint32_t i = 0; i < factors_.size(); ++i) {
            const auto& names = factors_[i].element_names();
            for (std::uint32_t e = 1; e < names.size(); ++e)
                candidates[names[e]].push_back(Syllable{i, e});
        }
        for (const auto& [name, sylls] : candidates)
            if (sylls.size() == 1 && !generator_names_.count(name))
                generator_names_[name] = sylls[0];
    }

    std::vector<FiniteGroup> factors_;
    unsigned mu_ = 1;
    unsigned big_m_ = 0;
    std::map<std::string, Syllable> generator_names_;
};

// Group spec strings: "C2", "C3", "C4", "C6", "S3", "table:<path>", free
// products joined with '*', e.g. "C2*C3".
inline FiniteGroup parse_factor_spec(const std::string& spec) {
    if (spec == "S3") return FiniteGroup::symmetric3();
    if (spec == "C1" || spec == "1") return FiniteGroup::trivial();
    if (spec.size() >= 2 && spec[0] == 'C') {
        try {
            const unsigned k = static_cast<unsigned>(std::stoul(spec.substr(1)));
            return FiniteGroup::cyclic(k);
        } catch (const std::invalid_argument&) {
        }
    }
    if (spec.rfind("table:", 0) == 0) return FiniteGroup::from_table_file(spec.substr(6));
    throw std::invalid_argument("unknown group spec: " + spec);
}

inline FreeProduct parse_group_spec(const std::string& spec) {
    std::vector<FiniteGroup> factors;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto star = spec.find('*', start);
        const std::string part =
            spec.substr(start, star == std::string::npos ? std::string::npos : star - start);
        if (part.empty()) throw std::invalid_argument("empty factor in group spec: " + spec);
        factors.push_back(parse_factor_spec(part));
        if (star == std::string::npos) break;
        start = star + 1;
    }
    return FreeProduct(std::move(factors));
}

} // namespace permrep
