// Exact arbitrary-precision counting: subgroup census s_G(d), the sequence
// chi_n(G) = |hom(G, Sym(n))|, embedding-lift expectations, and exact
// expected fixed-point counts for torsion elements.
//
// chi satisfies chi_n = sum_{d | |G|} s_G(d) (n-1)_{d-1} chi_{n-d}, the
// orbit decomposition of the point 1, which is also what drives the sampler.
#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <vector>

#include "permrep/group.hpp"
#include "permrep/numeric.hpp"

namespace permrep {

struct SubgroupCensus {
    std::map<unsigned, unsigned> by_index;            // d -> s_G(d)
    std::vector<std::vector<unsigned>> subgroups;     // sorted element lists
};

namespace detail {

inline std::vector<unsigned> subgroup_closure(const FiniteGroup& g,
                                              std::vector<unsigned> seed) {
    std::set<unsigned> members(seed.begin(), seed.end());
    members.insert(0);
    std::vector<unsigned> queue(members.begin(), members.end());
    while (!queue.empty()) {
        const unsigned a = queue.back();
        queue.pop_back();
        for (const unsigned b : std::vector<unsigned>(members.begin(), members.end())) {
            for (const unsigned prod : {g.mul(a, b), g.mul(b, a)}) {
                if (members.insert(prod).second) queue.push_back(prod);
            }
        }
    }
    return {members.begin(), members.end()};
}

} // namespace detail

// Complete subgroup list by breadth-first closure over generating sets,
// deduplicated by sorted element set.
inline SubgroupCensus subgroup_census(const FiniteGroup& g) {
    std::set<std::vector<unsigned>> known;
    known.insert({0});
    std::vector<std::vector<unsigned>> frontier = {{0}};
    while (!frontier.empty()) {
        std::vector<std::vector<unsigned>> next;
        for (const auto& h : frontier) {
            std::set<unsigned> in_h(h.begin(), h.end());
            for (unsigned x = 1; x < g.order(); ++x) {
                if (in_h.count(x)) continue;
                auto extended = h;
                extended.push_back(x);
                auto closed = detail::subgroup_closure(g, std::move(extended));
                if (known.insert(closed).second) next.push_back(std::move(closed));
            }
        }
        frontier = std::move(next);
    }
    SubgroupCensus out;
    out.subgroups.assign(known.begin(), known.end());
    for (const auto& h : out.subgroups) {
        if (g.order() % h.size() != 0)
            throw std::logic_error("subgroup size does not divide group order");
        out.by_index[g.order() / static_cast<unsigned>(h.size())] += 1;
    }
    return out;
}

class CountTable {
public:
    CountTable(FiniteGroup group, unsigned nmax)
        : group_(std::move(group)), census_(subgroup_census(group_)) {
        extend(nmax);
    }

    const FiniteGroup& group() const { return group_; }
    const SubgroupCensus& census() const { return census_; }
    unsigned nmax() const { return static_cast<unsigned>(chi_.size()) - 1; }
    const std::vector<Int>& chi() const { return chi_; }

    const Int& chi(unsigned n) const {
        if (n >= chi_.size())
            throw std::out_of_range("chi table too short; extend to n = " + std::to_string(n));
        return chi_[n];
    }

    void extend(unsigned nmax) {
        if (chi_.empty()) chi_.push_back(1); // chi_0 = 1
        for (unsigned n = static_cast<unsigned>(chi_.size()); n <= nmax; ++n) {
            Int total = 0;
            for (const auto& [d, count] : census_.by_index) {
                if (d > n) continue;
                total += count * falling_factorial(Int(n) - 1, d - 1) * chi_[n - d];
            }
            chi_.push_back(std::move(total));
        }
    }

    // Coefficients of P_G(z) = sum_{d | |G|} s_G(d)/d z^d, as c_1..c_q.
    std::vector<Rat> poly_coefficients() const {
        std::vector<Rat> coeffs(group_.order(), Rat(0));
        for (const auto& [d, count] : census_.by_index) coeffs[d - 1] = Rat(count, d);
        return coeffs;
    }

private:
    FiniteGroup group_;
    SubgroupCensus census_;
    std::vector<Int> chi_;
};

inline CountTable chi_table(const FiniteGroup& g, unsigned nmax) {
    return CountTable(g, nmax);
}

// (N)_V . chi_{N-V}(G) / chi_N(G): expected embedding lifts of a V-vertex
// cover component.
inline Rat embed_lift_expectation(const CountTable& table, unsigned v, unsigned n) {
    if (v > n) throw std::domain_error("embed_lift_expectation: V > N");
    return Rat(falling_factorial(Int(n), v) * table.chi(n - v), table.chi(n));
}

namespace detail {

// Left-coset table of H in G: coset id of each element, plus representatives
// with the subgroup itself first.
struct CosetTable {
    std::vector<unsigned> coset_of;
    std::vector<unsigned> representative;
};

inline CosetTable coset_table(const FiniteGroup& g, const std::vector<unsigned>& subgroup) {
    CosetTable out;
    out.coset_of.assign(g.order(), ~0u);
    for (const unsigned h : subgroup) out.coset_of[h] = 0;
    out.representative.push_back(0);
    for (unsigned a = 0; a < g.order(); ++a) {
        if (out.coset_of[a] != ~0u) continue;
        const unsigned id = static_cast<unsigned>(out.representative.size());
        out.representative.push_back(a);
        for (const unsigned h : subgroup) out.coset_of[g.mul(a, h)] = id;
    }
    return out;
}

} // namespace detail

// A full homomorphism G -> Sym(N): image permutation of every group element.
using FactorHom = std::vector<std::vector<unsigned>>; // [element][point]

// Enumerate hom(G, Sym(N)) exactly once each, by assigning the orbit of the
// smallest free point: subgroup H of index d, a (d-1)-subset of the remaining
// points, and a bijection onto the nontrivial cosets of H.
inline void enumerate_homs(const FiniteGroup& g, const SubgroupCensus& census, unsigned n,
                           const std::function<void(const FactorHom&)>& callback) {
    FactorHom hom(g.order(), std::vector<unsigned>(n, ~0u));
    std::vector<unsigned> free_points(n);
    for (unsigned p = 0; p < n; ++p) free_points[p] = p;

    std::vector<detail::CosetTable> cosets;
    cosets.reserve(census.subgroups.size());
    for (const auto& h : census.subgroups) cosets.push_back(detail::coset_table(g, h));

    std::function<void(std::vector<unsigned>&)> assign = [&](std::vector<unsigned>& free) {
        if (free.empty()) {
            callback(hom);
            return;
        }
        const unsigned base = free[0];
        std::vector<unsigned> rest(free.begin() + 1, free.end());
        for (std::size_t hi = 0; hi < census.subgroups.size(); ++hi) {
            const unsigned d = g.order() / static_cast<unsigned>(census.subgroups[hi].size());
            if (d > free.size()) continue;
            const auto& ct = cosets[hi];
            // choose d-1 points among rest, in every order (bijection to cosets)
            std::vector<unsigned> chosen(d - 1);
            std::vector<bool> used(rest.size(), false);
            std::function<void(unsigned)> pick = [&](unsigned slot) {
                if (slot == d - 1) {
                    // install the coset action: orbit point of coset c is
                    // base for c = 0, chosen[c-1] otherwise
                    auto point_of = [&](unsigned c) { return c == 0 ? base : chosen[c - 1]; };
                    for (unsigned a = 0; a < g.order(); ++a)
                        for (unsigned c = 0; c < d; ++c)
                            hom[a][point_of(c)] =
                                point_of(ct.coset_of[g.mul(a, ct.representative[c])]);
                    std::vector<unsigned> remaining;
                    for (std::size_t i = 0; i < rest.size(); ++i)
                        if (!used[i]) remaining.push_back(rest[i]);
                    assign(remaining);
                    return;
                }
                for (std::size_t i = 0; i < rest.size(); ++i) {
                    if (used[i]) continue;
                    used[i] = true;
                    chosen[slot] = rest[i];
                    pick(slot + 1);
                    used[i] = false;
                }
            };
            pick(0);
        }
    };
    assign(free_points);
}

// Exact E[#fix(phi(gamma))] over uniform hom(G, Sym(N)) for a torsion gamma
// conjugating into factor element e of G, via the marked-orbit identity
//   E = sum_d C(N,d) (d-1)! W_d chi_{N-d}/chi_N,
//   W_d = sum_{[G:H]=d} #{x : x^-1 e x in H} / |H|.
namespace detail {

inline std::map<unsigned, Int> element_conjugation_weights(const FiniteGroup& g,
                                                           const SubgroupCensus& census,
                                                           unsigned element) {
    std::map<unsigned, Int> w; // d -> W_d
    for (const auto& subgroup : census.subgroups) {
        const unsigned d = g.order() / static_cast<unsigned>(subgroup.size());
        std::set<unsigned> members(subgroup.begin(), subgroup.end());
        unsigned count = 0;
        for (unsigned x = 0; x < g.order(); ++x)
            if (members.count(g.mul(g.mul(g.inverse(x), element), x))) ++count;
        w[d] += count / static_cast<unsigned>(subgroup.size());
    }
    return w;
}

inline Rat expected_fix_factor_element(const CountTable& table, unsigned element, unsigned n) {
    const auto w = element_conjugation_weights(table.group(), table.census(), element);
    Rat total = 0;
    for (const auto& [d, wd] : w) {
        if (d > n) continue;
        total += Rat(binomial(Int(n), d) * factorial(d - 1) * wd * table.chi(n - d),
                     table.chi(n));
    }
    return total;
}

void homcount_self_test(); // defined below

} // namespace detail

// Exact expected fixed points of phi_N(gamma) for torsion gamma. The
// closed formula is validated against the enumeration oracle once per
// process before first use.
inline Rat expected_fix_torsion(const FreeProduct& gamma_group, const NormalForm& gamma,
                                unsigned n);

// Enumeration oracle: exact E[#fix(phi_N(gamma))] by enumerating tuples of
// factor homomorphisms. Works for arbitrary gamma. Factors not appearing in
// gamma integrate out and are skipped.
inline Rat brute_expected_fix(const FreeProduct& fp, const NormalForm& gamma, unsigned n,
                              const Int& budget = Int(10000000)) {
    if (gamma.is_identity()) return Rat(n);
    std::set<std::uint32_t> relevant;
    for (const auto& s : gamma.syllables()) relevant.insert(s.factor);

    std::vector<std::uint32_t> factor_ids(relevant.begin(), relevant.end());
    std::vector<CountTable> tables;
    Int combinations = 1;
    for (const auto fid : factor_ids) {
        tables.emplace_back(fp.factor(fid), n);
        combinations *= tables.back().chi(n);
    }
    if (combinations > budget)
        throw std::domain_error("brute_expected_fix: enumeration size " +
                                combinations.str() + " exceeds budget " + budget.str());

    std::map<std::uint32_t, std::size_t> slot;
    for (std::size_t i = 0; i < factor_ids.size(); ++i) slot[factor_ids[i]] = i;

    std::vector<const FactorHom*> current(factor_ids.size(), nullptr);
    Int total_fix = 0;
    std::function<void(std::size_t)> loop = [&](std::size_t level) {
        if (level == factor_ids.size()) {
            for (unsigned p = 0; p < n; ++p) {
                unsigned q = p;
                // left action: last syllable applies first
                for (auto it = gamma.syllables().rbegin(); it != gamma.syllables().rend(); ++it)
                    q = (*current[slot[it->factor]])[it->element][q];
                if (q == p) ++total_fix;
            }
            return;
        }
        enumerate_homs(tables[level].group(), tables[level].census(), n,
                       [&](const FactorHom& hom) {
                           current[level] = &hom;
                           loop(level + 1);
                       });
    };
    loop(0);
    return Rat(total_fix, combinations);
}

// Exact E[#fix] of a factor element at several n in one pass over the chi
// recursion, keeping only a sliding window of |G|+1 values (the full table
// to n = 10^5 would occupy gigabytes).
inline std::map<unsigned, Rat> expected_fix_factor_element_multi(
    const FiniteGroup& g, const SubgroupCensus& census, unsigned element,
    std::vector<unsigned> targets) {
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    const auto w = detail::element_conjugation_weights(g, census, element);
    const unsigned m = g.order();
    std::vector<Int> window; // chi_{n-m} .. chi_n, window[i] = chi_{n-m+i}
    window.assign(m + 1, 0);
    window[m] = 1; // chi_0
    std::map<unsigned, Rat> out;
    std::size_t next_target = 0;
    for (unsigned n = 0; next_target < targets.size(); ++n) {
        if (n > 0) {
            Int total = 0;
            for (const auto& [d, count] : census.by_index) {
                if (d > n) continue;
                total += count * falling_factorial(Int(n) - 1, d - 1) * window[m - d + 1];
            }
            window.erase(window.begin());
            window.push_back(std::move(total));
        }
        if (n == targets[next_target]) {
            Rat total = 0;
            for (const auto& [d, wd] : w) {
                if (d > n) continue;
                total += Rat(binomial(Int(n), d) * factorial(d - 1) * wd * window[m - d],
                             window[m]);
            }
            out[n] = total;
            ++next_target;
        }
    }
    return out;
}

// Exact E[#fix] at several n for a torsion gamma of the free product.
inline std::map<unsigned, Rat> expected_fix_torsion_multi(const FreeProduct& fp,
                                                          const NormalForm& gamma,
                                                          const std::vector<unsigned>& targets) {
    static std::once_flag validated;
    std::call_once(validated, detail::homcount_self_test);
    const ElementClass cls = fp.classify(gamma);
    if (cls.kind != ElementKind::Torsion)
        throw std::domain_error("expected_fix_torsion: gamma has infinite order");
    std::map<unsigned, Rat> out;
    if (!cls.torsion_factor) {
        for (const unsigned n : targets) out[n] = Rat(n);
        return out;
    }
    auto [core, conj] = fp.cyclic_reduce(gamma);
    const Syllable s = core.syllables().at(0);
    const FiniteGroup& g = fp.factor(s.factor);
    return expected_fix_factor_element_multi(g, subgroup_census(g), s.element, targets);
}

inline Rat expected_fix_torsion(const FreeProduct& fp, const NormalForm& gamma, unsigned n) {
    static std::once_flag validated;
    std::call_once(validated, detail::homcount_self_test);
    const ElementClass cls = fp.classify(gamma);
    if (cls.kind != ElementKind::Torsion)
        throw std::domain_error("expected_fix_torsion: gamma has infinite order");
    if (!cls.torsion_factor) return Rat(n); // identity fixes everything
    auto [core, conj] = fp.cyclic_reduce(gamma);
    const Syllable s = core.syllables().at(0);
    CountTable table(fp.factor(s.factor), n);
    return detail::expected_fix_factor_element(table, s.element, n);
}

namespace detail {

// The exact expected-fix formula is a derivation, not a paper statement;
// cross-check it against the enumeration oracle on small cases before use.
inline void homcount_self_test() {
    const FreeProduct c2({FiniteGroup::cyclic(2)});
    const FreeProduct c2c3({FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)});
    struct Case {
        const FreeProduct& fp;
        NormalForm gamma;
        unsigned n;
    };
    const Case cases[] = {
        {c2, c2.syllable(0, 1), 3},
        {c2, c2.syllable(0, 1), 4},
        {c2c3, c2c3.syllable(1, 1), 4},
        {c2c3, c2c3.syllable(0, 1), 3},
    };
    for (const auto& c : cases) {
        const ElementClass cls = c.fp.classify(c.gamma);
        auto [core, conj] = c.fp.cyclic_reduce(c.gamma);
        const Syllable s = core.syllables().at(0);
        CountTable table(c.fp.factor(s.factor), c.n);
        const Rat formula = expected_fix_factor_element(table, s.element, c.n);
        const Rat oracle = brute_expected_fix(c.fp, c.gamma, c.n);
        if (formula != oracle)
            throw std::logic_error("homcount self-test failed: expected-fix formula " +
                                   formula.str() + " != enumeration " + oracle.str());
        (void)cls;
    }
}

} // namespace detail

} // namespace permrep
