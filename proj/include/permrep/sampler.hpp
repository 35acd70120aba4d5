// Exact uniform sampling of homomorphisms G -> Sym(N) for finite G, and of
// hom(Gamma, Sym(N)) for free products by independent factor samples.
//
// The orbit of the smallest unassigned point is drawn with probability
// (N'-1)_{d-1} s_G(d) chi_{N'-d} / chi_{N'}, then an index-d subgroup, a
// (d-1)-subset of the remaining points, and a bijection onto the nontrivial
// cosets. All discrete choices use exact integer arithmetic on chi-weights;
// floating point is never consulted.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "permrep/group.hpp"
#include "permrep/homcount.hpp"
#include "permrep/numeric.hpp"
#include "permrep/rng.hpp"

namespace permrep {

struct HomImage {
    unsigned n = 0;
    std::vector<FactorHom> images; // [factor][element][point]
};

namespace detail {

// Pool of unassigned points supporting O(1) uniform removal and an O(N)-total
// scan for the smallest member.
class PointPool {
public:
    explicit PointPool(unsigned n) : alive_(n, true), pool_(n), where_(n), cursor_(0) {
        for (unsigned p = 0; p < n; ++p) pool_[p] = where_[p] = p;
    }

    unsigned size() const { return static_cast<unsigned>(pool_.size()); }
    bool empty() const { return pool_.empty(); }

    unsigned smallest() {
        while (!alive_[cursor_]) ++cursor_;
        return cursor_;
    }

    unsigned uniform(Xoshiro256& rng) {
        return pool_[static_cast<unsigned>(rng.below(pool_.size()))];
    }

    void remove(unsigned p) {
        alive_[p] = false;
        const unsigned slot = where_[p];
        const unsigned last = pool_.back();
        pool_[slot] = last;
        where_[last] = slot;
        pool_.pop_back();
    }

private:
    std::vector<bool> alive_;
    std::vector<unsigned> pool_;
    std::vector<unsigned> where_;
    unsigned cursor_;
};

} // namespace detail

// Per-factor sampler state: chi table plus coset tables for every subgroup,
// in the canonical (sorted element set) order of the census.
class FactorSampler {
public:
    FactorSampler(const FiniteGroup& group, unsigned nmax) : table_(group, nmax) {
        for (const auto& h : table_.census().subgroups) {
            cosets_.push_back(detail::coset_table(group, h));
            index_.push_back(group.order() / static_cast<unsigned>(h.size()));
        }
    }

    const CountTable& table() const { return table_; }
    void extend(unsigned nmax) { table_.extend(nmax); }

    FactorHom sample(unsigned n, Xoshiro256& rng) const {
        if (n > table_.nmax())
            throw std::out_of_range("sampler: chi table too short, extend to N = " +
                                    std::to_string(n));
        const FiniteGroup& g = table_.group();
        FactorHom hom(g.order(), std::vector<unsigned>(n, ~0u));
        detail::PointPool pool(n);
        std::vector<unsigned> chosen;
        while (!pool.empty()) {
            const unsigned base = pool.smallest();
            pool.remove(base);
            const unsigned remaining = pool.size() + 1; // N' including base

            // orbit size d with weight s_G(d) (N'-1)_{d-1} chi_{N'-d}
            Int draw = uniform_int_below(rng, table_.chi(remaining));
            std::size_t subgroup_id = SIZE_MAX;
            unsigned d = 0;
            for (const auto& [dd, count] : table_.census().by_index) {
                if (dd > remaining) continue;
                const Int weight =
                    falling_factorial(Int(remaining) - 1, dd - 1) * table_.chi(remaining - dd);
                if (draw < Int(count) * weight) {
                    d = dd;
                    // uniform among the s_G(d) subgroups of index d, in census order
                    const auto which = static_cast<unsigned>(Int(draw / weight).convert_to<long long>());
                    unsigned seen = 0;
                    for (std::size_t i = 0; i < index_.size(); ++i) {
                        if (index_[i] != dd) continue;
                        if (seen == which) {
                            subgroup_id = i;
                            break;
                        }
                        ++seen;
                    }
                    break;
                }
                draw -= Int(count) * weight;
            }
            if (subgroup_id == SIZE_MAX)
                throw std::logic_error("sampler: orbit weights do not sum to chi");

            chosen.assign(d - 1, 0);
            for (unsigned slot = 0; slot + 1 < d; ++slot) {
                const unsigned p = pool.uniform(rng);
                pool.remove(p);
                chosen[slot] = p;
            }
            const auto& ct = cosets_[subgroup_id];
            auto point_of = [&](unsigned c) { return c == 0 ? base : chosen[c - 1]; };
            for (unsigned a = 0; a < g.order(); ++a)
                for (unsigned c = 0; c < d; ++c)
                    hom[a][point_of(c)] = point_of(ct.coset_of[g.mul(a, ct.representative[c])]);
        }
        return hom;
    }

private:
    CountTable table_;
    std::vector<detail::CosetTable> cosets_;
    std::vector<unsigned> index_;
};

class FreeProductSampler {
public:
    FreeProductSampler(FreeProduct fp, unsigned nmax) : fp_(std::move(fp)) {
        for (const auto& g : fp_.factors()) factors_.emplace_back(g, nmax);
    }

    const FreeProduct& free_product() const { return fp_; }
    const FactorSampler& factor(std::size_t i) const { return factors_.at(i); }
    void extend(unsigned nmax) {
        for (auto& f : factors_) f.extend(nmax);
    }

    // Deterministic in (seed, Gamma, N); factor i uses the sub-stream
    // hash(seed, i), so factors are independent.
    HomImage sample(unsigned n, std::uint64_t seed) const {
        HomImage out;
        out.n = n;
        out.images.reserve(factors_.size());
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            Xoshiro256 rng = Xoshiro256::stream(seed, i);
            out.images.push_back(factors_[i].sample(n, rng));
        }
        return out;
    }

private:
    FreeProduct fp_;
    std::vector<FactorSampler> factors_;
};

// Left action: evaluate(w, p) applies the last syllable first, so that
// phi(uv) = phi(u) . phi(v) as functions.
inline unsigned evaluate(const HomImage& phi, const NormalForm& w, unsigned point) {
    if (point >= phi.n) throw std::out_of_range("evaluate: point out of range");
    unsigned p = point;
    for (auto it = w.syllables().rbegin(); it != w.syllables().rend(); ++it)
        p = phi.images[it->factor][it->element][p];
    return p;
}

inline unsigned fix_count(const HomImage& phi, const NormalForm& w) {
    unsigned count = 0;
    for (unsigned p = 0; p < phi.n; ++p)
        if (evaluate(phi, w, p) == p) ++count;
    return count;
}

// Homomorphism property of a sampled factor map: image(g) o image(h) =
// image(gh); exhaustive for |G| <= 24, random pairs otherwise.
inline bool verify_factor_hom(const FiniteGroup& g, const FactorHom& hom, Xoshiro256* rng = nullptr) {
    const unsigned n = static_cast<unsigned>(hom[0].size());
    auto check_pair = [&](unsigned a, unsigned b) {
        const unsigned ab = g.mul(a, b);
        for (unsigned p = 0; p < n; ++p)
            if (hom[a][hom[b][p]] != hom[ab][p]) return false;
        return true;
    };
    if (g.order() <= 24 || rng == nullptr) {
        for (unsigned a = 0; a < g.order(); ++a)
            for (unsigned b = 0; b < g.order(); ++b)
                if (!check_pair(a, b)) return false;
        return true;
    }
    for (unsigned t = 0; t < 2000; ++t)
        if (!check_pair(static_cast<unsigned>(rng->below(g.order())),
                        static_cast<unsigned>(rng->below(g.order()))))
            return false;
    return true;
}

} // namespace permrep
