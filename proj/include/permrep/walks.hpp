// Exact convolution powers of symmetric random-walk generators on a free
// product, classification masses (torsion / C2*C2 / proper powers / generic),
// u_mu channel sums, closed-form limit-norm constants, and moment-method
// estimates of ||lambda(x)||.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "permrep/fe_series.hpp"
#include "permrep/group.hpp"
#include "permrep/numeric.hpp"

namespace permrep {

struct WalkGenerator {
    std::map<NormalForm, Rat> support;

    // max word length over the support (syllable length w.r.t. the natural
    // generating set of all factor elements)
    unsigned max_word_length() const {
        unsigned len = 0;
        for (const auto& [w, weight] : support)
            len = std::max(len, static_cast<unsigned>(w.length()));
        return len;
    }
};

inline WalkGenerator make_walk_generator(const FreeProduct& fp,
                                         const std::vector<std::pair<NormalForm, Rat>>& weights) {
    WalkGenerator out;
    Rat total = 0;
    for (const auto& [w, weight] : weights) {
        if (weight < 0) throw std::domain_error("walk generator: negative weight");
        out.support[w] += weight;
        total += weight;
    }
    if (total != 1) throw std::domain_error("walk generator: weights must sum to 1, got " +
                                            total.str());
    for (const auto& [w, weight] : out.support) {
        const NormalForm wi = fp.inverse(w);
        auto it = out.support.find(wi);
        if (it == out.support.end() || it->second != weight)
            throw std::domain_error("walk generator: not symmetric at " + fp.format(w));
    }
    return out;
}

// "w1:1/3,w2:1/3,..." with exact rational weights; bare words get uniform
// weight 1/k.
inline WalkGenerator parse_walk_generator(const FreeProduct& fp, const std::string& spec) {
    std::vector<std::pair<NormalForm, std::optional<Rat>>> entries;
    std::string token;
    std::istringstream in([&] {
        std::string s = spec;
        for (char& c : s)
            if (c == ',') c = ' ';
        return s;
    }());
    while (in >> token) {
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
            entries.push_back({fp.parse_word(token), std::nullopt});
        } else {
            entries.push_back(
                {fp.parse_word(token.substr(0, colon)), Rat(token.substr(colon + 1))});
        }
    }
    if (entries.empty()) throw std::invalid_argument("walk generator: empty spec");
    std::vector<std::pair<NormalForm, Rat>> weights;
    for (const auto& [w, weight] : entries)
        weights.push_back({w, weight ? *weight : Rat(1, entries.size())});
    return make_walk_generator(fp, weights);
}

struct WalkDistribution {
    unsigned p = 0;
    std::map<NormalForm, Rat> mass;

    Rat total() const {
        Rat acc = 0;
        for (const auto& [w, m] : mass) acc += m;
        return acc;
    }
};

// Exact distribution of X_1 ... X_p by repeated sparse convolution with
// normal-form reduction.
inline WalkDistribution convolve_power(const FreeProduct& fp, const WalkGenerator& x, unsigned p,
                                       std::size_t budget = 50000000) {
    WalkDistribution dist;
    dist.mass[NormalForm{}] = 1;
    for (unsigned step = 1; step <= p; ++step) {
        if (dist.mass.size() * x.support.size() > budget)
            throw std::domain_error(
                "convolve_power: projected support " +
                std::to_string(dist.mass.size() * x.support.size()) + " exceeds budget " +
                std::to_string(budget) + " at step " + std::to_string(step));
        std::map<NormalForm, Rat> next;
        for (const auto& [w, m] : dist.mass)
            for (const auto& [s, weight] : x.support) next[fp.mul(w, s)] += m * weight;
        dist.mass = std::move(next);
        dist.p = step;
    }
    return dist;
}

struct ChannelMasses {
    Rat torsion = 0;        // includes the identity
    Rat identity = 0;
    Rat c2c2 = 0;           // reversible non-powers
    std::map<unsigned, Rat> pow_d; // proper powers, by exponent d >= 2
    Rat generic = 0;        // d = 1, not reversible
    Rat u_mu_infinite = 0;  // sum over infinite-order gamma of (h - 1) mass
};

// Partition the mass of a distribution by element classification. When
// max_word_length is nonzero, asserts the support claim that pow_d mass
// vanishes for d > p * |x|.
inline ChannelMasses classify_mass(const FreeProduct& fp, const WalkDistribution& dist,
                                   unsigned max_word_length = 0) {
    ChannelMasses out;
    for (const auto& [w, m] : dist.mass) {
        const ElementClass cls = fp.classify(w);
        if (cls.kind == ElementKind::Torsion) {
            out.torsion += m;
            if (w.is_identity()) out.identity += m;
            continue;
        }
        out.u_mu_infinite += Rat(cls.h_count - 1) * m;
        if (cls.power >= 2) out.pow_d[cls.power] += m;
        else if (cls.reversible) out.c2c2 += m;
        else out.generic += m;
    }
    if (max_word_length > 0) {
        const unsigned limit = dist.p * max_word_length;
        for (const auto& [d, m] : out.pow_d)
            if (d > limit && m != 0)
                throw std::logic_error("classify_mass: pow_" + std::to_string(d) +
                                       " mass nonzero beyond p|x| = " + std::to_string(limit));
    }
    return out;
}

struct UmuChannels {
    Rat infinite;          // sum over infinite-order gamma of (h(gamma)-1) P(gamma)
    Rat torsion_identity;  // u_mu(1) P(1) = -P(identity)
    Rat torsion_other_mass; // mass on nonidentity torsion (u_mu values fitted elsewhere)
};

inline UmuChannels u_mu_power(const FreeProduct& fp, const WalkGenerator& x, unsigned p,
                              std::size_t budget = 50000000) {
    const WalkDistribution dist = convolve_power(fp, x, p, budget);
    const ChannelMasses masses = classify_mass(fp, dist, x.max_word_length());
    UmuChannels out;
    out.infinite = masses.u_mu_infinite;
    out.torsion_identity = -masses.identity;
    out.torsion_other_mass = masses.torsion - masses.identity;
    return out;
}

struct LimitNorm {
    double norm = 0;                      // || lambda(sum of the generators) ||
    std::vector<double> endpoints;        // support endpoints when known
    std::map<double, double> atoms;       // atom location -> mass
    std::string description;
};

// Closed-form constants: free(d) -> 2 sqrt(2d-1); c2star(d) -> 2 sqrt(d-1);
// c2c3 -> (1 + sqrt(13 + 8 sqrt 2))/2 with support endpoints
// (1 +- sqrt(13 +- 8 sqrt 2))/2 and atoms of mass 1/6 at -2 and 0.
inline LimitNorm limit_norm_constants(const std::string& model) {
    LimitNorm out;
    auto parse_arg = [&](const std::string& prefix) -> std::optional<unsigned> {
        if (model.rfind(prefix + "(", 0) != 0 || model.back() != ')') return std::nullopt;
        return static_cast<unsigned>(
            std::stoul(model.substr(prefix.size() + 1, model.size() - prefix.size() - 2)));
    };
    if (auto d = parse_arg("free")) {
        if (*d < 1) throw std::invalid_argument("free(d): d >= 1 required");
        out.norm = 2.0 * std::sqrt(2.0 * *d - 1.0);
        out.description = "free group F_" + std::to_string(*d) + ", S = generators and inverses";
        return out;
    }
    if (auto d = parse_arg("c2star")) {
        if (*d < 2) throw std::invalid_argument("c2star(d): d >= 2 required");
        out.norm = 2.0 * std::sqrt(*d - 1.0);
        out.description = "C2 * ... * C2 (" + std::to_string(*d) + " factors), S = involutions";
        return out;
    }
    if (model == "c2c3") {
        const double s2 = std::sqrt(2.0);
        out.norm = (1.0 + std::sqrt(13.0 + 8.0 * s2)) / 2.0;
        out.endpoints = {(1.0 - std::sqrt(13.0 + 8.0 * s2)) / 2.0,
                         (1.0 - std::sqrt(13.0 - 8.0 * s2)) / 2.0,
                         (1.0 + std::sqrt(13.0 - 8.0 * s2)) / 2.0,
                         (1.0 + std::sqrt(13.0 + 8.0 * s2)) / 2.0};
        out.atoms = {{-2.0, 1.0 / 6.0}, {0.0, 1.0 / 6.0}};
        out.description = "C2 * C3, S = {x, y, y2}";
        return out;
    }
    throw std::invalid_argument("unknown model: " + model +
                                " (expected free(d), c2star(d), c2c3)");
}

struct NormEstimate {
    std::vector<Real> m;   // m_p = tau(x^{2p})^{1/(2p)}, p = 1..pmax
    Real limit = 0;        // extrapolated via m_p ~ rho exp(-c ln(p)/p - c'/p)
    bool monotone = true;
    bool complete = true;  // false when the budget truncated the sequence
};

// tau(x^{2p}) as the self-inner-product sum_gamma P_p(gamma)^2; the walk
// symmetry halves the required convolution depth.
inline NormEstimate norm_estimate(const FreeProduct& fp, const WalkGenerator& x, unsigned pmax,
                                  std::size_t budget = 50000000) {
    NormEstimate out;
    WalkDistribution dist;
    dist.mass[NormalForm{}] = 1;
    for (unsigned p = 1; p <= pmax; ++p) {
        if (dist.mass.size() * x.support.size() > budget) {
            out.complete = false;
            break;
        }
        std::map<NormalForm, Rat> next;
        for (const auto& [w, m] : dist.mass)
            for (const auto& [s, weight] : x.support) next[fp.mul(w, s)] += m * weight;
        dist.mass = std::move(next);
        dist.p = p;
        Rat tau = 0;
        for (const auto& [w, m] : dist.mass) tau += m * m;
        out.m.push_back(pow(to_real(tau), Real(1) / (2 * Real(p))));
    }
    for (std::size_t i = 1; i < out.m.size(); ++i)
        if (out.m[i] + Real(1e-40) < out.m[i - 1]) out.monotone = false;

    const std::size_t points = std::min<std::size_t>(6, out.m.size());
    if (points >= 3) {
        std::vector<std::vector<Real>> a;
        std::vector<Real> y;
        for (std::size_t i = out.m.size() - points; i < out.m.size(); ++i) {
            const Real p = Real(static_cast<unsigned>(i + 1));
            a.push_back({Real(1), -log(p) / p, -Real(1) / p});
            y.push_back(log(out.m[i]));
        }
        const auto coef = detail::least_squares(std::move(a), std::move(y));
        out.limit = exp(coef[0]);
    } else if (!out.m.empty()) {
        out.limit = out.m.back();
    }
    return out;
}

struct HittingBoundRow {
    unsigned p = 0;
    Real torsion_ratio;   // mass(torsion) / ||lambda(x)||^p
    Real torsion_bound;   // (p+1)^2 M
    Real c2c2_ratio;      // mass(C2*C2 class) / ||lambda(x)||^p
    Real c2c2_bound;      // (p+1)^5 M^2
    Real max_pow_ratio;   // max_d mass(pow_d) / ||lambda(x)||^p
    Real pow_bound;       // (p+1)^4
    bool support_ok = true; // pow_d = 0 for d > p |x|
    bool within_bounds = true;
};

inline std::vector<HittingBoundRow> hitting_bound_report(const FreeProduct& fp,
                                                         const WalkGenerator& x, unsigned pmax,
                                                         const Real& lambda_norm,
                                                         std::size_t budget = 50000000) {
    std::vector<HittingBoundRow> out;
    WalkDistribution dist;
    dist.mass[NormalForm{}] = 1;
    const unsigned max_len = x.max_word_length();
    for (unsigned p = 1; p <= pmax; ++p) {
        if (dist.mass.size() * x.support.size() > budget) break;
        std::map<NormalForm, Rat> next;
        for (const auto& [w, m] : dist.mass)
            for (const auto& [s, weight] : x.support) next[fp.mul(w, s)] += m * weight;
        dist.mass = std::move(next);
        dist.p = p;
        ChannelMasses masses;
        HittingBoundRow row;
        row.p = p;
        try {
            masses = classify_mass(fp, dist, max_len);
        } catch (const std::logic_error&) {
            row.support_ok = false;
            masses = classify_mass(fp, dist, 0);
        }
        const Real denom = pow(lambda_norm, static_cast<int>(p));
        const Real m_big = Real(fp.big_m());
        row.torsion_ratio = to_real(masses.torsion) / denom;
        row.torsion_bound = pow(Real(p + 1), 2) * m_big;
        row.c2c2_ratio = to_real(masses.c2c2) / denom;
        row.c2c2_bound = pow(Real(p + 1), 5) * m_big * m_big;
        row.max_pow_ratio = 0;
        for (const auto& [d, m] : masses.pow_d)
            row.max_pow_ratio = max(row.max_pow_ratio, Real(to_real(m) / denom));
        row.pow_bound = pow(Real(p + 1), 4);
        row.within_bounds = row.torsion_ratio <= row.torsion_bound &&
                            row.c2c2_ratio <= row.c2c2_bound &&
                            row.max_pow_ratio <= row.pow_bound;
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace permrep
