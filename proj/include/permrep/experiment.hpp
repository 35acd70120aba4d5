// Experiment configuration, dispatch, and persistence. Every experiment is
// described by a JSON config and produces a reproducible record: identical
// exact fields on re-run, statistically compatible sampled fields.
// JSON for records, CSV for bulk eigenvalue/series data; big integers are
// decimal strings.
#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "permrep/fe_series.hpp"
#include "permrep/group.hpp"
#include "permrep/homcount.hpp"
#include "permrep/sampler.hpp"
#include "permrep/spectra.hpp"
#include "permrep/trace_expansion.hpp"
#include "permrep/walks.hpp"

namespace permrep {

inline constexpr const char* kToolVersion = "0.2.0";

using Json = nlohmann::json;

struct GlobalOptions {
    std::uint64_t seed = 42;
    unsigned threads = 0; // 0 = hardware concurrency
    std::string out;
    unsigned precision = 60;

    unsigned resolved_threads() const {
        if (threads > 0) return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& pointer, const std::string& what)
        : std::runtime_error("config error at " + pointer + ": " + what) {}
};

namespace detail {

inline const Json& require_field(const Json& config, const std::string& key) {
    if (!config.contains(key)) throw ConfigError("/" + key, "missing required field");
    return config.at(key);
}

inline std::string require_string(const Json& config, const std::string& key) {
    const Json& v = require_field(config, key);
    if (!v.is_string()) throw ConfigError("/" + key, "expected a string");
    return v.get<std::string>();
}

inline std::uint64_t require_uint(const Json& config, const std::string& key) {
    const Json& v = require_field(config, key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ConfigError("/" + key, "expected a non-negative integer");
    const auto n = v.get<long long>();
    if (n < 0) throw ConfigError("/" + key, "expected a non-negative integer");
    return static_cast<std::uint64_t>(n);
}

inline std::uint64_t uint_or(const Json& config, const std::string& key, std::uint64_t dflt) {
    return config.contains(key) ? require_uint(config, key) : dflt;
}

inline std::string real_str(const Real& v, unsigned digits = 17) { return v.str(digits); }

// "a..b" inclusive range, comma list, or a bare count k meaning 0..k-1.
inline std::vector<std::uint64_t> parse_seed_list(const std::string& spec) {
    std::vector<std::uint64_t> out;
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const auto lo = std::stoull(spec.substr(0, dots));
        const auto hi = std::stoull(spec.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("bad seed range: " + spec);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    if (spec.find(',') != std::string::npos) {
        std::string token;
        std::istringstream in(spec);
        while (std::getline(in, token, ',')) out.push_back(std::stoull(token));
        return out;
    }
    const auto count = std::stoull(spec);
    for (std::uint64_t s = 0; s < count; ++s) out.push_back(s);
    return out;
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << contents;
}

} // namespace detail

// --- command runners ------------------------------------------------------

inline Json run_count(const std::string& group_spec, unsigned nmax) {
    const FreeProduct fp = parse_group_spec(group_spec);
    if (fp.factor_count() != 1)
        throw std::invalid_argument("count: expected a single finite group, got " + group_spec);
    const CountTable table(fp.factor(0), nmax);
    Json s = Json::object();
    for (const auto& [d, count] : table.census().by_index) s[std::to_string(d)] = count;
    Json chi = Json::array();
    for (unsigned n = 0; n <= nmax; ++n) chi.push_back(table.chi(n).str());
    return Json{{"group", group_spec}, {"s", s}, {"chi", chi}};
}

inline Json run_saddle(const std::string& group_spec, std::uint64_t n, unsigned s) {
    const FreeProduct fp = parse_group_spec(group_spec);
    if (fp.factor_count() != 1)
        throw std::invalid_argument("saddle: expected a single finite group");
    const CountTable table(fp.factor(0), 0);
    const PolyDescriptor poly(table);
    const Real rn = rn_solve(poly, n);
    const SaddleExpansion sx = lagrange_rho(poly, n, s);
    Json beta = Json::array(), gamma = Json::array();
    for (const auto& b : sx.beta) beta.push_back(b.str());
    for (const auto& g : sx.gamma) gamma.push_back(g.str());
    return Json{{"group", group_spec},
                {"n", n},
                {"s", s},
                {"r_n", detail::real_str(rn, 40)},
                {"rho_n", detail::real_str(sx.rho, 40)},
                {"abs_diff", detail::real_str(Real(abs(rn - sx.rho)), 17)},
                {"beta", beta},
                {"gamma", gamma}};
}

// Normalized expected-trace sequence for a torsion gamma on a geometric grid
// n = nmax, nmax/2, ..., fitted as a fractional expansion.
inline Json run_fit(const std::string& group_spec, const std::string& gamma_text, unsigned q,
                    unsigned s, std::uint64_t nmax) {
    const FreeProduct fp = parse_group_spec(group_spec);
    const NormalForm gamma = fp.parse_word(gamma_text);
    const ElementClass cls = fp.classify(gamma);
    if (cls.kind != ElementKind::Torsion)
        throw std::invalid_argument(
            "fit: gamma must be torsion (exact chi data); use `trace` for infinite order");
    std::vector<unsigned> grid;
    for (std::uint64_t n = nmax; n >= 8 && grid.size() < 24; n /= 2)
        grid.push_back(static_cast<unsigned>(n));
    std::reverse(grid.begin(), grid.end());
    if (grid.size() < s + 2)
        throw std::invalid_argument("fit: nmax too small for s+2 geometric sample points");

    const auto fixes = expected_fix_torsion_multi(fp, gamma, grid);
    std::vector<std::pair<std::uint64_t, Real>> points;
    const unsigned order = cls.torsion_order;
    Json samples = Json::array();
    for (const auto n : grid) {
        const Real norm = pow(Real(n), -Real(1) / Real(order));
        const Real v = norm * to_real(fixes.at(n));
        points.push_back({n, v});
        samples.push_back(Json{{"n", n}, {"value", detail::real_str(v)}});
    }
    const FitReport fit = fe_fit(points, q, s);
    Json coeffs = Json::array();
    for (const auto& c : fit.series.coeffs) coeffs.push_back(detail::real_str(c));
    const bool accepted = fit.stability < Real("0.001");
    return Json{{"group", group_spec}, {"gamma", gamma_text},   {"q", q},
                {"s", s},             {"coeffs", coeffs},       {"residual", detail::real_str(fit.residual)},
                {"stability", detail::real_str(fit.stability)}, {"accepted", accepted},
                {"samples", samples}};
}

inline Json run_sample(const std::string& group_spec, unsigned n, std::uint64_t seed) {
    const FreeProduct fp = parse_group_spec(group_spec);
    FreeProductSampler sampler(fp, n);
    const HomImage phi = sampler.sample(n, seed);
    Json gens = Json::object();
    bool relations_ok = true;
    Xoshiro256 check_rng(seed ^ 0xabcdefULL);
    for (std::size_t i = 0; i < fp.factor_count(); ++i) {
        relations_ok =
            relations_ok && verify_factor_hom(fp.factor(i), phi.images[i], &check_rng);
        for (unsigned e = 1; e < fp.factor(i).order(); ++e) {
            const std::string label =
                fp.label_of(Syllable{static_cast<std::uint32_t>(i), e});
            gens[label] = phi.images[i][e];
        }
    }
    return Json{{"group", group_spec},
                {"n", n},
                {"seed", seed},
                {"relations_verified", relations_ok},
                {"generators", gens}};
}

inline Json run_spectrum(const std::string& group_spec, const std::string& gens_text, unsigned n,
                         const std::vector<std::uint64_t>& seeds, bool dense,
                         const std::string& out_csv) {
    const FreeProduct fp = parse_group_spec(group_spec);
    std::vector<NormalForm> gens;
    {
        std::string token;
        std::istringstream in([&] {
            std::string s = gens_text;
            for (char& c : s)
                if (c == ',') c = ' ';
            return s;
        }());
        while (in >> token) gens.push_back(fp.parse_word(token));
    }
    FreeProductSampler sampler(fp, n);
    Json rows = Json::array();
    std::ostringstream csv;
    csv << "seed,N,topNorm,lambdaMax,lambdaMin,iterations\n";
    std::ostringstream eig_csv;
    eig_csv << "seed,eigenvalue\n";
    for (const auto seed : seeds) {
        const HomImage phi = sampler.sample(n, seed);
        const SparseGraph graph = build_schreier(fp, phi, gens);
        const SpectralReport rep =
            spectral_gap(graph, dense ? SpectralMode::Dense : SpectralMode::Auto);
        rows.push_back(Json{{"seed", seed},
                            {"N", n},
                            {"topNorm", rep.top_norm},
                            {"lambdaMax", rep.lambda_max},
                            {"lambdaMin", rep.lambda_min},
                            {"iterations", rep.iterations},
                            {"method", rep.method},
                            {"converged", rep.converged}});
        csv << seed << "," << n << "," << rep.top_norm << "," << rep.lambda_max << ","
            << rep.lambda_min << "," << rep.iterations << "\n";
        for (const double ev : rep.eigenvalues) eig_csv << seed << "," << ev << "\n";
    }
    if (!out_csv.empty()) {
        detail::write_text_file(out_csv, csv.str());
        if (dense) {
            const auto dot = out_csv.rfind('.');
            const std::string eig_path =
                (dot == std::string::npos ? out_csv : out_csv.substr(0, dot)) + ".eigs.csv";
            detail::write_text_file(eig_path, eig_csv.str());
        }
    }
    return Json{{"group", group_spec}, {"gens", gens_text}, {"n", n}, {"rows", rows}};
}

inline Json run_walk(const std::string& group_spec, const std::string& gens_spec, unsigned pmax,
                     std::size_t budget = 50000000) {
    const FreeProduct fp = parse_group_spec(group_spec);
    const WalkGenerator x = parse_walk_generator(fp, gens_spec);
    const unsigned max_len = x.max_word_length();

    // closed-form reference when the model is one of the known ones
    std::optional<LimitNorm> reference;
    const bool all_c2 = [&] {
        for (const auto& g : fp.factors())
            if (g.order() != 2) return false;
        return fp.factor_count() >= 3;
    }();
    const bool uniform_single = [&] {
        for (const auto& [w, weight] : x.support)
            if (w.length() != 1 || weight != Rat(1, x.support.size())) return false;
        return x.support.size() == fp.big_m() - fp.factor_count();
    }();
    if (uniform_single && all_c2)
        reference = limit_norm_constants("c2star(" + std::to_string(fp.factor_count()) + ")");
    else if (uniform_single && fp.factor_count() == 2 &&
             ((fp.factor(0).is_cyclic_of(2) && fp.factor(1).is_cyclic_of(3)) ||
              (fp.factor(0).is_cyclic_of(3) && fp.factor(1).is_cyclic_of(2))))
        reference = limit_norm_constants("c2c3");

    const Real lambda_norm = reference
                                 ? Real(reference->norm) / Real(static_cast<unsigned>(x.support.size()))
                                 : Real(0);

    WalkDistribution dist;
    dist.mass[NormalForm{}] = 1;
    Json per_p = Json::array();
    std::vector<Real> m_values;
    for (unsigned p = 1; p <= pmax; ++p) {
        if (dist.mass.size() * x.support.size() > budget)
            throw std::domain_error("walk: budget exceeded at p = " + std::to_string(p));
        std::map<NormalForm, Rat> next;
        for (const auto& [w, m] : dist.mass)
            for (const auto& [g, weight] : x.support) next[fp.mul(w, g)] += m * weight;
        dist.mass = std::move(next);
        dist.p = p;
        const ChannelMasses masses = classify_mass(fp, dist, max_len);
        Rat tau = 0;
        for (const auto& [w, m] : dist.mass) tau += m * m;
        const Real m_p = pow(to_real(tau), Real(1) / (2 * Real(p)));
        m_values.push_back(m_p);
        Json pow_masses = Json::object();
        for (const auto& [d, m] : masses.pow_d) pow_masses[std::to_string(d)] = m.str();
        Json row{{"p", p},
                 {"torsion", masses.torsion.str()},
                 {"identity", masses.identity.str()},
                 {"c2c2", masses.c2c2.str()},
                 {"generic", masses.generic.str()},
                 {"pow", pow_masses},
                 {"u_mu_infinite", masses.u_mu_infinite.str()},
                 {"u_mu_torsion_identity", Rat(-masses.identity).str()},
                 {"m_p", detail::real_str(m_p)}};
        if (reference) {
            const Real denom = pow(lambda_norm, static_cast<int>(p));
            const bool torsion_ok =
                to_real(masses.torsion) / denom <= pow(Real(p + 1), 2) * Real(fp.big_m());
            const bool c2c2_ok = to_real(masses.c2c2) / denom <=
                                 pow(Real(p + 1), 5) * Real(fp.big_m()) * Real(fp.big_m());
            Real max_pow = 0;
            for (const auto& [d, m] : masses.pow_d) max_pow = max(max_pow, Real(to_real(m) / denom));
            row["bounds_ok"] = torsion_ok && c2c2_ok && max_pow <= pow(Real(p + 1), 4);
            row["u_mu_infinite_root"] =
                detail::real_str(masses.u_mu_infinite == 0
                                     ? Real(0)
                                     : Real(pow(to_real(masses.u_mu_infinite),
                                                Real(1) / Real(p))));
        }
        per_p.push_back(std::move(row));
    }

    const NormEstimate est = norm_estimate(fp, x, pmax, budget);
    Json out{{"group", group_spec},
             {"gens", gens_spec},
             {"pmax", pmax},
             {"per_p", per_p},
             {"limit_estimate", detail::real_str(est.limit)},
             {"m_monotone", est.monotone}};
    if (reference) {
        out["lambda_norm_closed_form"] = detail::real_str(lambda_norm);
        out["limit_relative_error"] =
            detail::real_str(Real(abs(est.limit - lambda_norm) / lambda_norm));
    }
    return out;
}

inline Json run_trace(const std::string& group_spec, const std::string& gamma_text,
                      const std::vector<unsigned>& ns, unsigned seeds, std::uint64_t master_seed,
                      unsigned s, unsigned threads) {
    const FreeProduct fp = parse_group_spec(group_spec);
    const NormalForm gamma = fp.parse_word(gamma_text);
    unsigned nmax = 0;
    for (const unsigned n : ns) nmax = std::max(nmax, n);
    TraceCollector collector(fp, nmax, threads);
    const TraceSeries ts = collector.collect(gamma, ns, seeds, master_seed);
    Json samples = Json::array();
    for (const auto& sample : ts.samples) {
        Json row{{"n", sample.n},
                 {"kind", sample.kind == SampleKind::Exact ? "exact" : "montecarlo"},
                 {"value", detail::real_str(sample.value)}};
        if (sample.exact) row["exact"] = sample.exact->str();
        if (sample.kind == SampleKind::MonteCarlo)
            row["stderr"] = detail::real_str(sample.stderr_value);
        samples.push_back(std::move(row));
    }
    Json out{{"group", group_spec},
             {"gamma", gamma_text},
             {"seeds", seeds},
             {"master_seed", master_seed},
             {"samples", samples}};
    if (ts.samples.size() >= s + 2) {
        const Requirement1Report rep = verify_requirement1(fp, ts, s);
        Json u = Json::array();
        for (const auto& v : rep.u) u.push_back(detail::real_str(v));
        out["requirement1"] = Json{{"verdict", to_string(rep.verdict)},
                                   {"b0", detail::real_str(rep.b0)},
                                   {"b0_tolerance", detail::real_str(rep.b0_tolerance)},
                                   {"stability", detail::real_str(rep.fit.stability)},
                                   {"mu", rep.mu},
                                   {"h", rep.h},
                                   {"u", u},
                                   {"notes", rep.notes}};
    }
    return out;
}

// --- dispatch ---------------------------------------------------------------
// run_experiment covers every experiment kind except "reproduce-paper", which
// needs the acceptance suite; run_experiment_full in acceptance.hpp adds it.

inline Json run_experiment(const Json& config, const GlobalOptions& opts) {
    using namespace detail;
    if (!config.is_object()) throw ConfigError("", "config must be a JSON object");
    const std::string kind = require_string(config, "experiment");
    const auto t0 = std::chrono::steady_clock::now();
    Json results;
    if (kind == "count") {
        results = run_count(require_string(config, "group"),
                            static_cast<unsigned>(require_uint(config, "nmax")));
    } else if (kind == "fit") {
        results = run_fit(require_string(config, "group"), require_string(config, "gamma"),
                          static_cast<unsigned>(require_uint(config, "q")),
                          static_cast<unsigned>(require_uint(config, "s")),
                          require_uint(config, "nmax"));
    } else if (kind == "saddle") {
        results = run_saddle(require_string(config, "group"), require_uint(config, "n"),
                             static_cast<unsigned>(uint_or(config, "s", 3)));
    } else if (kind == "sample") {
        results = run_sample(require_string(config, "group"),
                             static_cast<unsigned>(require_uint(config, "n")),
                             uint_or(config, "seed", opts.seed));
    } else if (kind == "spectrum") {
        std::vector<std::uint64_t> seeds;
        if (config.contains("seeds") && config.at("seeds").is_string())
            seeds = parse_seed_list(config.at("seeds").get<std::string>());
        else if (config.contains("seeds"))
            for (const auto& s : config.at("seeds")) seeds.push_back(s.get<std::uint64_t>());
        else
            seeds = {opts.seed};
        results = run_spectrum(require_string(config, "group"), require_string(config, "gens"),
                               static_cast<unsigned>(require_uint(config, "n")), seeds,
                               config.value("dense", false), config.value("out", ""));
    } else if (kind == "walk") {
        results = run_walk(require_string(config, "group"), require_string(config, "gens"),
                           static_cast<unsigned>(require_uint(config, "pmax")));
    } else if (kind == "trace") {
        std::vector<unsigned> ns;
        for (const auto& n : require_field(config, "nlist"))
            ns.push_back(n.get<unsigned>());
        results = run_trace(require_string(config, "group"), require_string(config, "gamma"), ns,
                            static_cast<unsigned>(uint_or(config, "seeds", 100)),
                            uint_or(config, "seed", opts.seed),
                            static_cast<unsigned>(uint_or(config, "s", 3)),
                            opts.resolved_threads());
    } else {
        throw ConfigError("/experiment", "unknown experiment kind: " + kind);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Json{{"tool", "permrep"},
                {"version", kToolVersion},
                {"config", config},
                {"seed", config.value("seed", opts.seed)},
                {"timing_seconds", seconds},
                {"results", results}};
}

} // namespace permrep
