// Schreier graph construction from a sampled homomorphism and a symmetric
// generating multiset, and the spectral gap ||A restricted to the
// complement of the all-ones vector||.
//
// A = sum over w in S of the permutation matrix of phi(w); a fixed point of
// w contributes 1 to the diagonal per occurrence in S, which keeps every row
// sum exactly |S|.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "permrep/group.hpp"
#include "permrep/rng.hpp"
#include "permrep/sampler.hpp"

namespace permrep {

struct SparseGraph {
    unsigned n = 0;
    unsigned degree = 0;                      // |S|
    std::vector<std::vector<unsigned>> arcs;  // arcs[g][j] = phi(w_g)(j)

    // y = A x
    void matvec(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(n, 0.0);
        for (const auto& a : arcs)
            for (unsigned j = 0; j < n; ++j) y[j] += x[a[j]];
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (const auto& arc : arcs)
            for (unsigned j = 0; j < n; ++j) a(arc[j], j) += 1.0;
        return a;
    }
};

// One edge {j, phi(w)(j)} per w in S per vertex j. S must be symmetric as a
// multiset (w and w^-1 with equal multiplicity).
inline SparseGraph build_schreier(const FreeProduct& fp, const HomImage& phi,
                                  const std::vector<NormalForm>& generators) {
    std::map<NormalForm, int> balance;
    for (const auto& w : generators) {
        balance[w] += 1;
        balance[fp.inverse(w)] -= 1;
    }
    for (const auto& [w, count] : balance)
        if (count != 0)
            throw std::domain_error("build_schreier: generating multiset is not symmetric at " +
                                    fp.format(w));
    SparseGraph g;
    g.n = phi.n;
    g.degree = static_cast<unsigned>(generators.size());
    g.arcs.reserve(generators.size());
    for (const auto& w : generators) {
        std::vector<unsigned> arc(phi.n);
        for (unsigned j = 0; j < phi.n; ++j) arc[j] = evaluate(phi, w, j);
        g.arcs.push_back(std::move(arc));
    }
    return g;
}

enum class SpectralMode { Auto, Dense, Iterative };

struct SpectralReport {
    double top_norm = 0;     // ||A|_{1 perp}||
    double lambda_max = 0;   // max eigenvalue on the complement of 1
    double lambda_min = 0;   // min eigenvalue
    std::string method;      // "dense" | "iterative"
    unsigned iterations = 0;
    double residual = 0;
    bool converged = true;
    std::vector<double> eigenvalues; // dense mode: full spectrum on 1-perp, ascending

    std::vector<std::pair<double, unsigned>> histogram(unsigned bins) const {
        std::vector<std::pair<double, unsigned>> out;
        if (eigenvalues.empty() || bins == 0) return out;
        const double lo = eigenvalues.front(), hi = eigenvalues.back();
        const double width = (hi - lo) / bins;
        out.assign(bins, {0.0, 0});
        for (unsigned b = 0; b < bins; ++b) out[b].first = lo + (b + 0.5) * width;
        for (const double v : eigenvalues) {
            auto b = width > 0 ? static_cast<unsigned>((v - lo) / width) : 0u;
            if (b >= bins) b = bins - 1;
            out[b].second += 1;
        }
        return out;
    }
};

namespace detail {

inline void project_out_ones(std::vector<double>& v) {
    double mean = 0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

inline double norm2(const std::vector<double>& v) {
    double acc = 0;
    for (const double x : v) acc += x * x;
    return std::sqrt(acc);
}

// Largest eigenvalue of (A + shift I) restricted to the complement of the
// all-ones vector, by power iteration with per-step deflation.
struct PowerResult {
    double eigenvalue = 0;
    unsigned iterations = 0;
    double residual = 0;
    bool converged = false;
};

inline PowerResult power_iteration(const SparseGraph& g, double shift, double tol,
                                   unsigned max_iter, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    std::vector<double> v(g.n), w(g.n);
    for (double& x : v) x = static_cast<double>(rng()) / 1.8446744073709552e19 - 0.5;
    project_out_ones(v);
    double scale = norm2(v);
    for (double& x : v) x /= scale;
    PowerResult out;
    double lambda = 0;
    for (unsigned it = 1; it <= max_iter; ++it) {
        g.matvec(v, w);
        for (unsigned j = 0; j < g.n; ++j) w[j] += shift * v[j];
        project_out_ones(w);
        lambda = 0;
        for (unsigned j = 0; j < g.n; ++j) lambda += v[j] * w[j];
        double res = 0;
        for (unsigned j = 0; j < g.n; ++j) {
            const double r = w[j] - lambda * v[j];
            res += r * r;
        }
        res = std::sqrt(res);
        out.iterations = it;
        out.residual = res;
        if (res <= tol) {
            out.converged = true;
            out.eigenvalue = lambda;
            return out;
        }
        scale = norm2(w);
        if (scale == 0) break; // operator annihilates the complement: eigenvalue 0
        for (unsigned j = 0; j < g.n; ++j) v[j] = w[j] / scale;
    }
    out.eigenvalue = lambda;
    return out;
}

} // namespace detail

inline constexpr unsigned kDenseLimit = 2048;

inline SpectralReport spectral_gap(const SparseGraph& g, SpectralMode mode = SpectralMode::Auto,
                                   double tol = 1e-6, unsigned max_iter = 10000) {
    if (mode == SpectralMode::Auto)
        mode = g.n <= kDenseLimit ? SpectralMode::Dense : SpectralMode::Iterative;
    SpectralReport out;
    if (mode == SpectralMode::Dense) {
        if (g.n > kDenseLimit)
            throw std::domain_error("dense mode refused for N > " + std::to_string(kDenseLimit));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.dense(),
                                                              Eigen::EigenvaluesOnly);
        std::vector<double> evals(solver.eigenvalues().data(),
                                  solver.eigenvalues().data() + g.n);
        std::sort(evals.begin(), evals.end());
        // drop one copy of the top eigenvalue |S| (the all-ones direction);
        // further copies, if any, genuinely live on the complement
        evals.pop_back();
        out.method = "dense";
        out.eigenvalues = std::move(evals);
        out.lambda_max = out.eigenvalues.empty() ? 0.0 : out.eigenvalues.back();
        out.lambda_min = out.eigenvalues.empty() ? 0.0 : out.eigenvalues.front();
        out.top_norm = std::max(std::abs(out.lambda_max), std::abs(out.lambda_min));
        return out;
    }
    out.method = "iterative";
    const double s = static_cast<double>(g.degree);
    const auto hi = detail::power_iteration(g, +s, tol, max_iter, 0x9e3779b97f4a7c15ULL);
    const auto lo = detail::power_iteration(g, -s, tol, max_iter, 0xb5297a4d6a85c21fULL);
    out.lambda_max = hi.eigenvalue - s;
    out.lambda_min = lo.eigenvalue + s;
    out.top_norm = std::max(std::abs(out.lambda_max), std::abs(out.lambda_min));
    out.iterations = hi.iterations + lo.iterations;
    out.residual = std::max(hi.residual, lo.residual);
    out.converged = hi.converged && lo.converged;
    return out;
}

// Fraction (relative to N) of eigenvalues on the complement of 1 within
// [center - eps, center + eps]. Dense mode only.
inline double atom_mass(const SparseGraph& g, double center, double eps = 1e-8) {
    if (g.n > kDenseLimit)
        throw std::domain_error("atom_mass: dense eigensolve refused for N > " +
                                std::to_string(kDenseLimit));
    const SpectralReport rep = spectral_gap(g, SpectralMode::Dense);
    std::size_t count = 0;
    for (const double v : rep.eigenvalues)
        if (v >= center - eps && v <= center + eps) ++count;
    return static_cast<double>(count) / g.n;
}

} // namespace permrep
