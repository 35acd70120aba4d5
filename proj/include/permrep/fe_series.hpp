// Fractional-expansion algebra FE_q: truncated series in u = n^{-1/q},
// closure operations (product, reciprocal, shift, sum), sequence fitting in
// extended precision, and the saddle-point computations for exp(P(z))
// (r_n by Newton, rho_n(s) by Lagrange inversion, leading-order check).
#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "permrep/homcount.hpp"
#include "permrep/numeric.hpp"
#include "permrep/series.hpp"

namespace permrep {

// P(z) = sum c_i z^i with c_i >= 0, c_1 = 1, c_q = 1/q, c_i = 0 for i not
// dividing q. For a finite group, c_d = s_G(d)/d.
class PolyDescriptor {
public:
    PolyDescriptor(unsigned q, std::vector<Rat> coeffs) : q_(q), coeffs_(std::move(coeffs)) {
        if (q_ == 0 || coeffs_.size() != q_)
            throw std::invalid_argument("PolyDescriptor: need coefficients c_1..c_q");
        if (coeffs_[0] != 1) throw std::invalid_argument("PolyDescriptor: c_1 must be 1");
        if (coeffs_[q_ - 1] != Rat(1, q_))
            throw std::invalid_argument("PolyDescriptor: c_q must be 1/q");
        for (unsigned i = 1; i <= q_; ++i) {
            if (coeffs_[i - 1] < 0) throw std::invalid_argument("PolyDescriptor: c_i < 0");
            if (q_ % i != 0 && coeffs_[i - 1] != 0)
                throw std::invalid_argument("PolyDescriptor: c_i != 0 for i not dividing q");
        }
    }

    explicit PolyDescriptor(const CountTable& table)
        : PolyDescriptor(table.group().order(), table.poly_coefficients()) {}

    unsigned q() const { return q_; }
    const std::vector<Rat>& coeffs() const { return coeffs_; }
    Rat coeff(unsigned i) const { return (i >= 1 && i <= q_) ? coeffs_[i - 1] : Rat(0); }

    Real eval(const Real& r) const {
        Real out = 0;
        for (unsigned i = q_; i >= 1; --i) out = (out + to_real(coeffs_[i - 1])) * r;
        return out;
    }

    // B_1(r) = r P'(r), strictly increasing for r > 0.
    Real b1(const Real& r) const {
        Real out = 0;
        for (unsigned i = q_; i >= 1; --i) out = out * r + to_real(Rat(i) * coeffs_[i - 1]);
        return out * r;
    }

    Real b1_prime(const Real& r) const {
        Real out = 0;
        for (unsigned i = q_; i >= 1; --i)
            out = out * r + to_real(Rat(i) * Rat(i) * coeffs_[i - 1]);
        return out;
    }

    // B(r) = r B_1'(r) / 2
    Real b(const Real& r) const { return r * b1_prime(r) / 2; }

private:
    unsigned q_;
    std::vector<Rat> coeffs_;
};

// Truncated fractional expansion sum_k b_k n^{-k/q}; normalized means b_0 = 1.
template <typename T>
struct FracSeries {
    unsigned q = 1;
    std::vector<T> coeffs; // b_0 .. b_{s-1}

    FracSeries() = default;
    FracSeries(unsigned q_in, std::vector<T> coeffs_in)
        : q(q_in), coeffs(std::move(coeffs_in)) {
        if (q == 0 || coeffs.empty()) throw std::invalid_argument("FracSeries: empty");
    }

    std::size_t terms() const { return coeffs.size(); }
    bool normalized() const { return coeffs[0] == 1; }

    Real eval(const Real& n) const {
        const Real u = pow(n, -Real(1) / Real(q));
        Real out = 0;
        for (std::size_t k = coeffs.size(); k-- > 0;) {
            if constexpr (std::is_same_v<T, Rat>) out = out * u + to_real(coeffs[k]);
            else out = out * u + coeffs[k];
        }
        return out;
    }
};

using FracSeriesQ = FracSeries<Rat>;
using FracSeriesR = FracSeries<Real>;

template <typename T>
FracSeries<T> fe_product(const FracSeries<T>& f, const FracSeries<T>& g) {
    if (f.q != g.q) throw std::domain_error("fe_product: mismatched branching order");
    const std::size_t s = std::min(f.terms(), g.terms());
    std::vector<T> out(s, T(0));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; i + j < s && j < g.terms(); ++j)
            if (i < f.terms()) out[i + j] += f.coeffs[i] * g.coeffs[j];
    return FracSeries<T>(f.q, std::move(out));
}

// e_0 = 1, e_k = -sum_{j=1}^k b_j e_{k-j}
template <typename T>
FracSeries<T> fe_reciprocal(const FracSeries<T>& f) {
    if (!f.normalized()) throw std::domain_error("fe_reciprocal: series must have b_0 = 1");
    const std::size_t s = f.terms();
    std::vector<T> e(s, T(0));
    e[0] = T(1);
    for (std::size_t k = 1; k < s; ++k) {
        T acc(0);
        for (std::size_t j = 1; j <= k; ++j) acc += f.coeffs[j] * e[k - j];
        e[k] = -acc;
    }
    return FracSeries<T>(f.q, std::move(e));
}

// Re-expansion at n+ell: b~_r = sum_{k+qj=r} b_k binom(-k/q, j) ell^j.
template <typename T>
FracSeries<T> fe_shift(const FracSeries<T>& f, long long ell) {
    if (!f.normalized()) throw std::domain_error("fe_shift: series must have b_0 = 1");
    if (ell == 0) return f;
    const std::size_t s = f.terms();
    std::vector<T> out(s, T(0));
    for (std::size_t k = 0; k < s; ++k) {
        if (f.coeffs[k] == T(0)) continue;
        Rat ell_pow = 1;
        for (std::size_t j = 0; k + static_cast<std::size_t>(f.q) * j < s; ++j) {
            const Rat factor = binomial_rat(Rat(-static_cast<long long>(k), f.q), static_cast<unsigned>(j)) * ell_pow;
            if constexpr (std::is_same_v<T, Rat>)
                out[k + f.q * j] += f.coeffs[k] * factor;
            else
                out[k + f.q * j] += f.coeffs[k] * to_real(factor);
            ell_pow *= ell;
        }
    }
    return FracSeries<T>(f.q, std::move(out));
}

// Aligned sum of sequences n^{-e_t/q} beta^{(t)}_n; returns the normalized
// series for (n^{-e/q}/T) sum_t beta^{(t)}_n and the multiplicity T of the
// maximal exponent e = max e_t.
template <typename T>
std::pair<FracSeries<T>, unsigned> fe_sum(
    const std::vector<std::pair<FracSeries<T>, long long>>& terms) {
    if (terms.empty()) throw std::domain_error("fe_sum: empty list");
    const unsigned q = terms[0].first.q;
    long long e = terms[0].second;
    for (const auto& [f, et] : terms) {
        if (f.q != q) throw std::domain_error("fe_sum: mismatched branching order");
        e = std::max(e, et);
    }
    unsigned multiplicity = 0;
    std::size_t s = SIZE_MAX;
    for (const auto& [f, et] : terms) {
        const auto delta = static_cast<std::size_t>(e - et);
        if (et == e) ++multiplicity;
        s = std::min(s, f.terms() + delta);
    }
    std::vector<T> out(s, T(0));
    for (const auto& [f, et] : terms) {
        const auto delta = static_cast<std::size_t>(e - et);
        for (std::size_t k = 0; k < f.terms() && k + delta < s; ++k) out[k + delta] += f.coeffs[k];
    }
    for (auto& c : out) c /= T(static_cast<int>(multiplicity));
    return {FracSeries<T>(q, std::move(out)), multiplicity};
}

// |b_k| <= 2C (2Dk)^{2Ek} for all fitted k >= 1.
template <typename T>
bool coeff_growth_check(const FracSeries<T>& f, const Real& c, const Real& d, const Real& e) {
    for (std::size_t k = 1; k < f.terms(); ++k) {
        Real bk;
        if constexpr (std::is_same_v<T, Rat>) bk = to_real(f.coeffs[k]);
        else bk = f.coeffs[k];
        const Real bound = 2 * c * pow(2 * d * Real(static_cast<unsigned>(k)),
                                       2 * e * Real(static_cast<unsigned>(k)));
        if (abs(bk) > bound) return false;
    }
    return true;
}

struct FitReport {
    FracSeriesR series;
    Real residual;      // l2 norm of residuals over all samples
    Real rms_residual;  // residual / sqrt(samples - terms)
    Real stability;     // max relative coefficient drift across the two windows
    Real b0_gain;       // sqrt([(A^T A)^{-1}]_{00}): noise-to-b0 amplification
};

namespace detail {

struct LeastSquaresResult {
    std::vector<Real> x;
    std::vector<std::vector<Real>> r; // upper-triangular QR factor, cols x cols
};

// Least squares via Householder QR in extended precision. Throws on rank
// deficiency, carrying a condition estimate.
inline LeastSquaresResult least_squares_qr(std::vector<std::vector<Real>> a,
                                           std::vector<Real> y) {
    const std::size_t rows = a.size();
    const std::size_t cols = a[0].size();
    if (rows < cols) throw std::invalid_argument("least_squares: underdetermined");
    for (std::size_t k = 0; k < cols; ++k) {
        Real norm = 0;
        for (std::size_t i = k; i < rows; ++i) norm += a[i][k] * a[i][k];
        norm = sqrt(norm);
        if (norm == 0) throw std::domain_error("least_squares: rank deficient");
        if (a[k][k] > 0) norm = -norm;
        std::vector<Real> v(rows, Real(0));
        for (std::size_t i = k; i < rows; ++i) v[i] = a[i][k];
        v[k] -= norm;
        Real vnorm2 = 0;
        for (std::size_t i = k; i < rows; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0) continue;
        for (std::size_t j = k; j < cols; ++j) {
            Real dot = 0;
            for (std::size_t i = k; i < rows; ++i) dot += v[i] * a[i][j];
            const Real scale = 2 * dot / vnorm2;
            for (std::size_t i = k; i < rows; ++i) a[i][j] -= scale * v[i];
        }
        Real dot = 0;
        for (std::size_t i = k; i < rows; ++i) dot += v[i] * y[i];
        const Real scale = 2 * dot / vnorm2;
        for (std::size_t i = k; i < rows; ++i) y[i] -= scale * v[i];
    }
    Real dmax = 0, dmin = 0;
    for (std::size_t k = 0; k < cols; ++k) {
        const Real d = abs(a[k][k]);
        if (k == 0) dmax = dmin = d;
        dmax = max(dmax, d);
        dmin = min(dmin, d);
    }
    if (dmin == 0 || dmax / dmin > pow(Real(10), Real::default_precision() - 10))
        throw std::domain_error("least_squares: ill-conditioned, condition estimate " +
                                (dmin == 0 ? std::string("inf") : Real(dmax / dmin).str(5)));
    LeastSquaresResult out;
    out.x.assign(cols, Real(0));
    for (std::size_t k = cols; k-- > 0;) {
        Real acc = y[k];
        for (std::size_t j = k + 1; j < cols; ++j) acc -= a[k][j] * out.x[j];
        out.x[k] = acc / a[k][k];
    }
    out.r.assign(cols, std::vector<Real>(cols, Real(0)));
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = i; j < cols; ++j) out.r[i][j] = a[i][j];
    return out;
}

inline std::vector<Real> least_squares(std::vector<std::vector<Real>> a, std::vector<Real> y) {
    return least_squares_qr(std::move(a), std::move(y)).x;
}

inline LeastSquaresResult fit_window(const std::vector<std::pair<std::uint64_t, Real>>& values,
                                     std::size_t begin, std::size_t end, unsigned q, unsigned s) {
    std::vector<std::vector<Real>> a;
    std::vector<Real> y;
    for (std::size_t i = begin; i < end; ++i) {
        const Real u = pow(Real(values[i].first), -Real(1) / Real(q));
        std::vector<Real> row(s);
        Real p = 1;
        for (unsigned k = 0; k < s; ++k) {
            row[k] = p;
            p *= u;
        }
        a.push_back(std::move(row));
        y.push_back(values[i].second);
    }
    return least_squares_qr(std::move(a), std::move(y));
}

} // namespace detail

// Least-squares fit of a fractional expansion to samples (n, v); two
// overlapping windows give the stability score (max relative coefficient
// drift). Needs at least s+2 geometrically spaced sample points.
inline FitReport fe_fit(const std::vector<std::pair<std::uint64_t, Real>>& values, unsigned q,
                        unsigned s) {
    if (values.size() < s + 2)
        throw std::invalid_argument("fe_fit: need at least s+2 sample points");
    auto full = detail::fit_window(values, 0, values.size(), q, s);
    auto w1 = detail::fit_window(values, 0, values.size() - 1, q, s).x;
    auto w2 = detail::fit_window(values, 1, values.size(), q, s).x;
    Real stability = 0;
    for (unsigned k = 0; k < s; ++k) {
        const Real scale = max(Real(1), Real(abs(full.x[k])));
        stability = max(stability, Real(abs(w1[k] - w2[k]) / scale));
    }
    Real residual = 0;
    FracSeriesR series(q, full.x);
    for (const auto& [n, v] : values) {
        const Real r = series.eval(Real(n)) - v;
        residual += r * r;
    }
    residual = sqrt(residual);
    // [(A^T A)^{-1}]_{00} = ||R^{-T} e_0||^2: forward-substitute R^T y = e_0
    std::vector<Real> ysub(s, Real(0));
    for (unsigned i = 0; i < s; ++i) {
        Real acc = i == 0 ? Real(1) : Real(0);
        for (unsigned j = 0; j < i; ++j) acc -= full.r[j][i] * ysub[j];
        ysub[i] = acc / full.r[i][i];
    }
    Real gain2 = 0;
    for (const auto& v : ysub) gain2 += v * v;
    const Real rms = residual / sqrt(Real(static_cast<unsigned>(values.size() - s) > 0
                                              ? static_cast<unsigned>(values.size() - s)
                                              : 1u));
    return FitReport{std::move(series), residual, rms, stability, sqrt(gain2)};
}

// Unique r_n > 0 solving B_1(r) = n+1, by Newton from r_0 = n^{1/q}.
inline Real rn_solve(const PolyDescriptor& p, std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("rn_solve: n >= 1 required");
    const Real target = Real(n) + 1;
    Real r = pow(Real(n), Real(1) / Real(p.q()));
    const Real tol = pow(Real(10), -30);
    for (int iter = 0; iter < 200; ++iter) {
        const Real f = p.b1(r) - target;
        const Real step = f / p.b1_prime(r);
        r -= step;
        if (abs(step) <= tol * abs(r)) return r;
    }
    throw std::runtime_error("rn_solve: Newton did not converge in 200 iterations");
}

struct SaddleExpansion {
    Real rho;                 // rho_n(s)
    std::vector<Rat> beta;    // beta_nu, nu = 1..q+s (Lagrange inversion of z = w phi(z))
    std::vector<Rat> gamma;   // gamma_i, i = 1..q+s-1 (after (n+1) -> n re-expansion)
    Real gs_value;            // G_s(n^{-1/q})
};

// Truncated saddle-point radius: phi = Q^{1/q} with Q(z) = z^{q-1} P'(1/z),
// z(w) by Lagrange inversion, gamma_i by re-expanding (n+1)^{-nu/q}, and
// rho_n(s) = n^{1/q} (1 + G_s(n^{-1/q}))^{-1}.
inline SaddleExpansion lagrange_rho(const PolyDescriptor& p, std::uint64_t n, unsigned s) {
    const unsigned q = p.q();
    const std::size_t len = q + s + 1; // z(w) needed through w^{q+s}
    PSeries qpoly(len, Rat(0));
    for (unsigned i = 1; i <= q; ++i)
        if (q - i < len) qpoly[q - i] += Rat(i) * p.coeff(i);
    if (qpoly[0] != 1) throw std::logic_error("lagrange_rho: Q(0) != 1");
    const PSeries phi = ps_pow(qpoly, Rat(1, q), len);
    const PSeries zw = ps_lagrange_invert(phi, len);

    SaddleExpansion out;
    out.beta.assign(q + s, Rat(0));
    for (unsigned nu = 1; nu <= q + s; ++nu) out.beta[nu - 1] = Rat(nu) * zw[nu];

    // 1/r_n = sum_nu (beta_nu/nu) (n+1)^{-nu/q} = n^{-1/q} (1 + sum gamma_i n^{-i/q})
    out.gamma.assign(q + s - 1, Rat(0));
    for (unsigned nu = 1; nu <= q + s; ++nu) {
        if (zw[nu] == 0) continue;
        for (unsigned j = 0; nu + q * j <= q + s; ++j) {
            const unsigned i = nu + q * j - 1;
            if (i >= 1 && i <= q + s - 1)
                out.gamma[i - 1] += zw[nu] * binomial_rat(Rat(-static_cast<long long>(nu), q), j);
        }
    }

    const Real u = pow(Real(n), -Real(1) / Real(q));
    Real gs = 0;
    for (std::size_t i = out.gamma.size(); i-- > 0;) gs = gs * u + to_real(out.gamma[i]);
    gs *= u;
    out.gs_value = gs;
    if (abs(gs) >= 1)
        throw std::runtime_error("lagrange_rho: |G_s(n^{-1/q})| >= 1, n too small for s = " +
                                 std::to_string(s));
    out.rho = pow(Real(n), Real(1) / Real(q)) / (1 + gs);
    return out;
}

// alpha_n / M(r_n) with M(r) = exp(P(r)) / (2 r^n sqrt(pi B(r))), computed in
// log space: log alpha_n = log chi_n - log n!.
inline Real muller_leading_ratio(const PolyDescriptor& p, const CountTable& chi, unsigned n) {
    const Real r = rn_solve(p, n);
    const Real pi_val = acos(Real(-1));
    const Real log_m =
        p.eval(r) - Real(n) * log(r) - log(Real(2)) - log(pi_val * p.b(r)) / 2;
    const Real log_alpha = log(to_real(chi.chi(n))) - lgamma(Real(n) + 1);
    return exp(log_alpha - log_m);
}

// Ordinary least-squares slope of log v against log n.
inline Real log_log_slope(const std::vector<std::pair<Real, Real>>& points) {
    if (points.size() < 2) throw std::invalid_argument("log_log_slope: need two points");
    Real sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += log(x);
        sy += log(y);
    }
    const Real mx = sx / points.size(), my = sy / points.size();
    Real num = 0, den = 0;
    for (const auto& [x, y] : points) {
        num += (log(x) - mx) * (log(y) - my);
        den += (log(x) - mx) * (log(x) - mx);
    }
    return num / den;
}

} // namespace permrep
