// Truncated power series over exact rationals: the toolbox behind the
// saddle-point computations (fractional powers, composition, Lagrange
// inversion). Series are dense coefficient vectors c[0..L-1].
#pragma once

#include <stdexcept>
#include <vector>

#include "permrep/numeric.hpp"

namespace permrep {

using PSeries = std::vector<Rat>;

inline PSeries ps_mul(const PSeries& a, const PSeries& b, std::size_t len) {
    PSeries out(len, Rat(0));
    for (std::size_t i = 0; i < a.size() && i < len; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size() && i + j < len; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

inline PSeries ps_inverse(const PSeries& a, std::size_t len) {
    if (a.empty() || a[0] == 0) throw std::domain_error("series inverse needs a[0] != 0");
    PSeries out(len, Rat(0));
    out[0] = 1 / a[0];
    for (std::size_t n = 1; n < len; ++n) {
        Rat acc = 0;
        for (std::size_t j = 1; j <= n && j < a.size(); ++j) acc += a[j] * out[n - j];
        out[n] = -acc / a[0];
    }
    return out;
}

inline PSeries ps_exp(const PSeries& a, std::size_t len) {
    if (!a.empty() && a[0] != 0) throw std::domain_error("series exp needs a[0] = 0");
    PSeries out(len, Rat(0));
    out[0] = 1;
    // f' = a' f
    for (std::size_t n = 1; n < len; ++n) {
        Rat acc = 0;
        for (std::size_t k = 1; k <= n && k < a.size(); ++k) acc += Rat(k) * a[k] * out[n - k];
        out[n] = acc / Rat(n);
    }
    return out;
}

inline PSeries ps_log(const PSeries& a, std::size_t len) {
    if (a.empty() || a[0] != 1) throw std::domain_error("series log needs a[0] = 1");
    // g' = a'/a, i.e. n g_n = n a_n - sum_{j=1}^{n-1} j g_j a_{n-j}
    PSeries out(len, Rat(0));
    for (std::size_t n = 1; n < len; ++n) {
        Rat acc = n < a.size() ? Rat(n) * a[n] : Rat(0);
        for (std::size_t j = 1; j < n; ++j) {
            const Rat aj = n - j < a.size() ? a[n - j] : Rat(0);
            acc -= Rat(j) * out[j] * aj;
        }
        out[n] = acc / Rat(n);
    }
    return out;
}

// a^alpha for a[0] = 1 and rational alpha, via a f' = alpha a' f.
inline PSeries ps_pow(const PSeries& a, const Rat& alpha, std::size_t len) {
    if (a.empty() || a[0] != 1) throw std::domain_error("series pow needs a[0] = 1");
    PSeries out(len, Rat(0));
    out[0] = 1;
    for (std::size_t n = 1; n < len; ++n) {
        Rat acc = 0;
        for (std::size_t j = 1; j <= n; ++j) {
            const Rat aj = j < a.size() ? a[j] : Rat(0);
            if (aj == 0) continue;
            acc += (alpha * Rat(j) - Rat(n - j)) * aj * out[n - j];
        }
        out[n] = acc / Rat(n);
    }
    return out;
}

inline PSeries ps_compose(const PSeries& a, const PSeries& b, std::size_t len) {
    if (!b.empty() && b[0] != 0) throw std::domain_error("series composition needs b[0] = 0");
    PSeries out(len, Rat(0));
    PSeries bpow(len, Rat(0));
    bpow[0] = 1;
    for (std::size_t k = 0; k < a.size() && k < len; ++k) {
        if (a[k] != 0)
            for (std::size_t i = 0; i < len; ++i) out[i] += a[k] * bpow[i];
        bpow = ps_mul(bpow, b, len);
    }
    return out;
}

// Lagrange inversion for z = w phi(z) with phi(0) != 0: returns the series
// z(w) = sum_{v>=1} z_v w^v with z_v = [z^{v-1}] phi(z)^v / v.
inline PSeries ps_lagrange_invert(const PSeries& phi, std::size_t len) {
    if (phi.empty() || phi[0] == 0) throw std::domain_error("Lagrange inversion needs phi(0) != 0");
    PSeries out(len, Rat(0));
    PSeries phipow(len, Rat(0));
    phipow[0] = 1;
    for (std::size_t v = 1; v < len; ++v) {
        phipow = ps_mul(phipow, phi, len);
        out[v] = phipow[v - 1] / Rat(static_cast<unsigned>(v));
    }
    return out;
}

inline Real ps_eval(const PSeries& a, const Real& x) {
    Real out = 0;
    for (std::size_t i = a.size(); i-- > 0;) out = out * x + to_real(a[i]);
    return out;
}

} // namespace permrep
