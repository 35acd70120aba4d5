// Number types and small arithmetic helpers shared across the library.
//
// Exact integers and rationals are GMP-backed; extended-precision reals are
// MPFR-backed with a runtime-configurable default precision (>= 50 digits,
// see set_real_precision). Counting stays exact end to end; floats enter
// only at the fitting and spectral boundaries.
#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "permrep/rng.hpp"

namespace permrep {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;
using Real = boost::multiprecision::mpfr_float;

inline void set_real_precision(unsigned digits10) {
    if (digits10 < 50)
        throw std::invalid_argument("real precision must be at least 50 digits");
    Real::default_precision(digits10);
}

struct RealPrecisionInit {
    RealPrecisionInit() { Real::default_precision(60); }
};
inline const RealPrecisionInit real_precision_init{};

// Convert exact values to Real at the current default precision. Never mix
// Int or Rat operands directly into a Real expression: the generic
// interconversion inflates the working precision by orders of magnitude.
inline Real to_real(const Int& v) { return Real(v.backend().data()); }
inline Real to_real(const Rat& v) {
    return to_real(Int(numerator(v))) / to_real(Int(denominator(v)));
}

inline Int factorial(unsigned n) {
    Int out = 1;
    for (unsigned i = 2; i <= n; ++i) out *= i;
    return out;
}

// Falling factorial (n)_k = n (n-1) ... (n-k+1).
inline Int falling_factorial(const Int& n, unsigned k) {
    Int out = 1;
    for (unsigned i = 0; i < k; ++i) out *= n - i;
    return out;
}

inline Int binomial(const Int& n, unsigned k) {
    Int out = falling_factorial(n, k);
    return out / factorial(k);
}

// Generalized binomial coefficient binom(alpha, j) for rational alpha.
inline Rat binomial_rat(const Rat& alpha, unsigned j) {
    Rat out = 1;
    for (unsigned t = 0; t < j; ++t) out *= (alpha - t) / Rat(t + 1);
    return out;
}

// omega(d): number of positive divisors. Trial division; d stays tiny here.
inline unsigned divisor_count(unsigned d) {
    unsigned count = 0;
    for (unsigned k = 1; k <= d; ++k)
        if (d % k == 0) ++count;
    return count;
}

// sigma(d): sum of positive divisors.
inline unsigned divisor_sum(unsigned d) {
    unsigned sum = 0;
    for (unsigned k = 1; k <= d; ++k)
        if (d % k == 0) sum += k;
    return sum;
}

inline std::vector<unsigned> divisors(unsigned d) {
    std::vector<unsigned> out;
    for (unsigned k = 1; k <= d; ++k)
        if (d % k == 0) out.push_back(k);
    return out;
}

// Uniform integer in [0, bound), exact, by limb-wise rejection.
inline Int uniform_int_below(Xoshiro256& rng, const Int& bound) {
    if (bound <= 0) throw std::invalid_argument("uniform_int_below: bound must be positive");
    if (bound == 1) return 0;
    const std::size_t bits = msb(bound) + 1; // msb is 0-based
    const std::size_t words = (bits + 63) / 64;
    const unsigned top_shift = static_cast<unsigned>(words * 64 - bits);
    std::vector<std::uint64_t> buffer(words);
    Int draw;
    do {
        for (auto& word : buffer) word = rng();
        buffer.back() >>= top_shift;
        mpz_import(draw.backend().data(), words, -1 /*LSW first*/, sizeof(std::uint64_t),
                   0 /*native endian*/, 0, buffer.data());
    } while (draw >= bound);
    return draw;
}

} // namespace permrep
