#include <catch2/catch_amalgamated.hpp>

#include "permrep/series.hpp"

using namespace permrep;

TEST_CASE("series multiplication and inversion") {
    const PSeries a = {1, 2, 3};
    const PSeries b = {1, -1};
    const PSeries ab = ps_mul(a, b, 4);
    CHECK(ab == PSeries{1, 1, 1, -3});

    const PSeries inv = ps_inverse(a, 4);
    const PSeries unit = ps_mul(a, inv, 4);
    CHECK(unit == PSeries{1, 0, 0, 0});
    CHECK_THROWS_AS(ps_inverse(PSeries{0, 1}, 3), std::domain_error);
}

TEST_CASE("series exp and log are inverse") {
    const PSeries a = {0, 1, Rat(1, 2), Rat(-1, 3)};
    const PSeries e = ps_exp(a, 6);
    CHECK(e[0] == 1);
    CHECK(ps_log(e, 6) == PSeries{0, 1, Rat(1, 2), Rat(-1, 3), 0, 0});
    // exp(z) coefficients are 1/k!
    const PSeries ez = ps_exp(PSeries{0, 1}, 5);
    CHECK(ez == PSeries{1, 1, Rat(1, 2), Rat(1, 6), Rat(1, 24)});
    CHECK_THROWS_AS(ps_exp(PSeries{1}, 2), std::domain_error);
}

TEST_CASE("fractional power") {
    // (1+z)^{1/2} = 1 + z/2 - z^2/8 + z^3/16 - ...
    const PSeries sqrt_series = ps_pow(PSeries{1, 1}, Rat(1, 2), 4);
    CHECK(sqrt_series == PSeries{1, Rat(1, 2), Rat(-1, 8), Rat(1, 16)});
    // square back
    const PSeries sq = ps_mul(sqrt_series, sqrt_series, 4);
    CHECK(sq == PSeries{1, 1, 0, 0});
    // integral exponent agrees with repeated multiplication
    const PSeries base = {1, 2, 1};
    const PSeries cube = ps_pow(base, Rat(3), 5);
    const PSeries manual = ps_mul(ps_mul(base, base, 5), base, 5);
    CHECK(cube == manual);
}

TEST_CASE("composition") {
    // exp(log(1+z)) = 1 + z
    const PSeries log1p = ps_log(PSeries{1, 1}, 6);
    PSeries expz(6, Rat(0));
    for (unsigned k = 0; k < 6; ++k) expz[k] = Rat(1) / Rat(factorial(k));
    const PSeries composed = ps_compose(expz, log1p, 6);
    CHECK(composed == PSeries{1, 1, 0, 0, 0, 0});
    CHECK_THROWS_AS(ps_compose(expz, PSeries{1, 1}, 3), std::domain_error);
}

TEST_CASE("Lagrange inversion solves z = w phi(z)") {
    // phi = (1+z)^{1/2}: z(w) = w + w^2/2 + w^3/8 + ...
    const PSeries phi = ps_pow(PSeries{1, 1}, Rat(1, 2), 8);
    const PSeries zw = ps_lagrange_invert(phi, 8);
    CHECK(zw[1] == 1);
    CHECK(zw[2] == Rat(1, 2));
    CHECK(zw[3] == Rat(1, 8));

    // functional identity to series order: z(w) == w * phi(z(w))
    const PSeries phi_of_z = ps_compose(phi, zw, 8);
    PSeries w_phi(8, Rat(0));
    for (unsigned k = 0; k + 1 < 8; ++k) w_phi[k + 1] = phi_of_z[k];
    CHECK(zw == w_phi);

    // same identity for a cubic branch phi = (1 + z^2)^{1/3}
    const PSeries phi3 = ps_pow(PSeries{1, 0, 1}, Rat(1, 3), 9);
    const PSeries zw3 = ps_lagrange_invert(phi3, 9);
    const PSeries rhs = ps_compose(phi3, zw3, 9);
    for (unsigned k = 1; k < 9; ++k) CHECK(zw3[k] == rhs[k - 1]);
}

TEST_CASE("series evaluation") {
    const PSeries a = {1, Rat(1, 2), Rat(1, 4)};
    const Real v = ps_eval(a, Real(2));
    CHECK(abs(v - 3) < pow(Real(10), -50));
}
