#include <catch2/catch_amalgamated.hpp>

#include "permrep/homcount.hpp"

using namespace permrep;

namespace {

// oracle: count sigma in Sym(n) with sigma^d = 1 by direct enumeration
unsigned count_order_dividing(unsigned d, unsigned n) {
    std::vector<unsigned> perm(n);
    for (unsigned i = 0; i < n; ++i) perm[i] = i;
    unsigned count = 0;
    do {
        std::vector<unsigned> acc(n);
        for (unsigned i = 0; i < n; ++i) acc[i] = i;
        for (unsigned k = 0; k < d; ++k)
            for (unsigned i = 0; i < n; ++i) acc[i] = perm[acc[i]];
        bool identity = true;
        for (unsigned i = 0; i < n && identity; ++i) identity = acc[i] == i;
        if (identity) ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

} // namespace

TEST_CASE("subgroup census") {
    const auto c2 = subgroup_census(FiniteGroup::cyclic(2));
    CHECK(c2.by_index == std::map<unsigned, unsigned>{{1, 1}, {2, 1}});
    const auto c3 = subgroup_census(FiniteGroup::cyclic(3));
    CHECK(c3.by_index == std::map<unsigned, unsigned>{{1, 1}, {3, 1}});
    const auto s3 = subgroup_census(FiniteGroup::symmetric3());
    CHECK(s3.by_index == std::map<unsigned, unsigned>{{1, 1}, {2, 1}, {3, 3}, {6, 1}});
    const auto c6 = subgroup_census(FiniteGroup::cyclic(6));
    CHECK(c6.by_index == std::map<unsigned, unsigned>{{1, 1}, {2, 1}, {3, 1}, {6, 1}});

    // every listed subgroup is closed and contains the identity
    const FiniteGroup s3g = FiniteGroup::symmetric3();
    for (const auto& h : s3.subgroups) {
        std::set<unsigned> members(h.begin(), h.end());
        CHECK(members.count(0) == 1);
        for (const unsigned a : h)
            for (const unsigned b : h) CHECK(members.count(s3g.mul(a, b)) == 1);
    }
}

TEST_CASE("chi tables against enumeration") {
    const CountTable t2(FiniteGroup::cyclic(2), 8);
    const std::vector<Int> expect2 = {1, 1, 2, 4, 10, 26, 76};
    for (unsigned n = 0; n <= 6; ++n) CHECK(t2.chi(n) == expect2[n]);

    const CountTable t3(FiniteGroup::cyclic(3), 6);
    CHECK(t3.chi(3) == 3);
    CHECK(t3.chi(4) == 9);

    const CountTable t1(FiniteGroup::trivial(), 6);
    for (unsigned n = 0; n <= 6; ++n) CHECK(t1.chi(n) == 1);

    // chi_n(C_d) = #{sigma : sigma^d = 1} by direct enumeration, n <= 6
    for (const unsigned d : {2u, 3u, 4u, 6u}) {
        const CountTable table(FiniteGroup::cyclic(d), 6);
        for (unsigned n = 1; n <= 6; ++n)
            CHECK(table.chi(n) == count_order_dividing(d, n));
    }

    // orbit decomposition identity that also drives the sampler
    const CountTable ts3(FiniteGroup::symmetric3(), 12);
    for (unsigned n = 1; n <= 12; ++n) {
        Int total = 0;
        for (const auto& [d, count] : ts3.census().by_index) {
            if (d > n) continue;
            total += count * falling_factorial(Int(n) - 1, d - 1) * ts3.chi(n - d);
        }
        CHECK(total == ts3.chi(n));
    }
}

TEST_CASE("enumerate_homs produces chi_n distinct homomorphisms") {
    const FiniteGroup s3 = FiniteGroup::symmetric3();
    const auto census = subgroup_census(s3);
    const CountTable table(s3, 4);
    for (unsigned n = 1; n <= 4; ++n) {
        std::set<FactorHom> seen;
        enumerate_homs(s3, census, n, [&](const FactorHom& hom) {
            // homomorphism property on every pair
            for (unsigned a = 0; a < 6; ++a)
                for (unsigned b = 0; b < 6; ++b)
                    for (unsigned p = 0; p < n; ++p)
                        REQUIRE(hom[a][hom[b][p]] == hom[s3.mul(a, b)][p]);
            seen.insert(hom);
        });
        CHECK(Int(static_cast<unsigned>(seen.size())) == table.chi(n));
    }
}

TEST_CASE("embedding lift expectation") {
    const CountTable t2(FiniteGroup::cyclic(2), 8);
    CHECK(embed_lift_expectation(t2, 0, 5) == 1);
    CHECK(embed_lift_expectation(t2, 2, 4) == Rat(12, 5));
    CHECK(embed_lift_expectation(t2, 4, 4) == Rat(12, 5)); // 4! chi_0/chi_4
    CHECK_THROWS_AS(embed_lift_expectation(t2, 5, 4), std::domain_error);

    // nonincreasing in V for fixed N
    const CountTable t3(FiniteGroup::cyclic(3), 8);
    for (const CountTable* table : {&t2, &t3})
        for (unsigned n = 4; n <= 8; ++n)
            for (unsigned v = 1; v <= n; ++v)
                CHECK(embed_lift_expectation(*table, v, n) <=
                      embed_lift_expectation(*table, v - 1, n));
}

TEST_CASE("expected fixed points, exact formula vs. paper closed form") {
    const FreeProduct c2 = parse_group_spec("C2");
    const NormalForm x = c2.parse_word("x");
    // E[fix] = N a_{N-1}/a_N
    CHECK(expected_fix_torsion(c2, x, 4) == Rat(8, 5));
    CHECK(expected_fix_torsion(c2, x, 3) == Rat(3, 2));
    CHECK(expected_fix_torsion(c2, NormalForm{}, 7) == 7);

    const FreeProduct c2c3 = parse_group_spec("C2*C3");
    CHECK(expected_fix_torsion(c2c3, c2c3.parse_word("y"), 4) == Rat(4, 3));
    // conjugates give the same expectation
    const NormalForm y_conj = c2c3.conjugate(c2c3.parse_word("y"), c2c3.parse_word("x y"));
    CHECK(expected_fix_torsion(c2c3, y_conj, 4) == Rat(4, 3));

    CHECK_THROWS_AS(expected_fix_torsion(c2c3, c2c3.parse_word("x y"), 4), std::domain_error);
}

TEST_CASE("multi-target evaluator matches the single-point formula") {
    const FreeProduct s3c2 = parse_group_spec("S3*C2");
    for (std::uint32_t f = 0; f < 2; ++f) {
        for (unsigned e = 1; e < s3c2.factor(f).order(); ++e) {
            const NormalForm gamma = s3c2.syllable(f, e);
            const auto multi = expected_fix_torsion_multi(s3c2, gamma, {2, 3, 5, 8});
            for (const unsigned n : {2u, 3u, 5u, 8u})
                CHECK(multi.at(n) == expected_fix_torsion(s3c2, gamma, n));
        }
    }
}

TEST_CASE("oracle equality on torsion elements") {
    for (const char* spec : {"C2*C3", "C2*C2*C2", "S3*C2"}) {
        const FreeProduct fp = parse_group_spec(spec);
        for (unsigned n = 1; n <= 5; ++n) {
            CHECK(expected_fix_torsion(fp, NormalForm{}, n) ==
                  brute_expected_fix(fp, NormalForm{}, n));
            for (std::uint32_t f = 0; f < fp.factor_count(); ++f)
                for (unsigned e = 1; e < fp.factor(f).order(); ++e)
                    CHECK(expected_fix_torsion(fp, fp.syllable(f, e), n) ==
                          brute_expected_fix(fp, fp.syllable(f, e), n));
        }
    }
}

TEST_CASE("brute-force oracle on infinite-order words") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    // golden value: 12 hom pairs at N = 3
    CHECK(brute_expected_fix(fp, fp.parse_word("x y"), 3) == Rat(1));
    // budget refusal carries the size report
    CHECK_THROWS_AS(brute_expected_fix(fp, fp.parse_word("x y"), 30, Int(1000)),
                    std::domain_error);
}

TEST_CASE("poly coefficients of the counting generating function") {
    const CountTable t2(FiniteGroup::cyclic(2), 2);
    const auto coeffs2 = t2.poly_coefficients();
    REQUIRE(coeffs2.size() == 2);
    CHECK(coeffs2[0] == 1);
    CHECK(coeffs2[1] == Rat(1, 2));

    const CountTable ts3(FiniteGroup::symmetric3(), 2);
    const auto coeffs = ts3.poly_coefficients();
    REQUIRE(coeffs.size() == 6);
    CHECK(coeffs[0] == 1);          // s(1)/1
    CHECK(coeffs[1] == Rat(1, 2));  // s(2)/2
    CHECK(coeffs[2] == 1);          // s(3)/3 = 3/3
    CHECK(coeffs[5] == Rat(1, 6));  // s(6)/6
}
