#include <catch2/catch_amalgamated.hpp>

#include "permrep/walks.hpp"

using namespace permrep;

TEST_CASE("walk generator validation and parsing") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    const WalkGenerator x = parse_walk_generator(fp, "x:1/3,y:1/3,y2:1/3");
    CHECK(x.support.size() == 3);
    CHECK(x.max_word_length() == 1);
    // uniform shorthand
    const WalkGenerator u = parse_walk_generator(fp, "x,y,y2");
    CHECK(u.support == x.support);
    // not symmetric: weight(y) != weight(y2)
    CHECK_THROWS_AS(parse_walk_generator(fp, "x:1/3,y:1/2,y2:1/6"), std::domain_error);
    // weights must sum to one
    CHECK_THROWS_AS(parse_walk_generator(fp, "x:1/3,y:1/3,y2:1/4"), std::domain_error);

    const WalkGenerator longer = parse_walk_generator(fp, "x y:1/2,y2 x:1/2");
    CHECK(longer.max_word_length() == 2);
}

TEST_CASE("convolution powers are exact") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    const WalkGenerator x = parse_walk_generator(fp, "x:1/3,y:1/3,y2:1/3");

    const WalkDistribution d1 = convolve_power(fp, x, 1);
    CHECK(d1.mass.size() == 3);
    CHECK(d1.mass.at(fp.parse_word("x")) == Rat(1, 3));

    const WalkDistribution d2 = convolve_power(fp, x, 2);
    CHECK(d2.mass.at(NormalForm{}) == Rat(1, 3)); // three of nine pairs reduce to e
    CHECK(d2.total() == 1);

    // budget refusal names the projection
    CHECK_THROWS_AS(convolve_power(fp, x, 10, 5), std::domain_error);

    // symmetry P(gamma) = P(gamma^-1), exact
    const WalkDistribution d5 = convolve_power(fp, x, 5);
    for (const auto& [w, m] : d5.mass) CHECK(d5.mass.at(fp.inverse(w)) == m);
    CHECK(d5.total() == 1);
}

TEST_CASE("classification masses at p = 2") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    const WalkGenerator x = parse_walk_generator(fp, "x:1/3,y:1/3,y2:1/3");
    const ChannelMasses m = classify_mass(fp, convolve_power(fp, x, 2), 1);
    CHECK(m.torsion == Rat(5, 9));
    CHECK(m.identity == Rat(3, 9));
    CHECK(m.c2c2 == 0);
    CHECK(m.generic == Rat(4, 9));
    CHECK(m.pow_d.empty());
    CHECK(m.torsion + m.c2c2 + m.generic == 1);

    const FreeProduct fp3 = parse_group_spec("C2*C2*C2");
    const WalkGenerator y = parse_walk_generator(fp3, "a,b,c");
    const ChannelMasses m3 = classify_mass(fp3, convolve_power(fp3, y, 2), 1);
    CHECK(m3.c2c2 == Rat(6, 9));
    CHECK(m3.torsion == Rat(3, 9));

    // delta mass at the identity: everything is torsion
    WalkDistribution delta;
    delta.p = 1;
    delta.mass[NormalForm{}] = 1;
    const ChannelMasses md = classify_mass(fp, delta);
    CHECK(md.torsion == 1);
    CHECK(md.identity == 1);

    // channels sum to one exactly on a deeper convolution
    const ChannelMasses deep = classify_mass(fp, convolve_power(fp, x, 7), 1);
    Rat total = deep.torsion + deep.c2c2 + deep.generic;
    for (const auto& [d, mass] : deep.pow_d) total += mass;
    CHECK(total == 1);
}

TEST_CASE("u_mu channels") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    const WalkGenerator x = parse_walk_generator(fp, "x:1/3,y:1/3,y2:1/3");
    const UmuChannels u2 = u_mu_power(fp, x, 2);
    CHECK(u2.infinite == 0); // all length-2 words are generic
    CHECK(u2.torsion_identity == Rat(-1, 3));

    const UmuChannels u4 = u_mu_power(fp, x, 4);
    CHECK(u4.infinite > 0); // reversible words such as xyxy2 carry h - 1 = 1
    CHECK(u4.infinite == Rat(8, 81));

    // delta at identity: torsion channel is -1 (dimension count 1 - 1/N)
    WalkGenerator delta;
    delta.support[NormalForm{}] = 1;
    const UmuChannels ud = u_mu_power(fp, delta, 3);
    CHECK(ud.torsion_identity == -1);
    CHECK(ud.infinite == 0);
}

TEST_CASE("limit norm constants") {
    CHECK(limit_norm_constants("c2star(3)").norm == Catch::Approx(2 * std::sqrt(2.0)));
    CHECK(limit_norm_constants("c2c3").norm == Catch::Approx(2.965442507).epsilon(1e-8));
    CHECK(limit_norm_constants("free(2)").norm == Catch::Approx(2 * std::sqrt(3.0)));
    const LimitNorm c2c3 = limit_norm_constants("c2c3");
    REQUIRE(c2c3.endpoints.size() == 4);
    CHECK(c2c3.endpoints[0] == Catch::Approx((1 - std::sqrt(13 + 8 * std::sqrt(2.0))) / 2));
    CHECK(c2c3.atoms.at(-2.0) == Catch::Approx(1.0 / 6));
    CHECK(c2c3.atoms.at(0.0) == Catch::Approx(1.0 / 6));
    CHECK_THROWS_AS(limit_norm_constants("c2star(1)"), std::invalid_argument);
    CHECK_THROWS_AS(limit_norm_constants("heisenberg"), std::invalid_argument);
}

TEST_CASE("moment method norm estimates") {
    const FreeProduct fp = parse_group_spec("C2*C2*C2");
    const WalkGenerator x = parse_walk_generator(fp, "a,b,c");
    const NormEstimate est = norm_estimate(fp, x, 12);
    REQUIRE(est.m.size() == 12);
    CHECK(est.monotone);
    for (const auto& m : est.m) CHECK(m <= 1);
    const double target = 2 * std::sqrt(2.0) / 3;
    CHECK(std::abs(est.limit.convert_to<double>() - target) / target < 0.05);

    // delta at identity: m_p = 1 for all p
    WalkGenerator delta;
    delta.support[NormalForm{}] = 1;
    const NormEstimate ed = norm_estimate(fp, delta, 5);
    for (const auto& m : ed.m) CHECK(abs(m - 1) < Real("1e-40"));
}

TEST_CASE("hitting bound report") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    const WalkGenerator x = parse_walk_generator(fp, "x:1/3,y:1/3,y2:1/3");
    const Real norm = Real(limit_norm_constants("c2c3").norm) / 3;
    const auto rows = hitting_bound_report(fp, x, 10, norm);
    REQUIRE(rows.size() == 10);
    for (const auto& row : rows) {
        CHECK(row.within_bounds);
        CHECK(row.support_ok);
    }
    // p = 2 torsion ratio is 5/9 / norm^2, far below (p+1)^2 M = 45
    CHECK(rows[1].torsion_ratio < 1);
    CHECK(rows[1].torsion_bound == 45);
}

TEST_CASE("temperedness trend diagnostics stay finite") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    const WalkGenerator x = parse_walk_generator(fp, "x:1/3,y:1/3,y2:1/3");
    const Real norm = Real(limit_norm_constants("c2c3").norm) / 3;
    // |u_inf(x^p)|^{1/p} <= ||lambda(x)|| + 0.05 on the C2*C3 model at p <= 12
    WalkDistribution dist;
    dist.mass[NormalForm{}] = 1;
    for (unsigned p = 1; p <= 12; ++p) {
        std::map<NormalForm, Rat> next;
        for (const auto& [w, m] : dist.mass)
            for (const auto& [g, weight] : x.support) next[fp.mul(w, g)] += m * weight;
        dist.mass = std::move(next);
        dist.p = p;
        if (p < 9) continue;
        const ChannelMasses masses = classify_mass(fp, dist, 1);
        if (masses.u_mu_infinite == 0) continue;
        CHECK(pow(to_real(masses.u_mu_infinite), Real(1) / Real(p)) <= norm + Real("0.05"));
    }
}
