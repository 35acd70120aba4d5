#include <catch2/catch_amalgamated.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <map>

#include "permrep/sampler.hpp"

using namespace permrep;

namespace {

double uniformity_p_value(const FiniteGroup& g, unsigned n, std::uint64_t seed) {
    FactorSampler sampler(g, n);
    std::map<FactorHom, unsigned> cell;
    enumerate_homs(g, sampler.table().census(), n, [&](const FactorHom& hom) {
        const auto id = static_cast<unsigned>(cell.size());
        cell[hom] = id;
    });
    const auto cells = static_cast<unsigned>(cell.size());
    const unsigned draws = 150 * cells;
    std::vector<unsigned> counts(cells, 0);
    for (unsigned t = 0; t < draws; ++t) {
        Xoshiro256 rng = Xoshiro256::stream(seed, t);
        counts.at(cell.at(sampler.sample(n, rng))) += 1;
    }
    const double expected = static_cast<double>(draws) / cells;
    double stat = 0;
    for (const unsigned c : counts) stat += (c - expected) * (c - expected) / expected;
    boost::math::chi_squared_distribution<double> dist(cells - 1.0);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

} // namespace

TEST_CASE("trivial group sampling is the identity") {
    FactorSampler sampler(FiniteGroup::trivial(), 6);
    Xoshiro256 rng(1);
    const FactorHom hom = sampler.sample(6, rng);
    for (unsigned p = 0; p < 6; ++p) CHECK(hom[0][p] == p);
}

TEST_CASE("orbit-size weights sum to chi exactly") {
    for (const auto& g : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3),
                          FiniteGroup::symmetric3()}) {
        const CountTable table(g, 40);
        for (unsigned n = 1; n <= 40; ++n) {
            Int total = 0;
            for (const auto& [d, count] : table.census().by_index) {
                if (d > n) continue;
                total += count * falling_factorial(Int(n) - 1, d - 1) * table.chi(n - d);
            }
            CHECK(total == table.chi(n)); // the rational identity behind the sampler
        }
    }
}

TEST_CASE("sampler is exactly uniform on enumerable cases") {
    CHECK(uniformity_p_value(FiniteGroup::cyclic(2), 2, 11) > 1e-3);
    CHECK(uniformity_p_value(FiniteGroup::cyclic(2), 4, 12) > 1e-3);
    CHECK(uniformity_p_value(FiniteGroup::cyclic(3), 4, 13) > 1e-3);
    CHECK(uniformity_p_value(FiniteGroup::symmetric3(), 3, 14) > 1e-3);
}

TEST_CASE("C2 at N=2: the two homs are equally likely") {
    FactorSampler sampler(FiniteGroup::cyclic(2), 2);
    unsigned transpositions = 0;
    const unsigned draws = 20000;
    for (unsigned t = 0; t < draws; ++t) {
        Xoshiro256 rng = Xoshiro256::stream(99, t);
        const FactorHom hom = sampler.sample(2, rng);
        if (hom[1][0] == 1) ++transpositions;
    }
    CHECK(std::abs(static_cast<double>(transpositions) / draws - 0.5) < 0.02);
}

TEST_CASE("sampled maps satisfy the factor relations") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    FreeProductSampler sampler(fp, 200);
    for (unsigned t = 0; t < 50; ++t) {
        const HomImage phi = sampler.sample(200, mix_seed(5, t));
        for (std::size_t i = 0; i < fp.factor_count(); ++i)
            CHECK(verify_factor_hom(fp.factor(i), phi.images[i]));
    }
    const FreeProduct s3c2 = parse_group_spec("S3*C2");
    FreeProductSampler sampler2(s3c2, 50);
    for (unsigned t = 0; t < 20; ++t) {
        const HomImage phi = sampler2.sample(50, mix_seed(6, t));
        for (std::size_t i = 0; i < s3c2.factor_count(); ++i)
            CHECK(verify_factor_hom(s3c2.factor(i), phi.images[i]));
    }
}

TEST_CASE("determinism: identical seeds give bit-identical images") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    FreeProductSampler sampler(fp, 500);
    const HomImage a = sampler.sample(500, 12345);
    const HomImage b = sampler.sample(500, 12345);
    CHECK(a.images == b.images);
    const HomImage c = sampler.sample(500, 12346);
    CHECK(a.images != c.images);
    // factor streams are independent: same x-image when only the C3 stream moves
    // (regression guard for the per-factor seed derivation)
    CHECK(a.images[0] == b.images[0]);
}

TEST_CASE("evaluate applies the last syllable first") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    HomImage phi;
    phi.n = 3;
    phi.images = {FactorHom(2), FactorHom(3)};
    // x -> (0 1), identity for e
    phi.images[0][0] = {0, 1, 2};
    phi.images[0][1] = {1, 0, 2};
    // y -> (0 1 2): y(0)=1, y(1)=2, y(2)=0
    phi.images[1][0] = {0, 1, 2};
    phi.images[1][1] = {1, 2, 0};
    phi.images[1][2] = {2, 0, 1};

    CHECK(evaluate(phi, NormalForm{}, 2) == 2);
    CHECK(evaluate(phi, fp.parse_word("x"), 0) == 1);
    CHECK(fix_count(phi, fp.parse_word("x")) == 1);
    // xy at 0: apply y then x: y(0) = 1, x(1) = 0
    CHECK(evaluate(phi, fp.parse_word("x y"), 0) == 0);
    CHECK_THROWS_AS(evaluate(phi, fp.parse_word("x"), 5), std::out_of_range);

    // phi(uv) = phi(u) phi(v) on a sampled image
    FreeProductSampler sampler(fp, 60);
    const HomImage psi = sampler.sample(60, 77);
    Xoshiro256 rng(3);
    for (int t = 0; t < 40; ++t) {
        std::vector<Syllable> letters;
        for (int i = 0; i < 6; ++i) {
            const auto f = static_cast<std::uint32_t>(rng.below(2));
            letters.push_back(
                Syllable{f, 1 + static_cast<std::uint32_t>(rng.below(fp.factor(f).order() - 1))});
        }
        const NormalForm u = fp.normalize({letters.begin(), letters.begin() + 3});
        const NormalForm v = fp.normalize({letters.begin() + 3, letters.end()});
        const unsigned p = static_cast<unsigned>(rng.below(60));
        CHECK(evaluate(psi, fp.mul(u, v), p) == evaluate(psi, u, evaluate(psi, v, p)));
    }
}

TEST_CASE("Monte Carlo fixed points agree with the exact expectation") {
    const FreeProduct fp = parse_group_spec("C2*C3");
    FreeProductSampler sampler(fp, 100);
    const NormalForm x = fp.parse_word("x");
    const Rat exact = expected_fix_torsion(fp, x, 100);
    const unsigned trials = 3000;
    double mean = 0, var = 0;
    std::vector<double> values(trials);
    for (unsigned t = 0; t < trials; ++t) {
        values[t] = fix_count(sampler.sample(100, mix_seed(31337, t)), x);
        mean += values[t];
    }
    mean /= trials;
    for (const double v : values) var += (v - mean) * (v - mean);
    const double stderr_mean = std::sqrt(var / (trials - 1) / trials);
    const double exact_d = to_real(exact).convert_to<double>();
    CHECK(std::abs(mean - exact_d) < 3.5 * stderr_mean + 1e-9);
}

TEST_CASE("table extension errors are explicit") {
    FactorSampler sampler(FiniteGroup::cyclic(2), 10);
    Xoshiro256 rng(4);
    CHECK_THROWS_AS(sampler.sample(100, rng), std::out_of_range);
    sampler.extend(100);
    CHECK_NOTHROW(sampler.sample(100, rng));
}
