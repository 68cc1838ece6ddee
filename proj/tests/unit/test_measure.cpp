#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bofop/measure.hpp"
#include "bofop/rng.hpp"
#include "oracles.hpp"

using bofop::DiscreteMeasure;

TEST_CASE("measure construction rejects bad input") {
    CHECK_THROWS_AS(DiscreteMeasure(1, {{0.0}}, {-0.1}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(1, {{0.0}}, {std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(2, {{0.0}}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(1, {{0.0}, {1.0}}, {1.0}), std::invalid_argument);
    DiscreteMeasure zero(3);
    CHECK(zero.total_mass() == 0.0);
    CHECK(zero.empty());
}

TEST_CASE("canonicalization merges, drops zero weights and sorts") {
    DiscreteMeasure mu(2, {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1e-13}, {5.0, 5.0}}, {0.25, 0.5, 0.25, 0.0});
    const DiscreteMeasure c = mu.canonical();
    REQUIRE(c.size() == 2);
    CHECK(c.atom(0)[0] == 0.0);
    CHECK(c.weight(0) == doctest::Approx(0.5));
    CHECK(c.atom(1)[0] == 1.0);
    CHECK(c.weight(1) == doctest::Approx(0.5));
}

TEST_CASE("canonicalization merges near-equal atoms that are not lexicographic neighbours") {
    // (0, 5) and (1e-13, 5) are within tolerance but (1e-13, 1) sorts between them.
    DiscreteMeasure mu(2, {{0.0, 5.0}, {1e-13, 1.0}, {1e-13, 5.0}}, {1.0, 1.0, 1.0});
    CHECK(mu.canonical().size() == 2);
}

TEST_CASE("equivalence ignores atom order and splitting") {
    DiscreteMeasure a(1, {{1.0}, {-1.0}}, {0.3, 0.7});
    DiscreteMeasure b(1, {{-1.0}, {1.0}, {-1.0}}, {0.35, 0.3, 0.35});
    CHECK(bofop::equivalent(a, b));
    DiscreteMeasure c(1, {{-1.0}, {1.0}}, {0.6, 0.4});
    CHECK_FALSE(bofop::equivalent(a, c));
}

TEST_CASE("pushforward examples") {
    DiscreteMeasure mu(1, {{1.0}, {-1.0}}, {0.3, 0.7});

    const auto ident = bofop::pushforward_measure(mu, [](auto x) { return std::vector<double>(x.begin(), x.end()); });
    CHECK(bofop::equivalent(ident, mu));

    const auto constant = bofop::pushforward_measure(mu, [](auto) { return std::vector<double>{0.25, -0.5}; });
    const auto cc = constant.canonical();
    REQUIRE(cc.size() == 1);
    CHECK(cc.dim() == 2);
    CHECK(cc.weight(0) == doctest::Approx(1.0));
    CHECK(cc.atom(0)[1] == -0.5);

    const auto half = bofop::pushforward_measure(mu, [](auto x) { return std::vector<double>{x[0] / 2.0}; });
    CHECK(bofop::equivalent(half, DiscreteMeasure(1, {{0.5}, {-0.5}}, {0.3, 0.7})));
    CHECK(half.total_mass() == doctest::Approx(mu.total_mass()));

    int calls = 0;
    CHECK_THROWS_AS(bofop::pushforward_measure(mu,
                                               [&calls](auto) {
                                                   ++calls;
                                                   return std::vector<double>(static_cast<std::size_t>(calls), 0.0);
                                               }),
                    std::invalid_argument);
}

TEST_CASE("pushforward preserves total mass on random measures") {
    bofop::Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const auto mu = oracle::random_measure(rng, 3, 1 + rng.below(6), rng.uniform(0.1, 2.0));
        const auto pushed =
            bofop::pushforward_measure(mu, [](auto x) { return std::vector<double>{x[0] + x[1], std::sin(x[2])}; });
        CHECK(pushed.total_mass() == doctest::Approx(mu.total_mass()).epsilon(1e-14));
    }
}
