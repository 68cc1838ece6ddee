#include <doctest.h>

#include <cmath>

#include "bofop/rng.hpp"
#include "bofop/transport.hpp"
#include "oracles.hpp"

using bofop::Matrix;

namespace {

void check_marginals(const bofop::TransportSolution& sol, const std::vector<double>& supply,
                     const std::vector<double>& demand) {
    std::vector<double> rows(supply.size(), 0.0);
    std::vector<double> cols(demand.size(), 0.0);
    for (const auto& e : sol.plan) {
        CHECK(e.mass > 0.0);
        rows[e.source] += e.mass;
        cols[e.target] += e.mass;
    }
    for (std::size_t i = 0; i < supply.size(); ++i) CHECK(rows[i] == doctest::Approx(supply[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < demand.size(); ++j) CHECK(cols[j] == doctest::Approx(demand[j]).epsilon(1e-12));
}

}  // namespace

TEST_CASE("transport: single cell and trivial cases") {
    Matrix c{{3.0}};
    const auto sol = bofop::solve_transport(std::vector<double>{2.0}, std::vector<double>{2.0}, c);
    CHECK(sol.cost == doctest::Approx(6.0));
    const auto empty = bofop::solve_transport(std::vector<double>{0.0}, std::vector<double>{0.0}, c);
    CHECK(empty.cost == 0.0);
    CHECK_THROWS(bofop::solve_transport(std::vector<double>{1.0}, std::vector<double>{2.0}, c));
}

TEST_CASE("transport: matches successive shortest paths on random problems") {
    bofop::Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 1 + rng.below(12);
        const std::size_t n = 1 + rng.below(12);
        const bool integral = trial % 3 == 0;  // integral data provokes degenerate pivots
        std::vector<double> supply(m), demand(n);
        for (auto& s : supply) s = integral ? static_cast<double>(rng.below(4)) : rng.uniform(0.0, 1.0);
        for (auto& d : demand) d = integral ? static_cast<double>(rng.below(4)) : rng.uniform(0.0, 1.0);
        double ts = 0, td = 0;
        for (double s : supply) ts += s;
        for (double d : demand) td += d;
        if (ts == 0.0 || td == 0.0) continue;
        if (integral) {
            // Rebalance on integers so the instance stays degenerate.
            while (ts > td) { demand[rng.below(n)] += 1; td += 1; }
            while (td > ts) { supply[rng.below(m)] += 1; ts += 1; }
        } else {
            for (auto& d : demand) d *= ts / td;
        }
        Matrix cost(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                cost(i, j) = integral ? static_cast<double>(rng.below(3)) : rng.uniform(0.0, 5.0);

        const auto sol = bofop::solve_transport(supply, demand, cost);
        const double expected = oracle::balanced_ot_by_shortest_paths(supply, demand, cost);
        CHECK(sol.cost == doctest::Approx(expected).epsilon(1e-10));
        check_marginals(sol, supply, demand);
    }
}

TEST_CASE("transport: larger dense instance stays consistent with its plan") {
    const std::size_t m = 60, n = 45;
    std::vector<double> supply(m, 1.0 / m), demand(n, 1.0 / n);
    Matrix cost(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) cost(i, j) = std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n);
    const auto sol = bofop::solve_transport(supply, demand, cost);
    check_marginals(sol, supply, demand);
    const double expected = oracle::balanced_ot_by_shortest_paths(supply, demand, cost);
    CHECK(sol.cost == doctest::Approx(expected).epsilon(1e-10));
}
