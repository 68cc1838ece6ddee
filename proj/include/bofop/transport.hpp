#pragma once

#include <span>
#include <vector>

#include "bofop/matrix.hpp"

namespace bofop {

struct TransportPlanEntry {
    std::size_t source;
    std::size_t target;
    double mass;
};

struct TransportSolution {
    double cost = 0.0;
    std::vector<TransportPlanEntry> plan;
    std::size_t pivots = 0;
};

/// Exact balanced transportation problem
///
///   min sum_ij cost(i,j) x_ij  s.t.  sum_j x_ij = supply_i,  sum_i x_ij = demand_j,  x >= 0
///
/// solved by the primal network simplex on the complete bipartite graph with
/// a strongly feasible spanning tree (Cunningham's leaving-arc rule), which
/// rules out cycling under degeneracy.
///
/// Supplies and demands must be nonnegative and have equal totals up to a
/// relative 1e-9; the residual imbalance from floating-point summation is
/// absorbed by the largest demand.
[[nodiscard]] TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                                const Matrix& cost);

}  // namespace bofop
