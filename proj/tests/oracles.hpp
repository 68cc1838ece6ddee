#pragma once

// Test-only reference implementations. None of these share code with the
// library's solvers; they exist to check them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "bofop/matrix.hpp"
#include "bofop/measure.hpp"
#include "bofop/rng.hpp"
#include "bofop/signal.hpp"

namespace oracle {

using bofop::Matrix;

// Solves the square system a x = b by Gaussian elimination with partial
// pivoting. Returns false when the matrix is (numerically) singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-12) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

// Unbalanced mover's distance by exhaustive enumeration of the basic feasible
// solutions of the sub-coupling polytope
//   sum_j x_ij = a_i,  sum_i x_ij + s_j = b_j,  x, s >= 0   (|a| <= |b|)
// plus the mass gap. Exponential; meant for supports of size <= 3.
inline double unbalanced_ot_by_vertex_enumeration(std::vector<double> a, std::vector<double> b, Matrix cost) {
    double mass_a = std::accumulate(a.begin(), a.end(), 0.0);
    double mass_b = std::accumulate(b.begin(), b.end(), 0.0);
    if (mass_a > mass_b) {
        std::swap(a, b);
        std::swap(mass_a, mass_b);
        cost = cost.transposed();
    }
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    const double gap = mass_b - mass_a;
    if (m == 0 || mass_a == 0.0) return gap;

    const std::size_t vars = m * n + n;
    const std::size_t rows = m + n;
    std::vector<std::vector<double>> constraint(rows, std::vector<double>(vars, 0.0));
    std::vector<double> rhs(rows);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) constraint[i][i * n + j] = 1.0;
        rhs[i] = a[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) constraint[m + j][i * n + j] = 1.0;
        constraint[m + j][m * n + j] = 1.0;
        rhs[m + j] = b[j];
    }
    std::vector<double> var_cost(vars, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) var_cost[i * n + j] = cost(i, j);

    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> choose(vars, false);
    std::fill(choose.begin(), choose.begin() + static_cast<std::ptrdiff_t>(rows), true);
    do {
        std::vector<std::size_t> basis;
        for (std::size_t v = 0; v < vars; ++v)
            if (choose[v]) basis.push_back(v);
        std::vector<std::vector<double>> sub(rows, std::vector<double>(rows));
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < rows; ++c) sub[r][c] = constraint[r][basis[c]];
        std::vector<double> x;
        if (!solve_linear(sub, rhs, x)) continue;
        if (*std::min_element(x.begin(), x.end()) < -1e-12) continue;
        double value = 0.0;
        for (std::size_t c = 0; c < rows; ++c) value += var_cost[basis[c]] * x[c];
        best = std::min(best, value);
    } while (std::prev_permutation(choose.begin(), choose.end()));
    return best + gap;
}

// Balanced transportation by successive shortest paths with Bellman-Ford on
// the residual graph. Independent of the network simplex.
inline double balanced_ot_by_shortest_paths(std::vector<double> supply, std::vector<double> demand,
                                            const Matrix& cost) {
    const std::size_t m = supply.size();
    const std::size_t n = demand.size();
    Matrix flow(m, n, 0.0);
    const double tiny = 1e-15;
    while (true) {
        // Nodes: sources [0, m), sinks [m, m + n). Multi-source distances.
        const std::size_t nodes = m + n;
        std::vector<double> dist(nodes, std::numeric_limits<double>::infinity());
        std::vector<std::ptrdiff_t> prev(nodes, -1);
        for (std::size_t i = 0; i < m; ++i)
            if (supply[i] > tiny) dist[i] = 0.0;
        for (std::size_t iter = 0; iter < nodes; ++iter) {
            bool changed = false;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (dist[i] + cost(i, j) < dist[m + j] - 1e-15) {
                        dist[m + j] = dist[i] + cost(i, j);
                        prev[m + j] = static_cast<std::ptrdiff_t>(i);
                        changed = true;
                    }
                    if (flow(i, j) > tiny && dist[m + j] - cost(i, j) < dist[i] - 1e-15) {
                        dist[i] = dist[m + j] - cost(i, j);
                        prev[i] = static_cast<std::ptrdiff_t>(m + j);
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        std::ptrdiff_t sink = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (demand[j] > tiny && std::isfinite(dist[m + j]) &&
                (sink < 0 || dist[m + j] < dist[static_cast<std::size_t>(sink)])) {
                sink = static_cast<std::ptrdiff_t>(m + j);
            }
        }
        if (sink < 0) break;
        // Bottleneck along the path.
        double push = demand[static_cast<std::size_t>(sink) - m];
        std::size_t v = static_cast<std::size_t>(sink);
        while (prev[v] >= 0) {
            const std::size_t u = static_cast<std::size_t>(prev[v]);
            if (u >= m) push = std::min(push, flow(v, u - m));  // backward arc sink u -> source v
            v = u;
        }
        push = std::min(push, supply[v]);
        v = static_cast<std::size_t>(sink);
        while (prev[v] >= 0) {
            const std::size_t u = static_cast<std::size_t>(prev[v]);
            if (u < m) {
                flow(u, v - m) += push;
            } else {
                flow(v, u - m) -= push;
            }
            v = u;
        }
        supply[v] -= push;
        demand[static_cast<std::size_t>(sink) - m] -= push;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) total += flow(i, j) * cost(i, j);
    return total;
}

inline bofop::DiscreteMeasure random_measure(bofop::Rng& rng, std::size_t dim, std::size_t atoms, double mass,
                                             double box = 1.0) {
    std::vector<std::vector<double>> pts(atoms, std::vector<double>(dim));
    std::vector<double> w(atoms);
    double total = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
        for (auto& x : pts[i]) x = rng.uniform(-box, box);
        w[i] = rng.uniform(0.05, 1.0);
        total += w[i];
    }
    for (auto& x : w) x *= mass / total;
    return bofop::DiscreteMeasure(dim, std::move(pts), std::move(w));
}


// Unbalanced OT through a zero-cost dummy supply and the shortest-path solver.
inline double unbalanced_ot_by_shortest_paths(std::vector<double> a, std::vector<double> b, Matrix cost) {
    double ma = std::accumulate(a.begin(), a.end(), 0.0);
    double mb = std::accumulate(b.begin(), b.end(), 0.0);
    if (ma > mb) {
        std::swap(a, b);
        std::swap(ma, mb);
        cost = cost.transposed();
    }
    if (mb == 0.0) return 0.0;
    const double gap = mb - ma;
    Matrix padded(a.size() + 1, b.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) padded(i, j) = cost(i, j);
    a.push_back(gap);
    return balanced_ot_by_shortest_paths(a, b, padded) + gap;
}

// Node-level d^L_IDM without hash-consing: every neighbour is its own atom.
// Returns the n1 x n2 table at level `level`.
inline Matrix naive_idm_table(const bofop::FiniteBofopSignal& g1, const bofop::FiniteBofopSignal& g2,
                              std::size_t level) {
    const std::size_t n1 = g1.n();
    const std::size_t n2 = g2.n();
    Matrix t(n1, n2);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < g1.d(); ++c) {
                const double diff = g1.features()(i, c) - g2.features()(j, c);
                s += diff * diff;
            }
            t(i, j) = std::sqrt(s);
        }
    }
    for (std::size_t l = 1; l <= level; ++l) {
        Matrix next(n1, n2);
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                const auto ri = g1.kernel().row(i);
                const auto rj = g2.kernel().row(j);
                next(i, j) = t(i, j) + unbalanced_ot_by_shortest_paths({ri.begin(), ri.end()}, {rj.begin(), rj.end()}, t);
            }
        }
        t = std::move(next);
    }
    return t;
}

// One representative per isomorphism class of simple graphs on `n` vertices,
// as edge lists. Canonical form: the smallest adjacency bitmask over all
// relabellings.
inline std::vector<std::vector<std::pair<std::size_t, std::size_t>>> nonisomorphic_graphs(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) slots.emplace_back(i, j);
    std::vector<std::vector<std::size_t>> perms;
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));

    std::vector<unsigned> seen;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
    for (unsigned mask = 0; mask < (1U << slots.size()); ++mask) {
        unsigned best = ~0U;
        for (const auto& q : perms) {
            unsigned image = 0;
            for (std::size_t s = 0; s < slots.size(); ++s) {
                if (!(mask >> s & 1U)) continue;
                auto a = q[slots[s].first];
                auto b = q[slots[s].second];
                if (a > b) std::swap(a, b);
                const auto pos = static_cast<std::size_t>(
                    std::find(slots.begin(), slots.end(), std::make_pair(a, b)) - slots.begin());
                image |= 1U << pos;
            }
            best = std::min(best, image);
        }
        if (std::find(seen.begin(), seen.end(), best) != seen.end()) continue;
        seen.push_back(best);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t s = 0; s < slots.size(); ++s)
            if (best >> s & 1U) edges.push_back(slots[s]);
        out.push_back(std::move(edges));
    }
    return out;
}

inline std::vector<std::size_t> random_permutation(bofop::Rng& rng, std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
    return p;
}

}  // namespace oracle
