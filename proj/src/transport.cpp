#include "bofop/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bofop {

namespace {

constexpr int kUp = 1;     // tree arc points from node to its parent
constexpr int kDown = -1;  // tree arc points from parent to node

// Network simplex over the complete bipartite graph sources -> sinks plus an
// artificial root joined to every node. Node ids: sources [0, m), sinks
// [m, m + n), root m + n. Arc ids: real arcs i * n + j, artificial arc of
// node u is m * n + u.
class BipartiteNetworkSimplex {
public:
    BipartiteNetworkSimplex(std::span<const double> supply, std::span<const double> demand, const Matrix& cost)
        : m_(supply.size()),
          n_(demand.size()),
          nodes_(m_ + n_),
          root_(nodes_),
          real_arcs_(m_ * n_),
          cost_(cost),
          flow_(real_arcs_ + nodes_, 0.0),
          art_source_(nodes_),
          art_target_(nodes_),
          art_cost_(nodes_),
          parent_(nodes_ + 1),
          pred_(nodes_ + 1),
          dir_(nodes_ + 1),
          depth_(nodes_ + 1),
          pi_(nodes_ + 1),
          stamp_(nodes_ + 1, 0) {
        double max_cost = 0.0;
        for (double c : cost.data()) max_cost = std::max(max_cost, std::abs(c));
        const double big = (max_cost + 1.0) * static_cast<double>(nodes_ + 1);
        eps_ = 1e-13 * big;

        for (std::size_t u = 0; u < nodes_; ++u) {
            const double s = u < m_ ? supply[u] : -demand[u - m_];
            const std::size_t e = real_arcs_ + u;
            parent_[u] = root_;
            pred_[u] = e;
            if (s >= 0.0) {
                dir_[u] = kUp;
                art_source_[u] = u;
                art_target_[u] = root_;
                art_cost_[u] = 0.0;
                flow_[e] = s;
            } else {
                dir_[u] = kDown;
                art_source_[u] = root_;
                art_target_[u] = u;
                art_cost_[u] = big;
                flow_[e] = -s;
            }
        }
        block_ = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
        recompute_tree_values();
    }

    TransportSolution run() {
        TransportSolution out;
        while (true) {
            const std::size_t in = find_entering_arc();
            if (in == kNone) break;
            pivot(in);
            ++out.pivots;
        }
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const double f = flow_[i * n_ + j];
                if (f > 0.0) {
                    out.cost += f * cost_(i, j);
                    out.plan.push_back({i, j, f});
                }
            }
        }
        return out;
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    [[nodiscard]] std::size_t source(std::size_t e) const {
        return e < real_arcs_ ? e / n_ : art_source_[e - real_arcs_];
    }
    [[nodiscard]] std::size_t target(std::size_t e) const {
        return e < real_arcs_ ? m_ + e % n_ : art_target_[e - real_arcs_];
    }
    [[nodiscard]] double arc_cost(std::size_t e) const {
        return e < real_arcs_ ? cost_(e / n_, e % n_) : art_cost_[e - real_arcs_];
    }
    [[nodiscard]] double reduced_cost(std::size_t e) const {
        return cost_(e / n_, e % n_) + pi_[e / n_] - pi_[m_ + e % n_];
    }

    // Block search pricing: scan arcs cyclically, pick the most negative
    // reduced cost within the first block that contains a candidate.
    std::size_t find_entering_arc() {
        if (real_arcs_ == 0) return kNone;
        double best = -eps_;
        std::size_t best_arc = kNone;
        std::size_t scanned_in_block = 0;
        for (std::size_t step = 0; step < real_arcs_; ++step) {
            const std::size_t e = next_arc_;
            next_arc_ = next_arc_ + 1 == real_arcs_ ? 0 : next_arc_ + 1;
            const double rc = reduced_cost(e);
            if (rc < best) {
                best = rc;
                best_arc = e;
            }
            if (++scanned_in_block == block_) {
                if (best_arc != kNone) return best_arc;
                scanned_in_block = 0;
            }
        }
        return best_arc;
    }

    void pivot(std::size_t in) {
        const std::size_t p = source(in);
        const std::size_t q = target(in);

        std::size_t u = p;
        std::size_t v = q;
        while (u != v) {
            if (depth_[u] > depth_[v]) {
                u = parent_[u];
            } else if (depth_[v] > depth_[u]) {
                v = parent_[v];
            } else {
                u = parent_[u];
                v = parent_[v];
            }
        }
        const std::size_t join = u;

        // Cunningham's rule: among blocking arcs take the last one met when
        // walking the cycle from the join node in the direction of flow.
        constexpr double inf = std::numeric_limits<double>::infinity();
        double delta = inf;
        std::size_t u_out = kNone;
        bool out_on_source_side = false;
        for (std::size_t w = p; w != join; w = parent_[w]) {
            if (dir_[w] == kUp && flow_[pred_[w]] < delta) {
                delta = flow_[pred_[w]];
                u_out = w;
                out_on_source_side = true;
            }
        }
        for (std::size_t w = q; w != join; w = parent_[w]) {
            if (dir_[w] == kDown && flow_[pred_[w]] <= delta) {
                delta = flow_[pred_[w]];
                u_out = w;
                out_on_source_side = false;
            }
        }
        if (u_out == kNone) {
            throw std::logic_error("solve_transport: unbounded cycle in uncapacitated transport problem");
        }

        if (delta > 0.0) {
            flow_[in] += delta;
            for (std::size_t w = p; w != join; w = parent_[w]) flow_[pred_[w]] -= dir_[w] * delta;
            for (std::size_t w = q; w != join; w = parent_[w]) flow_[pred_[w]] += dir_[w] * delta;
        }
        flow_[pred_[u_out]] = 0.0;

        // Re-hang the subtree cut off by the leaving arc: reverse the path
        // u_in -> ... -> u_out and attach u_in below v_in through the entering arc.
        const std::size_t u_in = out_on_source_side ? p : q;
        const std::size_t v_in = out_on_source_side ? q : p;
        std::size_t prev_node = v_in;
        std::size_t prev_arc = in;
        int prev_dir = (u_in == source(in)) ? kUp : kDown;
        std::size_t w = u_in;
        while (true) {
            const std::size_t next = parent_[w];
            const std::size_t old_arc = pred_[w];
            const int old_dir = dir_[w];
            parent_[w] = prev_node;
            pred_[w] = prev_arc;
            dir_[w] = prev_dir;
            if (w == u_out) break;
            prev_node = w;
            prev_arc = old_arc;
            prev_dir = -old_dir;
            w = next;
        }
        recompute_tree_values();
    }

    // Depth and potentials from scratch, parents before children. Potentials
    // satisfy pi[target] = pi[source] + cost on every tree arc, pi[root] = 0.
    void recompute_tree_values() {
        ++generation_;
        stamp_[root_] = generation_;
        depth_[root_] = 0;
        pi_[root_] = 0.0;
        path_.clear();
        for (std::size_t start = 0; start < nodes_; ++start) {
            std::size_t x = start;
            while (stamp_[x] != generation_) {
                path_.push_back(x);
                x = parent_[x];
            }
            while (!path_.empty()) {
                const std::size_t y = path_.back();
                path_.pop_back();
                const std::size_t par = parent_[y];
                const double c = arc_cost(pred_[y]);
                depth_[y] = depth_[par] + 1;
                pi_[y] = dir_[y] == kUp ? pi_[par] - c : pi_[par] + c;
                stamp_[y] = generation_;
            }
        }
    }

    std::size_t m_;
    std::size_t n_;
    std::size_t nodes_;
    std::size_t root_;
    std::size_t real_arcs_;
    const Matrix& cost_;
    std::vector<double> flow_;
    std::vector<std::size_t> art_source_;
    std::vector<std::size_t> art_target_;
    std::vector<double> art_cost_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> pred_;
    std::vector<int> dir_;
    std::vector<std::size_t> depth_;
    std::vector<double> pi_;
    std::vector<std::size_t> stamp_;
    std::vector<std::size_t> path_;
    std::size_t generation_ = 0;
    std::size_t block_ = 16;
    std::size_t next_arc_ = 0;
    double eps_ = 0.0;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const Matrix& cost) {
    if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
        throw std::invalid_argument("solve_transport: cost matrix shape does not match supply/demand");
    }
    for (double c : cost.data()) {
        if (!std::isfinite(c)) throw std::invalid_argument("solve_transport: non-finite cost");
    }
    const auto check = [](std::span<const double> xs) {
        for (double x : xs) {
            if (!(x >= 0.0) || !std::isfinite(x)) {
                throw std::invalid_argument("solve_transport: masses must be finite and nonnegative");
            }
        }
    };
    check(supply);
    check(demand);

    const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
    const double scale = std::max({total_supply, total_demand, 1.0});
    if (std::abs(total_supply - total_demand) > 1e-9 * scale) {
        throw std::invalid_argument("solve_transport: unbalanced problem");
    }
    if (total_supply == 0.0 || total_demand == 0.0) return {};

    std::vector<double> adjusted(demand.begin(), demand.end());
    const auto largest = std::max_element(adjusted.begin(), adjusted.end());
    *largest = std::max(0.0, *largest + (total_supply - total_demand));

    BipartiteNetworkSimplex solver(supply, adjusted, cost);
    return solver.run();
}

}  // namespace bofop
