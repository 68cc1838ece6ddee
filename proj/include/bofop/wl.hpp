#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "bofop/matrix.hpp"
#include "bofop/signal.hpp"

namespace bofop {

/// One distinct iterated degree measure at some level. Level 0 classes carry a
/// feature vector; a level-j class (j >= 1) carries the level-(j-1) class of the
/// same node (its truncation) and a measure over level-(j-1) classes, stored as
/// (class id, mass) pairs sorted by id.
struct IdmClass {
    std::vector<double> feature;
    std::size_t truncation = 0;
    std::vector<std::pair<std::size_t, double>> measure;

    [[nodiscard]] double mass() const;
};

/// Hash-consed IDMs of every node up to a fixed depth, plus the vertex measure.
///
/// Class ids are canonical: they are assigned by sorting class contents, so
/// they do not depend on the vertex order. Two nodes share a class at level j
/// iff their level-j IDMs agree (features and masses within 1e-12).
struct Didm {
    std::size_t depth = 0;
    std::size_t d = 0;
    std::vector<std::vector<IdmClass>> levels;       ///< levels[j][c]
    std::vector<std::vector<std::size_t>> node_class;  ///< node_class[j][i]
    std::vector<double> node_weights;

    [[nodiscard]] std::size_t n() const noexcept { return node_weights.size(); }
    /// Pushforward of the vertex measure onto level-`level` classes.
    [[nodiscard]] std::vector<double> class_weights(std::size_t level) const;
};

[[nodiscard]] Didm compute_idms(const FiniteBofopSignal& b, std::size_t depth);

/// d^level_IDM between every level-`level` class of `a` and of `b`.
/// Level 0 is the l2 distance of features; level j adds the unbalanced OT
/// between the class measures with the level-(j-1) table as ground cost.
/// Throws std::invalid_argument on feature-dimension mismatch or if `level`
/// exceeds either depth.
[[nodiscard]] Matrix idm_distance_table(const Didm& a, const Didm& b, std::size_t level);

/// d^level_IDM between node `i` of `a` and node `j` of `b`.
[[nodiscard]] double idm_distance(const Didm& a, std::size_t i, const Didm& b, std::size_t j, std::size_t level);

/// Optimal transport between the two DIDMs at depth `depth`, with d^depth_IDM as
/// ground cost.
[[nodiscard]] double didm_movers_distance(const Didm& a, const Didm& b);
[[nodiscard]] double didm_movers_distance(const FiniteBofopSignal& a, const FiniteBofopSignal& b, std::size_t depth);

/// D_0 = 2 sqrt(d), D_j = (1 + r) D_{j-1} + r. Upper bound for d^L_IDM between
/// IDMs of signals with features in [-1, 1]^d and fiber masses at most r.
[[nodiscard]] double idm_diameter_bound(std::size_t d, double r, std::size_t depth);

/// Classical 1-WL color refinement. Colors come from a dictionary shared by
/// every graph refined with the same instance, so histograms are comparable
/// across graphs.
class ColorRefiner {
public:
    /// colors[t][i] is the color of node i after t rounds, t = 0..rounds.
    /// Throws std::invalid_argument unless the kernel takes at most one positive
    /// value and the features are constant.
    std::vector<std::vector<std::size_t>> refine(const FiniteBofopSignal& b, std::size_t rounds);

private:
    std::map<std::pair<std::size_t, std::vector<std::size_t>>, std::size_t> dictionary_;
};

[[nodiscard]] std::vector<std::vector<std::size_t>> classical_wl_partition(const FiniteBofopSignal& b,
                                                                           std::size_t rounds);

/// Sorted color multiset of one refinement round.
[[nodiscard]] std::vector<std::size_t> color_histogram(const std::vector<std::size_t>& colors);

}  // namespace bofop
