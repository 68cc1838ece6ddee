#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bofop/matrix.hpp"

namespace bofop {

/// Atoms closer than this (in max-norm) are merged by canonicalization.
inline constexpr double kAtomMergeTolerance = 1e-12;

/// Finitely supported nonnegative measure on R^dim.
///
/// Atoms are stored row-wise; they need not be distinct. A measure with no
/// atoms (or only zero weights) is the zero measure, which is a valid value:
/// it encodes the empty fiber of an isolated vertex.
class DiscreteMeasure {
public:
    explicit DiscreteMeasure(std::size_t dim = 0) : dim_(dim) {}

    /// Throws std::invalid_argument on shape mismatch, NaN or negative weight.
    DiscreteMeasure(std::size_t dim, std::vector<std::vector<double>> atoms, std::vector<double> weights);

    static DiscreteMeasure dirac(std::vector<double> point, double mass = 1.0);

    void add_atom(std::span<const double> point, double weight);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] bool empty() const noexcept { return weights_.empty(); }

    [[nodiscard]] std::span<const double> atom(std::size_t i) const noexcept {
        return {coords_.data() + i * dim_, dim_};
    }
    [[nodiscard]] double weight(std::size_t i) const noexcept { return weights_[i]; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

    [[nodiscard]] double total_mass() const noexcept;

    /// Integral of a scalar function against the measure.
    [[nodiscard]] double integrate(const std::function<double(std::span<const double>)>& fn) const;

    /// Weighted sum of atoms (not normalized by mass).
    [[nodiscard]] std::vector<double> first_moment() const;

    /// Merges atoms within kAtomMergeTolerance, drops zero weights and sorts
    /// atoms lexicographically. The first atom of a merged cluster (in sorted
    /// order) is the representative, so the result is deterministic.
    [[nodiscard]] DiscreteMeasure canonical(double tolerance = kAtomMergeTolerance) const;

    /// Keeps the coordinates listed in `coords`, in that order.
    [[nodiscard]] DiscreteMeasure project(std::span<const std::size_t> coords) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::vector<double> weights_;
};

/// Equality of two measures up to canonicalization: same atoms within
/// `atom_tol` and same weights within `weight_tol`.
[[nodiscard]] bool equivalent(const DiscreteMeasure& a, const DiscreteMeasure& b,
                              double atom_tol = kAtomMergeTolerance, double weight_tol = 1e-12);

/// Pushforward of `mu` under a map R^dim -> R^p. Weights are preserved.
/// Throws std::invalid_argument if the map's output dimension varies across atoms.
/// `empty_dim` is the dimension reported when `mu` has no atoms.
[[nodiscard]] DiscreteMeasure pushforward_measure(
    const DiscreteMeasure& mu, const std::function<std::vector<double>(std::span<const double>)>& map,
    std::size_t empty_dim = 0);

}  // namespace bofop
