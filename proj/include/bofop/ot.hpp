#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bofop/matrix.hpp"
#include "bofop/measure.hpp"

namespace bofop {

/// Ground cost between atoms of two measures.
class GroundMetric {
public:
    enum class Kind { L1, L2, Recursive };

    static GroundMetric l1() { return GroundMetric(Kind::L1); }
    static GroundMetric l2() { return GroundMetric(Kind::L2); }

    /// Precomputed costs: rows index the atoms of the first measure, columns
    /// the atoms of the second. Entries must be finite and nonnegative.
    static GroundMetric recursive(Matrix costs);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const Matrix& costs() const noexcept { return costs_; }

    /// Cost matrix between the atoms of `mu` and `nu`.
    [[nodiscard]] Matrix cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;

    /// Same ground with rows and columns exchanged.
    [[nodiscard]] GroundMetric transposed() const;

private:
    explicit GroundMetric(Kind kind) : kind_(kind) {}

    Kind kind_;
    Matrix costs_;
};

[[nodiscard]] double l1_distance(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double l2_distance(std::span<const double> a, std::span<const double> b);

/// Unbalanced mover's distance: the lighter measure is transported in full
/// into a sub-measure of the heavier one, plus the mass gap
///
///   OT(mu, nu) = min over sub-couplings of int d dgamma + | |mu| - |nu| |.
///
/// Arguments are swapped when |mu| > |nu|. Two zero measures are at distance 0.
/// Throws std::invalid_argument on dimension mismatch.
[[nodiscard]] double ot_unbalanced(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const GroundMetric& ground);

/// Precomputed-cost form: `cost` has one row per weight in `mu_weights` and one
/// column per weight in `nu_weights`.
[[nodiscard]] double ot_unbalanced(std::span<const double> mu_weights, std::span<const double> nu_weights,
                                   const Matrix& cost);

/// Hausdorff distance between two finite sets of measures with the
/// unbalanced mover's distance as base metric. Throws on empty sets.
[[nodiscard]] double hausdorff_set_distance(std::span<const DiscreteMeasure> set_a,
                                            std::span<const DiscreteMeasure> set_b, const GroundMetric& ground);

/// Hausdorff distance from a precomputed |A| x |B| distance table.
[[nodiscard]] double hausdorff_from_table(const Matrix& distances);

/// int f dmu - int f dnu for a caller-certified 1-Lipschitz f. Balanced inputs only
/// (relative mass tolerance 1e-12); this never exceeds the W1 distance.
[[nodiscard]] double kr_lower_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    const std::function<double(std::span<const double>)>& test_fn);

/// Diameter bound for W1 (l1 ground) between probability measures on the box
/// prod_i [-half_widths[i], half_widths[i]]: sum_i 2 * half_widths[i]. With all
/// half widths equal to c this is 2 n c.
[[nodiscard]] double wasserstein_box_diameter(std::span<const double> half_widths);

}  // namespace bofop
