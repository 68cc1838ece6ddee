#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bofop/matrix.hpp"

namespace bofop {

/// How raw edge weights become fiber weights.
enum class Aggregation {
    Sum,               ///< K = W
    NormalizedSum,     ///< K = W / n
    SymmetricAverage,  ///< K = D^{-1/2} W D^{-1/2}, isolated vertices get zero rows
};

[[nodiscard]] std::string_view to_string(Aggregation a);
[[nodiscard]] Aggregation parse_aggregation(std::string_view name);

struct WeightedEdge {
    std::size_t i;
    std::size_t j;
    double weight = 1.0;
};

/// Finite bofop-signal: a base probability measure on n vertices, a kernel
/// whose row i holds the fiber weights of vertex i, and a signal in [-1, 1]^d.
///
/// The constructor checks shapes, finiteness and that the vertex weights form a
/// probability vector. The operator axioms (self-adjointness, positivity) and
/// the feature range are not enforced here; `validate_bofop` reports on them.
class FiniteBofopSignal {
public:
    FiniteBofopSignal() = default;
    FiniteBofopSignal(std::vector<double> vertex_weights, Matrix kernel, Matrix features);

    /// Uniform vertex weights.
    FiniteBofopSignal(Matrix kernel, Matrix features);

    [[nodiscard]] std::size_t n() const noexcept { return kernel_.rows(); }
    [[nodiscard]] std::size_t d() const noexcept { return features_.cols(); }
    [[nodiscard]] const std::vector<double>& vertex_weights() const noexcept { return vertex_weights_; }
    [[nodiscard]] const Matrix& kernel() const noexcept { return kernel_; }
    [[nodiscard]] const Matrix& features() const noexcept { return features_; }

    /// Same operator, new signal (row count must match).
    [[nodiscard]] FiniteBofopSignal with_features(Matrix features) const;

    /// Relabels vertices: vertex v of this signal becomes vertex perm[v].
    [[nodiscard]] FiniteBofopSignal permuted(const std::vector<std::size_t>& perm) const;

private:
    std::vector<double> vertex_weights_;
    Matrix kernel_;
    Matrix features_;
};

/// Builds a bofop-signal from an undirected weighted edge list. Each pair is
/// listed once; a repeated pair with the same weight is ignored, with a
/// different weight it is an error. Throws std::invalid_argument on bad
/// indices, negative weights or a feature row count other than n.
[[nodiscard]] FiniteBofopSignal from_graph(std::size_t n, const std::vector<WeightedEdge>& edges,
                                           Matrix features, Aggregation aggregation,
                                           std::optional<std::vector<double>> vertex_weights = std::nullopt);

/// ||A||_{inf->inf} = max_i sum_j |K[i][j]|, the largest fiber mass.
[[nodiscard]] double infty_norm(const FiniteBofopSignal& b);

/// (A f)(i) = sum_j K[i][j] f(j), channel-wise. Throws on row-count mismatch.
[[nodiscard]] Matrix apply_operator(const FiniteBofopSignal& b, const Matrix& signal);

/// (v, u)_A = sum_i w_i (A v)(i) u(i) for scalar signals.
[[nodiscard]] double bilinear_form(const FiniteBofopSignal& b, const std::vector<double>& v,
                                   const std::vector<double>& u);

struct AxiomCheck {
    bool pass = true;
    double worst_violation = 0.0;
};

struct ValidationReport {
    AxiomCheck self_adjoint;
    AxiomCheck positivity;
    AxiomCheck feature_range;

    [[nodiscard]] bool ok() const noexcept { return self_adjoint.pass && positivity.pass && feature_range.pass; }
};

/// Checks the graphop axioms on the indicator basis: self-adjointness
/// |w_a K[a][b] - w_b K[b][a]|, positivity of K, and features in [-1, 1].
/// Report only; never throws.
[[nodiscard]] ValidationReport validate_bofop(const FiniteBofopSignal& b, double tolerance = 1e-12);

}  // namespace bofop
