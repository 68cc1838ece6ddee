#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bofop/matrix.hpp"
#include "bofop/signal.hpp"

namespace bofop {

/// Serializable description of a bofop-signal: an undirected edge list plus
/// the aggregation turning it into fiber weights. Operators that are not of
/// that form (the equator graphop) carry an explicit kernel instead.
struct GraphDocument {
    std::size_t n = 0;
    std::vector<WeightedEdge> edges;
    Matrix features;
    Aggregation aggregation = Aggregation::Sum;
    std::optional<std::vector<double>> vertex_weights;
    std::optional<Matrix> kernel;

    [[nodiscard]] FiniteBofopSignal to_signal() const;
};

struct FeatureSpec {
    enum class Kind { Constant, RandomUniform, PerNode };
    Kind kind = Kind::Constant;
    std::vector<double> constant{1.0};  ///< Constant: the value vector (its length is d)
    std::size_t dim = 1;                ///< RandomUniform: d
    Matrix per_node;                    ///< PerNode: n x d
};

struct GeneratorSpec {
    enum class Kind { ErdosRenyi, GraphonSample, Equator, Ring, Complete };
    Kind kind = Kind::Complete;
    std::size_t n = 1;           ///< vertex count (point count m for Equator)
    double p = 0.5;              ///< ErdosRenyi edge probability
    std::string kernel_expr;     ///< GraphonSample kernel W(x, y)
    double band_eps = 0.05;      ///< Equator band half width |<a, b>| <= eps
    Aggregation aggregation = Aggregation::Sum;  ///< ignored by Equator
    FeatureSpec features;
    std::uint64_t seed = 0;
};

[[nodiscard]] std::string_view to_string(GeneratorSpec::Kind kind);
[[nodiscard]] GeneratorSpec::Kind parse_generator_kind(std::string_view name);

struct GeneratedGraph {
    GraphDocument document;
    FiniteBofopSignal signal;
    std::vector<std::string> warnings;
};

/// Samples a bofop-signal. Deterministic in the seed: structure and features
/// are drawn from separate streams derived from it.
///
/// Equator(m, eps) samples m uniform points on the sphere, links a and b when
/// |<a, b>| <= eps and gives each nonempty fiber uniform mass 1/deg(a), so
/// every fiber is a probability measure. The vertex measure is proportional to
/// degree, which makes the operator exactly self-adjoint; isolated points are
/// reported as warnings and keep the mean degree as weight.
///
/// Throws std::invalid_argument for out-of-range parameters or an invalid
/// kernel expression.
[[nodiscard]] GeneratedGraph generate(const GeneratorSpec& spec);

}  // namespace bofop
