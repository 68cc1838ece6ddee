#include "bofop/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bofop/expression.hpp"
#include "bofop/rng.hpp"

namespace bofop {

FiniteBofopSignal GraphDocument::to_signal() const {
    if (kernel) {
        if (vertex_weights) return FiniteBofopSignal(*vertex_weights, *kernel, features);
        return FiniteBofopSignal(*kernel, features);
    }
    return from_graph(n, edges, features, aggregation, vertex_weights);
}

std::string_view to_string(GeneratorSpec::Kind kind) {
    switch (kind) {
        case GeneratorSpec::Kind::ErdosRenyi: return "erdos_renyi";
        case GeneratorSpec::Kind::GraphonSample: return "graphon_sample";
        case GeneratorSpec::Kind::Equator: return "equator";
        case GeneratorSpec::Kind::Ring: return "ring";
        case GeneratorSpec::Kind::Complete: return "complete";
    }
    return "complete";
}

GeneratorSpec::Kind parse_generator_kind(std::string_view name) {
    using K = GeneratorSpec::Kind;
    for (K k : {K::ErdosRenyi, K::GraphonSample, K::Equator, K::Ring, K::Complete}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown generator kind '" + std::string(name) + "'");
}

namespace {

constexpr std::uint64_t kStructureStream = 1;
constexpr std::uint64_t kFeatureStream = 2;

Matrix make_features(const FeatureSpec& spec, std::size_t n, std::uint64_t seed) {
    switch (spec.kind) {
        case FeatureSpec::Kind::Constant: {
            Matrix f(n, spec.constant.size());
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < spec.constant.size(); ++c) f(i, c) = spec.constant[c];
            return f;
        }
        case FeatureSpec::Kind::RandomUniform: {
            Rng rng(derive_seed(seed, kFeatureStream));
            Matrix f(n, spec.dim);
            for (double& x : f.data()) x = rng.uniform(-1.0, 1.0);
            return f;
        }
        case FeatureSpec::Kind::PerNode:
            if (spec.per_node.rows() != n) {
                throw std::invalid_argument("generate: per-node feature list has " +
                                            std::to_string(spec.per_node.rows()) + " rows, expected " +
                                            std::to_string(n));
            }
            return spec.per_node;
    }
    return {};
}

void validate(const GeneratorSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("generate: n must be at least 1");
    if (spec.kind == GeneratorSpec::Kind::ErdosRenyi && !(spec.p >= 0.0 && spec.p <= 1.0)) {
        throw std::invalid_argument("generate: edge probability must lie in [0, 1]");
    }
    if (spec.kind == GeneratorSpec::Kind::Equator && !(spec.band_eps > 0.0 && spec.band_eps < 1.0)) {
        throw std::invalid_argument("generate: band_eps must lie in (0, 1)");
    }
    if (spec.features.kind == FeatureSpec::Kind::Constant) {
        for (double x : spec.features.constant) {
            if (std::abs(x) > 1.0) throw std::invalid_argument("generate: constant feature outside [-1, 1]");
        }
    }
}

GeneratedGraph equator(const GeneratorSpec& spec, Matrix features) {
    const std::size_t m = spec.n;
    Rng rng(derive_seed(spec.seed, kStructureStream));
    std::vector<std::array<double, 3>> pts(m);
    for (auto& p : pts) {
        const double z = rng.uniform(-1.0, 1.0);
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        p = {r * std::cos(theta), r * std::sin(theta), z};
    }

    GeneratedGraph out;
    std::vector<double> degree(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const double dot = pts[a][0] * pts[b][0] + pts[a][1] * pts[b][1] + pts[a][2] * pts[b][2];
            if (std::abs(dot) <= spec.band_eps) {
                out.document.edges.push_back({a, b, 1.0});
                degree[a] += 1.0;
                degree[b] += 1.0;
            }
        }
    }

    Matrix kernel(m, m, 0.0);
    for (const auto& e : out.document.edges) {
        kernel(e.i, e.j) = 1.0 / degree[e.i];
        kernel(e.j, e.i) = 1.0 / degree[e.j];
    }

    std::size_t isolated = 0;
    double degree_sum = 0.0;
    for (double dg : degree) {
        if (dg == 0.0) ++isolated;
        degree_sum += dg;
    }
    const double mean_positive = isolated == m ? 1.0 : degree_sum / static_cast<double>(m - isolated);
    std::vector<double> weights(m);
    double total = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        weights[a] = degree[a] > 0.0 ? degree[a] : mean_positive;
        total += weights[a];
    }
    for (double& w : weights) w /= total;
    if (isolated == m) {
        out.warnings.push_back("equator: m = " + std::to_string(m) + " is too small for band_eps = " +
                               std::to_string(spec.band_eps) + "; every band is empty");
    } else if (isolated > 0) {
        out.warnings.push_back("equator: " + std::to_string(isolated) + " of " + std::to_string(m) +
                               " points have an empty band");
    }

    out.document.n = m;
    out.document.features = std::move(features);
    out.document.vertex_weights = weights;
    out.document.kernel = kernel;
    out.signal = FiniteBofopSignal(std::move(weights), std::move(kernel), out.document.features);
    return out;
}

}  // namespace

GeneratedGraph generate(const GeneratorSpec& spec) {
    validate(spec);
    Matrix features = make_features(spec.features, spec.n, spec.seed);
    if (spec.kind == GeneratorSpec::Kind::Equator) return equator(spec, std::move(features));

    const std::size_t n = spec.n;
    Rng rng(derive_seed(spec.seed, kStructureStream));
    GeneratedGraph out;
    auto& edges = out.document.edges;
    switch (spec.kind) {
        case GeneratorSpec::Kind::Complete:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
            break;
        case GeneratorSpec::Kind::Ring:
            if (n == 2) {
                edges.push_back({0, 1, 1.0});
            } else if (n > 2) {
                for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
            }
            break;
        case GeneratorSpec::Kind::ErdosRenyi:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (rng.bernoulli(spec.p)) edges.push_back({i, j, 1.0});
            break;
        case GeneratorSpec::Kind::GraphonSample: {
            const KernelExpression w = KernelExpression::parse(spec.kernel_expr);
            std::vector<double> latent(n);
            for (double& u : latent) u = rng.uniform01();
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double prob = w(latent[i], latent[j]);
                    if (!(prob >= 0.0 && prob <= 1.0)) {
                        throw std::invalid_argument("generate: kernel '" + spec.kernel_expr + "' evaluates to " +
                                                    std::to_string(prob) + ", outside [0, 1]");
                    }
                    if (rng.bernoulli(prob)) edges.push_back({i, j, 1.0});
                }
            }
            break;
        }
        case GeneratorSpec::Kind::Equator:
            break;
    }
    out.document.n = n;
    out.document.features = std::move(features);
    out.document.aggregation = spec.aggregation;
    out.signal = out.document.to_signal();
    return out;
}

}  // namespace bofop
