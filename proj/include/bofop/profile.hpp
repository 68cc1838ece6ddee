#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bofop/matrix.hpp"
#include "bofop/measure.hpp"
#include "bofop/signal.hpp"

namespace bofop {

/// Atom tolerance for membership in the diagonal subset.
inline constexpr double kDiagonalTolerance = 1e-12;

/// Pushforward of the vertex measure under x -> (v_1..v_k, Av_1..Av_k, f) as a
/// measure on R^{2k+d}. `test_vectors` (n x k) is kept when known.
struct PDistribution {
    std::size_t k = 0;
    std::size_t d = 0;
    DiscreteMeasure measure;
    std::optional<Matrix> test_vectors;
};

enum class ProfileStrategy {
    SignalOnly,  ///< slots cycle through the signal channels, last slot = last channel
    Uniform,     ///< i.i.d. uniform [-1, 1]
    Sign,        ///< i.i.d. random signs
    WlCells,     ///< indicators of randomly chosen IDM classes
    ColorKeyed,  ///< values keyed by the node's IDM class; covariant under relabelling
    Mixed,       ///< member 0 signal only, odd members end in the signal, other slots mixed
};

[[nodiscard]] std::string_view to_string(ProfileStrategy s);
[[nodiscard]] ProfileStrategy parse_profile_strategy(std::string_view name);

struct ProfileSample {
    std::size_t k = 0;
    std::size_t d = 0;
    std::vector<PDistribution> members;  ///< deduplicated up to canonical equivalence
    ProfileStrategy strategy = ProfileStrategy::SignalOnly;
    std::uint64_t seed = 0;
    double source_norm_bound = 0.0;
    /// Set when a diagonal restriction discarded every member.
    bool diagonal_empty = false;

    [[nodiscard]] std::vector<DiscreteMeasure> measures() const;
};

struct SamplingOptions {
    /// Draw the random slots for the unpermuted vertex order, then relabel:
    /// vertex v's entry moves to perm[v]. Signal and class-based slots are
    /// covariant already and are left alone.
    std::optional<std::vector<std::size_t>> permutation;
    /// IDM depth used for the class-based strategies.
    std::size_t class_depth = 2;
};

/// Throws std::invalid_argument if a test vector leaves [-1, 1] or has the
/// wrong length.
[[nodiscard]] PDistribution p_distribution(const FiniteBofopSignal& b, const Matrix& test_vectors);

/// Appends `p` unless an equivalent member is already present.
void add_member(ProfileSample& sample, PDistribution p);

/// N draws of k test vectors each. k = 0 always yields the single feature
/// histogram. Throws std::invalid_argument for count = 0.
[[nodiscard]] ProfileSample sample_k_profile(const FiniteBofopSignal& b, std::size_t k, std::size_t count,
                                             ProfileStrategy strategy, std::uint64_t seed,
                                             const SamplingOptions& options = {});

using SignalMap = std::function<std::vector<double>(std::span<const double>)>;

/// Applies `phi` to the signal block of every atom. `out_dim` is the output
/// dimension p. Throws std::invalid_argument if an output leaves [-1, 1]^p
/// (1e-12 slack).
[[nodiscard]] ProfileSample push_signal(const ProfileSample& s, const SignalMap& phi, std::size_t out_dim);

/// Keeps the members whose last `channels` test slots equal the last
/// `channels` signal coordinates at every atom. Requires channels <= min(k, d).
[[nodiscard]] ProfileSample diagonal_restrict(const ProfileSample& s, std::size_t channels);

/// Diagonal restriction followed by dropping the restricted test slots. The
/// result has order k - channels and signal (A v_restricted, f) of dimension
/// channels + d.
[[nodiscard]] ProfileSample diagonal_marginalize(const ProfileSample& s, std::size_t channels);

struct ActionMetricOptions {
    std::size_t k_max = 4;
    std::size_t samples = 64;
    ProfileStrategy strategy = ProfileStrategy::Mixed;
    std::uint64_t seed = 0;
    SamplingOptions sampling;  ///< applied to the first signal only
};

struct ActionMetricEstimate {
    double value = 0.0;
    std::vector<double> per_k;  ///< Hausdorff distance at each order, before the 2^-k weight
    double tail_bound = 0.0;    ///< bound on the omitted orders k > k_max
    std::size_t k_max = 0;
    std::size_t samples = 0;
    ProfileStrategy strategy = ProfileStrategy::Mixed;
};

/// Truncated action metric sum_{k <= k_max} 2^-k d_H(S_k(b1), S_k(b2)) on
/// sampled profiles, l1 ground. Both signals use the same per-order seed.
[[nodiscard]] ActionMetricEstimate action_metric_estimate(const FiniteBofopSignal& b1, const FiniteBofopSignal& b2,
                                                          const ActionMetricOptions& options = {});

/// 2 * 2^-K ((1 + r)(K + 2) + d): the orders beyond K can add at most this much,
/// each order-k term being bounded by the box diameter 2 (k (1 + r) + d).
[[nodiscard]] double action_tail_bound(std::size_t k_max, double r, std::size_t d);

}  // namespace bofop
