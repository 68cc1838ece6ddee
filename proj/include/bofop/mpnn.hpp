#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bofop/matrix.hpp"
#include "bofop/profile.hpp"
#include "bofop/signal.hpp"
#include "bofop/wl.hpp"

namespace bofop {

enum class Activation {
    Identity,  ///< only where the output range can be certified
    Clamp,     ///< clamp to [-1, 1]
    Tanh,
};

[[nodiscard]] std::string_view to_string(Activation a);
[[nodiscard]] Activation parse_activation(std::string_view name);

/// x -> act(W x + b), one activation per output coordinate. All activations
/// are 1-Lipschitz, so the map's Lipschitz constant is bounded by the norms of W.
class AffineMap {
public:
    AffineMap() = default;
    AffineMap(Matrix weights, std::vector<double> bias, std::vector<Activation> activations);
    /// Same activation on every output.
    AffineMap(Matrix weights, std::vector<double> bias, Activation activation);

    static AffineMap identity(std::size_t dim);

    [[nodiscard]] std::size_t in_dim() const noexcept { return weights_.cols(); }
    [[nodiscard]] std::size_t out_dim() const noexcept { return weights_.rows(); }
    [[nodiscard]] const Matrix& weights() const noexcept { return weights_; }
    [[nodiscard]] const std::vector<double>& bias() const noexcept { return bias_; }
    [[nodiscard]] const std::vector<Activation>& activations() const noexcept { return activations_; }

    [[nodiscard]] std::vector<double> operator()(std::span<const double> x) const;

    /// max(||W||_{1->1}, sqrt(||W||_{1->1} ||W||_{inf->inf})): a Lipschitz
    /// constant for both the l1 and the l2 norm.
    [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }

    /// True if every output lies in [-1, 1] whenever the input lies in [-1, 1]^in.
    [[nodiscard]] bool range_certified() const;

private:
    Matrix weights_;
    std::vector<double> bias_;
    std::vector<Activation> activations_;
    double lipschitz_ = 0.0;
};

/// h_0 = phi0(f); h_l = layers[l-1](h_{l-1}, A h_{l-1}); readout psi(sum_i w_i h_L(i)).
struct MpnnModel {
    AffineMap phi0;
    std::vector<AffineMap> layers;
    AffineMap readout;

    [[nodiscard]] std::size_t depth() const noexcept { return layers.size(); }
    [[nodiscard]] std::size_t input_dim() const noexcept { return phi0.in_dim(); }
    /// d_0 .. d_L.
    [[nodiscard]] std::vector<std::size_t> hidden_dims() const;
    /// Largest stored Lipschitz constant.
    [[nodiscard]] double lipschitz_bound() const;

    /// Checks the dimension chain and that hidden signals stay in [-1, 1]:
    /// phi0 must be range-certified and layers may not use Identity (their
    /// aggregated inputs are only bounded by the operator norm). Throws
    /// std::invalid_argument otherwise.
    void validate() const;
};

struct ForwardResult {
    std::vector<Matrix> hidden;  ///< h_0 .. h_L, or per-class values for the IDM route
    std::vector<double> readout;
};

[[nodiscard]] ForwardResult forward_bofop(const MpnnModel& model, const FiniteBofopSignal& b);

/// Evaluates the model on IDM classes; hidden[l] has one row per level-l class.
/// Throws std::invalid_argument if the DIDM depth is below the model depth.
[[nodiscard]] ForwardResult forward_idm(const MpnnModel& model, const Didm& didm);

/// Profile sample of order sum_{l<L} d_l whose single member carries the
/// hidden signals (h_{L-1}, ..., h_0) as test vectors, preceded by
/// `extra_slots` uniform random vectors.
[[nodiscard]] ProfileSample hidden_signal_profile(const MpnnModel& model, const FiniteBofopSignal& b,
                                                  std::size_t extra_slots = 0, std::uint64_t seed = 0);

/// Alternates signal pushforward and diagonal marginalization, then reads out
/// from the final signal distribution. Throws std::invalid_argument if the
/// order is too small, the dimension does not match, or the surviving members
/// disagree on the final signal distribution.
[[nodiscard]] std::vector<double> forward_profile(const MpnnModel& model, const ProfileSample& sample);

/// h_t = updates[t-1](h_{t-1}, A messages[t-1](h_{t-1})).
struct AlternativeMpnnModel {
    AffineMap phi0;
    std::vector<AffineMap> updates;
    std::vector<AffineMap> messages;
    AffineMap readout;
};

/// Equivalent 2L-layer model: each layer first appends the message to the
/// state, then aggregates and applies the update. Throws std::invalid_argument
/// if a message map does not act on the previous hidden dimension or its range
/// is not certified.
[[nodiscard]] MpnnModel reduce_message_model(const AlternativeMpnnModel& alt);

/// L_phi0 * prod_{l=1..L} [L_phi_l (2 + r)^{d_{l-1}}] * L_psi.
[[nodiscard]] double lipschitz_certificate(const MpnnModel& model, double r);

/// Model with random weights. `dims` lists d, d_0, .., d_L; every map uses
/// tanh or clamp and weights of l1 column norm about `scale`.
[[nodiscard]] MpnnModel random_model(const std::vector<std::size_t>& dims, std::size_t out_dim, std::uint64_t seed,
                                     double scale = 1.0);

}  // namespace bofop
