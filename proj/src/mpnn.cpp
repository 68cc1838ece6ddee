#include "bofop/mpnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "bofop/ot.hpp"
#include "bofop/rng.hpp"

namespace bofop {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Clamp: return "clamp";
        case Activation::Tanh: return "tanh";
    }
    return "identity";
}

Activation parse_activation(std::string_view name) {
    if (name == "identity") return Activation::Identity;
    if (name == "clamp") return Activation::Clamp;
    if (name == "tanh") return Activation::Tanh;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

AffineMap::AffineMap(Matrix weights, std::vector<double> bias, std::vector<Activation> activations)
    : weights_(std::move(weights)), bias_(std::move(bias)), activations_(std::move(activations)) {
    if (bias_.size() != weights_.rows() || activations_.size() != weights_.rows()) {
        throw std::invalid_argument("AffineMap: bias and activation counts must equal the output dimension");
    }
    double norm1 = 0.0;
    double norm_inf = 0.0;
    for (std::size_t c = 0; c < weights_.cols(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < weights_.rows(); ++r) s += std::abs(weights_(r, c));
        norm1 = std::max(norm1, s);
    }
    for (std::size_t r = 0; r < weights_.rows(); ++r) {
        double s = 0.0;
        for (double x : weights_.row(r)) s += std::abs(x);
        norm_inf = std::max(norm_inf, s);
    }
    for (double x : weights_.data()) {
        if (!std::isfinite(x)) throw std::invalid_argument("AffineMap: non-finite weight");
    }
    for (double x : bias_) {
        if (!std::isfinite(x)) throw std::invalid_argument("AffineMap: non-finite bias");
    }
    lipschitz_ = std::max(norm1, std::sqrt(norm1 * norm_inf));
}

AffineMap::AffineMap(Matrix weights, std::vector<double> bias, Activation activation)
    : AffineMap(weights, std::move(bias), std::vector<Activation>(weights.rows(), activation)) {}

AffineMap AffineMap::identity(std::size_t dim) {
    Matrix w(dim, dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) w(i, i) = 1.0;
    return AffineMap(std::move(w), std::vector<double>(dim, 0.0), Activation::Identity);
}

std::vector<double> AffineMap::operator()(std::span<const double> x) const {
    if (x.size() != in_dim()) {
        throw std::invalid_argument("AffineMap: input has dimension " + std::to_string(x.size()) + ", expected " +
                                    std::to_string(in_dim()));
    }
    std::vector<double> y(out_dim());
    for (std::size_t r = 0; r < out_dim(); ++r) {
        double s = bias_[r];
        const auto row = weights_.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * x[c];
        switch (activations_[r]) {
            case Activation::Identity: break;
            case Activation::Clamp: s = std::clamp(s, -1.0, 1.0); break;
            case Activation::Tanh: s = std::tanh(s); break;
        }
        y[r] = s;
    }
    return y;
}

bool AffineMap::range_certified() const {
    for (std::size_t r = 0; r < out_dim(); ++r) {
        if (activations_[r] != Activation::Identity) continue;
        double s = std::abs(bias_[r]);
        for (double x : weights_.row(r)) s += std::abs(x);
        if (s > 1.0 + 1e-12) return false;
    }
    return true;
}

std::vector<std::size_t> MpnnModel::hidden_dims() const {
    std::vector<std::size_t> dims{phi0.out_dim()};
    for (const auto& l : layers) dims.push_back(l.out_dim());
    return dims;
}

double MpnnModel::lipschitz_bound() const {
    double best = std::max(phi0.lipschitz(), readout.lipschitz());
    for (const auto& l : layers) best = std::max(best, l.lipschitz());
    return best;
}

void MpnnModel::validate() const {
    if (!phi0.range_certified()) throw std::invalid_argument("MpnnModel: phi0 output range is not within [-1, 1]");
    std::size_t prev = phi0.out_dim();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].in_dim() != 2 * prev) {
            throw std::invalid_argument("MpnnModel: layer " + std::to_string(l + 1) + " expects input dimension " +
                                        std::to_string(2 * prev) + ", has " + std::to_string(layers[l].in_dim()));
        }
        for (Activation a : layers[l].activations()) {
            if (a == Activation::Identity) {
                throw std::invalid_argument("MpnnModel: layer " + std::to_string(l + 1) +
                                            " uses an identity activation; hidden range cannot be certified");
            }
        }
        prev = layers[l].out_dim();
    }
    if (readout.in_dim() != prev) throw std::invalid_argument("MpnnModel: readout input dimension mismatch");
}

namespace {

Matrix map_rows(const AffineMap& phi, const Matrix& x) {
    Matrix out(x.rows(), phi.out_dim());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto y = phi(x.row(i));
        std::copy(y.begin(), y.end(), out.row(i).begin());
    }
    return out;
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::copy(a.row(i).begin(), a.row(i).end(), out.row(i).begin());
        std::copy(b.row(i).begin(), b.row(i).end(), out.row(i).begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

}  // namespace

ForwardResult forward_bofop(const MpnnModel& model, const FiniteBofopSignal& b) {
    model.validate();
    if (b.d() != model.input_dim()) {
        throw std::invalid_argument("forward_bofop: signal dimension " + std::to_string(b.d()) +
                                    " does not match model input " + std::to_string(model.input_dim()));
    }
    ForwardResult out;
    out.hidden.push_back(map_rows(model.phi0, b.features()));
    for (const auto& layer : model.layers) {
        const Matrix& h = out.hidden.back();
        out.hidden.push_back(map_rows(layer, concat_cols(h, apply_operator(b, h))));
    }
    const Matrix& last = out.hidden.back();
    std::vector<double> mean(last.cols(), 0.0);
    for (std::size_t i = 0; i < b.n(); ++i)
        for (std::size_t c = 0; c < last.cols(); ++c) mean[c] += b.vertex_weights()[i] * last(i, c);
    out.readout = model.readout(mean);
    return out;
}

ForwardResult forward_idm(const MpnnModel& model, const Didm& didm) {
    model.validate();
    if (didm.d != model.input_dim()) throw std::invalid_argument("forward_idm: feature dimension mismatch");
    if (didm.depth < model.depth()) {
        throw std::invalid_argument("forward_idm: IDM depth " + std::to_string(didm.depth) + " is below model depth " +
                                    std::to_string(model.depth()));
    }
    ForwardResult out;
    const auto& level0 = didm.levels[0];
    Matrix h0(level0.size(), model.phi0.out_dim());
    for (std::size_t c = 0; c < level0.size(); ++c) {
        const auto y = model.phi0(level0[c].feature);
        std::copy(y.begin(), y.end(), h0.row(c).begin());
    }
    out.hidden.push_back(std::move(h0));
    for (std::size_t l = 1; l <= model.depth(); ++l) {
        const Matrix& prev = out.hidden.back();
        const auto& classes = didm.levels[l];
        const auto& layer = model.layers[l - 1];
        Matrix h(classes.size(), layer.out_dim());
        std::vector<double> input(2 * prev.cols());
        for (std::size_t c = 0; c < classes.size(); ++c) {
            std::fill(input.begin(), input.end(), 0.0);
            std::copy(prev.row(classes[c].truncation).begin(), prev.row(classes[c].truncation).end(), input.begin());
            for (const auto& [id, w] : classes[c].measure)
                for (std::size_t t = 0; t < prev.cols(); ++t) input[prev.cols() + t] += w * prev(id, t);
            const auto y = layer(input);
            std::copy(y.begin(), y.end(), h.row(c).begin());
        }
        out.hidden.push_back(std::move(h));
    }
    const Matrix& last = out.hidden.back();
    const auto weights = didm.class_weights(model.depth());
    std::vector<double> mean(last.cols(), 0.0);
    for (std::size_t c = 0; c < last.rows(); ++c)
        for (std::size_t t = 0; t < last.cols(); ++t) mean[t] += weights[c] * last(c, t);
    out.readout = model.readout(mean);
    return out;
}

ProfileSample hidden_signal_profile(const MpnnModel& model, const FiniteBofopSignal& b, std::size_t extra_slots,
                                    std::uint64_t seed) {
    const ForwardResult fwd = forward_bofop(model, b);
    const auto dims = model.hidden_dims();
    std::size_t k = extra_slots;
    for (std::size_t l = 0; l < model.depth(); ++l) k += dims[l];
    Matrix v(b.n(), k);
    Rng rng(seed);
    for (std::size_t s = 0; s < extra_slots; ++s)
        for (std::size_t i = 0; i < b.n(); ++i) v(i, s) = rng.uniform(-1.0, 1.0);
    // Slots after the random prefix: h_{L-1}, ..., h_0, so that h_0 ends up last.
    std::size_t col = extra_slots;
    for (std::size_t l = model.depth(); l-- > 0;) {
        for (std::size_t c = 0; c < dims[l]; ++c, ++col)
            for (std::size_t i = 0; i < b.n(); ++i) v(i, col) = fwd.hidden[l](i, c);
    }
    ProfileSample s;
    s.k = k;
    s.d = b.d();
    s.strategy = ProfileStrategy::SignalOnly;
    s.seed = seed;
    s.source_norm_bound = infty_norm(b);
    add_member(s, p_distribution(b, v));
    return s;
}

std::vector<double> forward_profile(const MpnnModel& model, const ProfileSample& sample) {
    model.validate();
    if (sample.d != model.input_dim()) throw std::invalid_argument("forward_profile: signal dimension mismatch");
    const auto dims = model.hidden_dims();
    const std::size_t needed = std::accumulate(dims.begin(), dims.end() - 1, std::size_t{0});
    if (sample.k < needed) {
        throw std::invalid_argument("forward_profile: order " + std::to_string(sample.k) + " is below the " +
                                    std::to_string(needed) + " slots the model needs");
    }

    const auto& phi0 = model.phi0;
    ProfileSample s = push_signal(sample, [&](std::span<const double> y) { return phi0(y); }, dims[0]);
    for (std::size_t l = 1; l <= model.depth(); ++l) {
        const std::size_t prev = dims[l - 1];
        s = diagonal_marginalize(s, prev);
        // The marginalized signal is (A h, h); the update takes (h, A h).
        const auto& layer = model.layers[l - 1];
        s = push_signal(
            s,
            [&](std::span<const double> y) {
                std::vector<double> swapped(y.begin() + static_cast<std::ptrdiff_t>(prev), y.end());
                swapped.insert(swapped.end(), y.begin(), y.begin() + static_cast<std::ptrdiff_t>(prev));
                return layer(swapped);
            },
            dims[l]);
    }
    if (s.members.empty()) throw std::invalid_argument("forward_profile: no member lies on the diagonal");

    std::vector<std::size_t> tail(dims.back());
    std::iota(tail.begin(), tail.end(), 2 * s.k);
    std::vector<DiscreteMeasure> finals;
    for (const auto& m : s.members) finals.push_back(m.measure.project(tail).canonical());
    double spread = 0.0;
    for (std::size_t i = 1; i < finals.size(); ++i) {
        spread = std::max(spread, ot_unbalanced(finals[0], finals[i], GroundMetric::l1()));
    }
    if (spread > 1e-9) {
        std::ostringstream msg;
        msg << "forward_profile: final signal distribution is not unique (spread " << spread << ")";
        throw std::invalid_argument(msg.str());
    }
    return model.readout(finals[0].first_moment());
}

MpnnModel reduce_message_model(const AlternativeMpnnModel& alt) {
    if (alt.updates.size() != alt.messages.size()) {
        throw std::invalid_argument("reduce_message_model: one message map per update is required");
    }
    MpnnModel out;
    out.phi0 = alt.phi0;
    out.readout = alt.readout;
    std::size_t d = alt.phi0.out_dim();
    for (std::size_t t = 0; t < alt.updates.size(); ++t) {
        const AffineMap& msg = alt.messages[t];
        const AffineMap& upd = alt.updates[t];
        if (msg.in_dim() != d) {
            throw std::invalid_argument("reduce_message_model: message map " + std::to_string(t + 1) +
                                        " must act on the hidden state alone (dimension " + std::to_string(d) + ")");
        }
        if (!msg.range_certified()) {
            throw std::invalid_argument("reduce_message_model: message map range is not within [-1, 1]");
        }
        const std::size_t p = msg.out_dim();
        if (upd.in_dim() != d + p) throw std::invalid_argument("reduce_message_model: update input dimension mismatch");

        // (h, A h) -> (h, msg(h)); clamping h is exact since h is in [-1, 1].
        Matrix w1(d + p, 2 * d, 0.0);
        std::vector<double> b1(d + p, 0.0);
        std::vector<Activation> a1(d + p, Activation::Clamp);
        for (std::size_t i = 0; i < d; ++i) w1(i, i) = 1.0;
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t c = 0; c < d; ++c) w1(d + r, c) = msg.weights()(r, c);
            b1[d + r] = msg.bias()[r];
            a1[d + r] = msg.activations()[r] == Activation::Identity ? Activation::Clamp : msg.activations()[r];
        }
        out.layers.emplace_back(std::move(w1), std::move(b1), std::move(a1));

        // ((h, m), A (h, m)) -> upd(h, A m).
        Matrix w2(upd.out_dim(), 2 * (d + p), 0.0);
        for (std::size_t r = 0; r < upd.out_dim(); ++r) {
            for (std::size_t c = 0; c < d; ++c) w2(r, c) = upd.weights()(r, c);
            for (std::size_t c = 0; c < p; ++c) w2(r, d + p + d + c) = upd.weights()(r, d + c);
        }
        out.layers.emplace_back(std::move(w2), upd.bias(), upd.activations());
        d = upd.out_dim();
    }
    out.validate();
    return out;
}

double lipschitz_certificate(const MpnnModel& model, double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("lipschitz_certificate: r must be finite and >= 0");
    const auto dims = model.hidden_dims();
    double c = model.phi0.lipschitz();
    for (std::size_t l = 1; l <= model.depth(); ++l) {
        c *= model.layers[l - 1].lipschitz() * std::pow(2.0 + r, static_cast<double>(dims[l - 1]));
    }
    return c * model.readout.lipschitz();
}

namespace {

AffineMap random_map(Rng& rng, std::size_t in, std::size_t out, double scale, bool allow_identity) {
    Matrix w(out, in);
    const double bound = scale / static_cast<double>(std::max<std::size_t>(1, out));
    for (double& x : w.data()) x = rng.uniform(-bound, bound);
    std::vector<double> b(out);
    for (double& x : b) x = rng.uniform(-0.25, 0.25);
    std::vector<Activation> acts(out);
    for (auto& a : acts) {
        const auto pick = rng.below(allow_identity ? 3 : 2);
        a = pick == 0 ? Activation::Tanh : pick == 1 ? Activation::Clamp : Activation::Identity;
    }
    return AffineMap(std::move(w), std::move(b), std::move(acts));
}

}  // namespace

MpnnModel random_model(const std::vector<std::size_t>& dims, std::size_t out_dim, std::uint64_t seed, double scale) {
    if (dims.size() < 2) throw std::invalid_argument("random_model: need at least the input and d_0");
    Rng rng(seed);
    MpnnModel m;
    m.phi0 = random_map(rng, dims[0], dims[1], scale, false);
    for (std::size_t l = 2; l < dims.size(); ++l) m.layers.push_back(random_map(rng, 2 * dims[l - 1], dims[l], scale, false));
    m.readout = random_map(rng, dims.back(), out_dim, scale, true);
    m.validate();
    return m;
}

}  // namespace bofop
