#include "bofop/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bofop/ot.hpp"
#include "bofop/rng.hpp"
#include "bofop/wl.hpp"

namespace bofop {

std::string_view to_string(ProfileStrategy s) {
    switch (s) {
        case ProfileStrategy::SignalOnly: return "signal_only";
        case ProfileStrategy::Uniform: return "uniform";
        case ProfileStrategy::Sign: return "sign";
        case ProfileStrategy::WlCells: return "wl_cells";
        case ProfileStrategy::ColorKeyed: return "color_keyed";
        case ProfileStrategy::Mixed: return "mixed";
    }
    return "mixed";
}

ProfileStrategy parse_profile_strategy(std::string_view name) {
    using S = ProfileStrategy;
    for (S s : {S::SignalOnly, S::Uniform, S::Sign, S::WlCells, S::ColorKeyed, S::Mixed}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown profile strategy '" + std::string(name) + "'");
}

std::vector<DiscreteMeasure> ProfileSample::measures() const {
    std::vector<DiscreteMeasure> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.measure);
    return out;
}

PDistribution p_distribution(const FiniteBofopSignal& b, const Matrix& test_vectors) {
    const std::size_t n = b.n();
    if (test_vectors.rows() != n) {
        throw std::invalid_argument("p_distribution: test vectors have " + std::to_string(test_vectors.rows()) +
                                    " rows, expected " + std::to_string(n));
    }
    for (double x : test_vectors.data()) {
        if (!(std::abs(x) <= 1.0)) throw std::invalid_argument("p_distribution: test vector entry outside [-1, 1]");
    }
    const std::size_t k = test_vectors.cols();
    const std::size_t d = b.d();
    const Matrix av = apply_operator(b, test_vectors);
    DiscreteMeasure mu(2 * k + d);
    std::vector<double> atom(2 * k + d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < k; ++s) {
            atom[s] = test_vectors(i, s);
            atom[k + s] = av(i, s);
        }
        for (std::size_t c = 0; c < d; ++c) atom[2 * k + c] = b.features()(i, c);
        mu.add_atom(atom, b.vertex_weights()[i]);
    }
    return PDistribution{k, d, mu.canonical(), test_vectors};
}

void add_member(ProfileSample& sample, PDistribution p) {
    for (const auto& m : sample.members) {
        if (equivalent(m.measure, p.measure)) return;
    }
    sample.members.push_back(std::move(p));
}

namespace {

enum class Slot { Uniform, Sign, WlCell, ColorKeyed, Signal };

class Drawer {
public:
    Drawer(const FiniteBofopSignal& b, const SamplingOptions& options, bool needs_classes)
        : b_(b), options_(options) {
        if (options.permutation && options.permutation->size() != b.n()) {
            throw std::invalid_argument("sample_k_profile: permutation size mismatch");
        }
        if (needs_classes) {
            const Didm didm = compute_idms(b, options.class_depth);
            classes_ = didm.node_class.back();
            class_count_ = didm.levels.back().size();
        }
    }

    // Writes column `s` of `v`. `channel` is only read for signal slots.
    void fill(Matrix& v, std::size_t s, Slot kind, std::size_t channel, Rng& rng, std::uint64_t member_seed) const {
        const std::size_t n = b_.n();
        switch (kind) {
            case Slot::Uniform:
            case Slot::Sign: {
                std::vector<double> raw(n);
                for (double& x : raw) x = kind == Slot::Uniform ? rng.uniform(-1.0, 1.0) : rng.sign();
                for (std::size_t i = 0; i < n; ++i) v(relabel(i), s) = raw[i];
                break;
            }
            case Slot::WlCell: {
                const std::size_t cell = rng.below(class_count_);
                for (std::size_t i = 0; i < n; ++i) v(i, s) = classes_[i] == cell ? 1.0 : 0.0;
                break;
            }
            case Slot::ColorKeyed: {
                const std::uint64_t slot_seed = derive_seed(member_seed, s);
                for (std::size_t i = 0; i < n; ++i) v(i, s) = Rng(derive_seed(slot_seed, classes_[i])).uniform(-1.0, 1.0);
                break;
            }
            case Slot::Signal:
                for (std::size_t i = 0; i < n; ++i) v(i, s) = b_.d() == 0 ? 1.0 : b_.features()(i, channel);
                break;
        }
    }

private:
    [[nodiscard]] std::size_t relabel(std::size_t i) const { return options_.permutation ? (*options_.permutation)[i] : i; }

    const FiniteBofopSignal& b_;
    const SamplingOptions& options_;
    std::vector<std::size_t> classes_;
    std::size_t class_count_ = 0;
};

// Signal channel for slot s of k so that slot k - 1 carries channel d - 1.
std::size_t signal_channel(std::size_t s, std::size_t k, std::size_t d) {
    if (d == 0) return 0;
    return (s % d + d - k % d) % d;
}

}  // namespace

ProfileSample sample_k_profile(const FiniteBofopSignal& b, std::size_t k, std::size_t count,
                               ProfileStrategy strategy, std::uint64_t seed, const SamplingOptions& options) {
    if (count == 0) throw std::invalid_argument("sample_k_profile: count must be at least 1");
    ProfileSample out;
    out.k = k;
    out.d = b.d();
    out.strategy = strategy;
    out.seed = seed;
    out.source_norm_bound = infty_norm(b);
    const std::size_t n = b.n();
    if (k == 0) {
        add_member(out, p_distribution(b, Matrix(n, 0)));
        return out;
    }

    const bool needs_classes = strategy == ProfileStrategy::WlCells || strategy == ProfileStrategy::ColorKeyed ||
                               strategy == ProfileStrategy::Mixed;
    const Drawer drawer(b, options, needs_classes);
    for (std::size_t m = 0; m < count; ++m) {
        const std::uint64_t member_seed = derive_seed(seed, m);
        Rng rng(member_seed);
        Matrix v(n, k);
        for (std::size_t s = 0; s < k; ++s) {
            Slot kind = Slot::Signal;
            switch (strategy) {
                case ProfileStrategy::SignalOnly: kind = Slot::Signal; break;
                case ProfileStrategy::Uniform: kind = Slot::Uniform; break;
                case ProfileStrategy::Sign: kind = Slot::Sign; break;
                case ProfileStrategy::WlCells: kind = Slot::WlCell; break;
                case ProfileStrategy::ColorKeyed: kind = Slot::ColorKeyed; break;
                case ProfileStrategy::Mixed: {
                    const bool signal_tail = m % 2 == 1 && k >= b.d() && s >= k - b.d();
                    if (m == 0 || signal_tail) {
                        kind = Slot::Signal;
                    } else {
                        static constexpr Slot kPool[] = {Slot::Uniform, Slot::Sign, Slot::WlCell, Slot::ColorKeyed};
                        kind = kPool[rng.below(4)];
                    }
                    break;
                }
            }
            drawer.fill(v, s, kind, signal_channel(s, k, b.d()), rng, member_seed);
        }
        add_member(out, p_distribution(b, v));
    }
    return out;
}

ProfileSample push_signal(const ProfileSample& s, const SignalMap& phi, std::size_t out_dim) {
    ProfileSample out = s;
    out.d = out_dim;
    out.members.clear();
    const std::size_t head = 2 * s.k;
    for (const auto& m : s.members) {
        const auto map = [&](std::span<const double> atom) {
            std::vector<double> y = phi(atom.subspan(head));
            if (y.size() != out_dim) throw std::invalid_argument("push_signal: map output has the wrong dimension");
            for (double x : y) {
                if (!(std::abs(x) <= 1.0 + 1e-12)) throw std::invalid_argument("push_signal: map output outside [-1, 1]");
            }
            std::vector<double> image(atom.begin(), atom.begin() + static_cast<std::ptrdiff_t>(head));
            image.insert(image.end(), y.begin(), y.end());
            return image;
        };
        add_member(out, PDistribution{s.k, out_dim, pushforward_measure(m.measure, map, head + out_dim).canonical(),
                                      m.test_vectors});
    }
    return out;
}

namespace {

void check_channels(const ProfileSample& s, std::size_t channels, const char* op) {
    if (channels > s.k || channels > s.d) {
        throw std::invalid_argument(std::string(op) + ": channels must not exceed the order or the signal dimension");
    }
}

bool on_diagonal(const PDistribution& p, std::size_t channels) {
    const std::size_t k = p.k;
    const std::size_t d = p.d;
    for (std::size_t a = 0; a < p.measure.size(); ++a) {
        if (p.measure.weight(a) <= 0.0) continue;
        const auto atom = p.measure.atom(a);
        for (std::size_t c = 0; c < channels; ++c) {
            if (std::abs(atom[k - channels + c] - atom[2 * k + d - channels + c]) > kDiagonalTolerance) return false;
        }
    }
    return true;
}

}  // namespace

ProfileSample diagonal_restrict(const ProfileSample& s, std::size_t channels) {
    check_channels(s, channels, "diagonal_restrict");
    ProfileSample out = s;
    out.members.clear();
    for (const auto& m : s.members) {
        if (on_diagonal(m, channels)) out.members.push_back(m);
    }
    out.diagonal_empty = out.members.empty() && !s.members.empty();
    return out;
}

ProfileSample diagonal_marginalize(const ProfileSample& s, std::size_t channels) {
    check_channels(s, channels, "diagonal_marginalize");
    const ProfileSample kept = diagonal_restrict(s, channels);
    ProfileSample out = kept;
    out.members.clear();
    out.k = s.k - channels;
    out.d = s.d + channels;
    std::vector<std::size_t> coords;
    for (std::size_t c = 0; c < out.k; ++c) coords.push_back(c);
    for (std::size_t c = s.k; c < 2 * s.k + s.d; ++c) coords.push_back(c);
    for (const auto& m : kept.members) {
        std::optional<Matrix> tests;
        if (m.test_vectors) {
            Matrix t(m.test_vectors->rows(), out.k);
            for (std::size_t i = 0; i < t.rows(); ++i)
                for (std::size_t c = 0; c < out.k; ++c) t(i, c) = (*m.test_vectors)(i, c);
            tests = std::move(t);
        }
        add_member(out, PDistribution{out.k, out.d, m.measure.project(coords).canonical(), std::move(tests)});
    }
    return out;
}

double action_tail_bound(std::size_t k_max, double r, std::size_t d) {
    const double K = static_cast<double>(k_max);
    return 2.0 * std::ldexp((1.0 + r) * (K + 2.0) + static_cast<double>(d), -static_cast<int>(k_max));
}

ActionMetricEstimate action_metric_estimate(const FiniteBofopSignal& b1, const FiniteBofopSignal& b2,
                                            const ActionMetricOptions& options) {
    if (b1.d() != b2.d()) {
        throw std::invalid_argument("action_metric_estimate: feature dimensions differ (" + std::to_string(b1.d()) +
                                    " vs " + std::to_string(b2.d()) + ")");
    }
    ActionMetricEstimate est;
    est.k_max = options.k_max;
    est.samples = options.samples;
    est.strategy = options.strategy;
    SamplingOptions plain;
    plain.class_depth = options.sampling.class_depth;
    for (std::size_t k = 0; k <= options.k_max; ++k) {
        const std::uint64_t seed_k = derive_seed(options.seed, k);
        const auto s1 = sample_k_profile(b1, k, options.samples, options.strategy, seed_k, options.sampling);
        const auto s2 = sample_k_profile(b2, k, options.samples, options.strategy, seed_k, plain);
        const auto m1 = s1.measures();
        const auto m2 = s2.measures();
        const double h = hausdorff_set_distance(m1, m2, GroundMetric::l1());
        est.per_k.push_back(h);
        est.value += std::ldexp(h, -static_cast<int>(k));
    }
    est.tail_bound = action_tail_bound(options.k_max, std::max(infty_norm(b1), infty_norm(b2)), b1.d());
    return est;
}

}  // namespace bofop
