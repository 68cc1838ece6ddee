#include "bofop/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "bofop/rng.hpp"
#include "bofop/wl.hpp"

namespace bofop {

std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Convergence: return "convergence";
        case ExperimentKind::Fineness: return "fineness";
        case ExperimentKind::Continuity: return "continuity";
        case ExperimentKind::Generalization: return "generalization";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    for (auto k : {ExperimentKind::Convergence, ExperimentKind::Fineness, ExperimentKind::Continuity,
                   ExperimentKind::Generalization}) {
        if (name == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown experiment kind '" + std::string(name) + "'");
}

namespace {

template <class T>
T field(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config field '") + key + "': " + e.what());
    }
}

MpnnModel load_model(const Json& j, const std::filesystem::path& base_dir) {
    if (j.is_string()) {
        std::filesystem::path p = j.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        return model_from_json(read_json_file(p));
    }
    if (j.is_object() && j.contains("random")) {
        const Json& r = j["random"];
        return random_model(field<std::vector<std::size_t>>(r, "dims", {}), field<std::size_t>(r, "out_dim", 1),
                            field<std::uint64_t>(r, "seed", 0), field<double>(r, "scale", 1.0));
    }
    return model_from_json(j);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
}

// Runs body(i) for i in [0, count) on a few threads; results must be written by index.
template <class F>
void parallel_for(std::size_t count, F body) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 16));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

FiniteBofopSignal sample_graph(GeneratorSpec spec, std::size_t n, std::uint64_t seed) {
    spec.n = n;
    spec.seed = seed;
    return generate(spec).signal;
}

ActionMetricOptions action_options(const ExperimentConfig& cfg) {
    ActionMetricOptions o;
    o.k_max = cfg.k_max;
    o.samples = cfg.samples;
    o.strategy = cfg.strategy;
    o.seed = derive_seed(cfg.seed, 0xAC7);
    return o;
}

double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

RunReport make_report(const ExperimentConfig& cfg, std::vector<std::string> columns) {
    RunReport r;
    r.kind = cfg.kind;
    r.config = cfg.echo;
    r.columns = std::move(columns);
    return r;
}

void add_check(RunReport& r, std::string name, bool pass, double value, double threshold) {
    r.checks.push_back({std::move(name), pass, value, threshold});
}

// Mean that is exact for constant sequences.
double running_mean(const std::vector<double>& xs) {
    double m = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) m += (xs[i] - m) / static_cast<double>(i + 1);
    return m;
}

double median(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t h = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

}  // namespace

ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir) {
    static const std::set<std::string> known{
        "kind",     "seed",       "depth",      "k_max",       "samples",          "strategy",
        "generators", "sizes",    "eta",        "pairs",       "epsilon",          "model",
        "hypotheses", "class_prior", "repetitions", "hoeffding", "reference_factor", "slope",
        "out",      "description", "replicates"};
    require(j.is_object(), "expected a JSON object");
    for (const auto& [key, _] : j.items()) require(known.count(key) == 1, "unknown field '" + key + "'");
    require(j.contains("kind"), "missing 'kind'");
    require(j.contains("seed"), "missing 'seed' (seeds must be explicit)");

    ExperimentConfig c;
    c.echo = j;
    c.kind = parse_experiment_kind(field<std::string>(j, "kind", ""));
    c.seed = field<std::uint64_t>(j, "seed", 0);
    c.depth = field<std::size_t>(j, "depth", c.depth);
    c.k_max = field<std::size_t>(j, "k_max", c.k_max);
    c.samples = field<std::size_t>(j, "samples", c.samples);
    c.strategy = parse_profile_strategy(field<std::string>(j, "strategy", "mixed"));
    if (j.contains("generators")) {
        for (const auto& g : j["generators"]) {
            Json spec = g;
            if (!spec.contains("n")) spec["n"] = 1;
            c.generators.push_back(generator_from_json(spec));
        }
    }
    c.sizes = field<std::vector<std::size_t>>(j, "sizes", {});
    for (std::size_t i = 1; i < c.sizes.size(); ++i) require(c.sizes[i - 1] < c.sizes[i], "sizes must be strictly increasing");
    for (std::size_t s : c.sizes) require(s >= 1, "sizes must be positive");
    c.replicates = field<std::size_t>(j, "replicates", c.replicates);
    require(c.replicates >= 1, "replicates must be positive");
    c.eta = field<double>(j, "eta", c.eta);
    c.pairs = field<std::size_t>(j, "pairs", c.pairs);
    c.epsilon = field<double>(j, "epsilon", c.epsilon);
    if (j.contains("model")) c.model = load_model(j["model"], base_dir);
    if (j.contains("hypotheses")) {
        const Json& h = j["hypotheses"];
        for (const auto& m : field<Json>(h, "models", Json::array())) c.hypotheses.models.push_back(load_model(m, base_dir));
        if (h.contains("random")) {
            const Json& r = h["random"];
            c.hypotheses.random_count = field<std::size_t>(r, "count", 0);
            c.hypotheses.random_dims = field<std::vector<std::size_t>>(r, "dims", {});
            c.hypotheses.random_scale = field<double>(r, "scale", 1.0);
        }
    }
    c.class_prior = field<double>(j, "class_prior", c.class_prior);
    c.repetitions = field<std::size_t>(j, "repetitions", c.repetitions);
    if (j.contains("hoeffding")) {
        const Json& h = j["hoeffding"];
        c.hoeffding_n = field<std::size_t>(h, "n", c.hoeffding_n);
        c.hoeffding_repetitions = field<std::size_t>(h, "repetitions", c.hoeffding_repetitions);
        c.hoeffding_k = field<double>(h, "k", c.hoeffding_k);
    }
    c.reference_factor = field<std::size_t>(j, "reference_factor", c.reference_factor);
    if (j.contains("slope")) {
        c.slope_target = field<double>(j["slope"], "target", c.slope_target);
        c.slope_tolerance = field<double>(j["slope"], "tolerance", c.slope_tolerance);
    }

    require(c.samples >= 1, "samples must be positive");
    switch (c.kind) {
        case ExperimentKind::Convergence:
            require(!c.generators.empty(), "convergence needs a generator");
            require(c.sizes.size() >= 2, "convergence needs at least two sizes");
            break;
        case ExperimentKind::Fineness:
            require(!c.generators.empty(), "fineness needs a generator");
            require(c.eta >= 0.0, "eta must be nonnegative");
            break;
        case ExperimentKind::Continuity:
            require(c.model.has_value(), "continuity needs a model");
            require(!c.generators.empty(), "continuity needs a generator");
            break;
        case ExperimentKind::Generalization:
            require(c.generators.size() == 1 || c.generators.size() == 2, "generalization needs one or two generators");
            require(!c.sizes.empty(), "generalization needs a sample-size schedule");
            require(c.class_prior >= 0.0 && c.class_prior <= 1.0, "class_prior must lie in [0, 1]");
            require(!c.hypotheses.models.empty() || c.hypotheses.random_count > 0, "generalization needs hypotheses");
            require(c.repetitions >= 1 && c.reference_factor >= 1, "repetitions and reference_factor must be positive");
            break;
    }
    return c;
}

bool RunReport::all_checks_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::size_t RunReport::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::invalid_argument("report has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

RunReport run_convergence(const ExperimentConfig& cfg) {
    RunReport r = make_report(cfg, {"trial", "relation", "n1", "n2", "replicates", "action", "action_tail", "didm"});
    const auto opts = action_options(cfg);
    const GeneratorSpec& base = cfg.generators.front();
    const std::size_t reps = cfg.replicates;
    const std::size_t n_max = cfg.sizes.back();

    // Replicate q samples its size sequence from seeds derive_seed(derive_seed(seed, q), i).
    struct Pair {
        std::string relation;
        std::size_t n1, n2;
        FiniteBofopSignal a, b;
    };
    std::vector<std::string> relations;
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    std::vector<Pair> pairs;
    for (std::size_t q = 0; q < reps; ++q) {
        const std::uint64_t rs = derive_seed(cfg.seed, q);
        std::vector<FiniteBofopSignal> graphs;
        for (std::size_t i = 0; i < cfg.sizes.size(); ++i) graphs.push_back(sample_graph(base, cfg.sizes[i], derive_seed(rs, i)));
        for (std::size_t i = 0; i + 1 < graphs.size(); ++i) {
            pairs.push_back({"consecutive", cfg.sizes[i], cfg.sizes[i + 1], graphs[i], graphs[i + 1]});
        }
        pairs.push_back({"same_generator", n_max, n_max, graphs.back(), sample_graph(base, n_max, derive_seed(rs, 0x5EED))});
        if (cfg.generators.size() > 1) {
            pairs.push_back({"cross_generator", n_max, n_max, graphs.back(),
                             sample_graph(cfg.generators[1], n_max, derive_seed(rs, 0xC055))});
        }
        pairs.push_back({"identical", n_max, n_max, graphs.back(), graphs.back()});
    }
    const std::size_t per_rep = pairs.size() / reps;

    std::vector<ActionMetricEstimate> action(pairs.size());
    std::vector<double> didm(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t t) {
        action[t] = action_metric_estimate(pairs[t].a, pairs[t].b, opts);
        didm[t] = didm_movers_distance(pairs[t].a, pairs[t].b, cfg.depth);
    });

    std::vector<double> consecutive_action, consecutive_didm;
    for (std::size_t t = 0; t < per_rep; ++t) {
        const auto& p = pairs[t];
        std::vector<double> a, d, tail;
        for (std::size_t q = 0; q < reps; ++q) {
            a.push_back(action[q * per_rep + t].value);
            tail.push_back(action[q * per_rep + t].tail_bound);
            d.push_back(didm[q * per_rep + t]);
        }
        const double ma = running_mean(a), md = running_mean(d);
        r.rows.push_back({static_cast<double>(t), p.relation, static_cast<double>(p.n1), static_cast<double>(p.n2),
                          static_cast<double>(reps), ma, *std::max_element(tail.begin(), tail.end()), md});
        if (p.relation == "consecutive") {
            consecutive_action.push_back(ma);
            consecutive_didm.push_back(md);
        }
        if (p.relation == "identical") add_check(r, "identical_pair_zero", ma == 0.0 && md == 0.0, std::max(ma, md), 0.0);
        if (p.relation == "same_generator") r.summary.emplace_back("same_generator_didm", md);
        if (p.relation == "cross_generator") r.summary.emplace_back("cross_generator_didm", md);
    }
    auto decreasing = [](const std::vector<double>& xs) {
        return std::adjacent_find(xs.begin(), xs.end(), std::less_equal<>()) == xs.end();
    };
    const double factor = consecutive_didm.back() > 0.0 ? consecutive_didm.front() / consecutive_didm.back()
                                                        : std::numeric_limits<double>::infinity();
    r.summary.emplace_back("didm_first", consecutive_didm.front());
    r.summary.emplace_back("didm_last", consecutive_didm.back());
    r.summary.emplace_back("didm_decay_factor", factor);
    r.summary.emplace_back("action_first", consecutive_action.front());
    r.summary.emplace_back("action_last", consecutive_action.back());
    add_check(r, "didm_decay_factor_at_least_2", factor >= 2.0, factor, 2.0);
    add_check(r, "didm_decreasing", decreasing(consecutive_didm), consecutive_didm.back(), consecutive_didm.front());
    add_check(r, "action_decreasing", decreasing(consecutive_action), consecutive_action.back(),
              consecutive_action.front());

    r.plot = {"consecutive-size distances", "n2", {"action", "didm"}, true, true, true};
    return r;
}

RunReport run_fineness(const ExperimentConfig& cfg) {
    RunReport r = make_report(cfg, {"trial", "relation", "n", "seed", "action", "didm"});
    const auto opts = action_options(cfg);
    GeneratorSpec base = cfg.generators.front();
    const std::size_t n = cfg.sizes.empty() ? base.n : cfg.sizes.front();

    struct Pair {
        std::string relation;
        std::uint64_t seed;
        FiniteBofopSignal a, b;
    };
    std::vector<Pair> pairs;
    for (std::size_t p = 0; p < cfg.pairs; ++p) {
        const std::uint64_t s = derive_seed(cfg.seed, p);
        base.n = n;
        base.seed = s;
        const auto g = generate(base);
        if (g.document.kernel) throw std::invalid_argument("fineness: perturbation needs an edge-list generator");
        auto edges = g.document.edges;
        Rng noise(derive_seed(s, 0xE7A));
        for (auto& e : edges) e.weight = std::max(0.0, e.weight + noise.uniform(-cfg.eta, cfg.eta));
        auto perturbed = from_graph(n, edges, g.document.features, g.document.aggregation, g.document.vertex_weights);
        pairs.push_back({"perturbed", s, g.signal, std::move(perturbed)});
        pairs.push_back({"independent", s, g.signal, sample_graph(base, n, derive_seed(s, 0x1D))});
    }
    {
        base.seed = derive_seed(cfg.seed, 0x1DE);
        const auto g = sample_graph(base, n, base.seed);
        pairs.push_back({"identical", base.seed, g, g});
    }
    const Matrix ones = Matrix::from_rows({{1.0}, {1.0}});
    pairs.push_back({"k2_vs_2k1", 0, from_graph(2, {{0, 1, 1.0}}, ones, Aggregation::Sum),
                     from_graph(2, {}, ones, Aggregation::Sum)});

    std::vector<double> action(pairs.size()), didm(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t t) {
        action[t] = action_metric_estimate(pairs[t].a, pairs[t].b, opts).value;
        didm[t] = didm_movers_distance(pairs[t].a, pairs[t].b, cfg.depth);
    });

    double worst_perturbed = 0.0, worst_perturbed_action = 0.0;
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto& p = pairs[t];
        const double nn = p.relation == "k2_vs_2k1" ? 2.0 : static_cast<double>(n);
        r.rows.push_back({static_cast<double>(t), p.relation, nn, std::to_string(p.seed), action[t], didm[t]});
        if (p.relation == "perturbed") {
            worst_perturbed = std::max(worst_perturbed, didm[t]);
            worst_perturbed_action = std::max(worst_perturbed_action, action[t]);
        }
        if (p.relation == "identical") {
            add_check(r, "identical_pair_zero", action[t] == 0.0 && didm[t] == 0.0, std::max(action[t], didm[t]), 0.0);
        }
        if (p.relation == "k2_vs_2k1") {
            add_check(r, "k2_vs_2k1_action_positive", action[t] > 0.0, action[t], 0.0);
            add_check(r, "k2_vs_2k1_didm_positive", didm[t] > 0.0, didm[t], 0.0);
        }
    }
    // DIDM-close but action-far: the converse the metrics do not promise.
    std::size_t counterexamples = 0;
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        if (pairs[t].relation == "independent" && didm[t] <= worst_perturbed && action[t] > worst_perturbed_action) {
            ++counterexamples;
        }
    }
    if (cfg.pairs > 0) add_check(r, "perturbed_didm_within_epsilon", worst_perturbed <= cfg.epsilon, worst_perturbed, cfg.epsilon);
    r.summary.emplace_back("max_perturbed_action", worst_perturbed_action);
    r.summary.emplace_back("max_perturbed_didm", worst_perturbed);
    r.summary.emplace_back("converse_counterexamples", static_cast<double>(counterexamples));

    r.plot = {"action estimate vs DIDM distance", "action", {"didm"}, false, false, false};
    return r;
}

RunReport run_continuity(const ExperimentConfig& cfg) {
    RunReport r = make_report(cfg, {"trial", "relation", "n1", "n2", "seed1", "seed2", "delta_readout", "didm", "action",
                                    "ratio_didm", "ratio_action"});
    const MpnnModel& model = *cfg.model;
    const auto opts = action_options(cfg);
    const std::size_t depth = model.depth();
    const std::size_t g_count = cfg.generators.size();

    struct Pair {
        std::string relation;
        std::uint64_t s1, s2;
        FiniteBofopSignal a, b;
    };
    std::vector<Pair> pairs;
    auto size_of = [&](const GeneratorSpec& g, std::size_t p) {
        return cfg.sizes.empty() ? g.n : cfg.sizes[p % cfg.sizes.size()];
    };
    for (std::size_t p = 0; p < cfg.pairs; ++p) {
        const auto& g1 = cfg.generators[p % g_count];
        const auto& g2 = cfg.generators[(p + 1) % g_count];
        const std::uint64_t s1 = derive_seed(cfg.seed, 2 * p), s2 = derive_seed(cfg.seed, 2 * p + 1);
        pairs.push_back({"random", s1, s2, sample_graph(g1, size_of(g1, p), s1), sample_graph(g2, size_of(g2, p + 1), s2)});
    }
    {
        const std::uint64_t s = derive_seed(cfg.seed, 0x1DE);
        const auto g = sample_graph(cfg.generators.front(), size_of(cfg.generators.front(), 0), s);
        pairs.push_back({"identical", s, s, g, g});
    }
    double r_max = 0.0;
    for (const auto& p : pairs) {
        if (p.a.d() != model.input_dim() || p.b.d() != model.input_dim()) {
            throw std::invalid_argument("continuity: feature dimension does not match the model input");
        }
        r_max = std::max({r_max, infty_norm(p.a), infty_norm(p.b)});
    }
    const double certificate = lipschitz_certificate(model, r_max);

    std::vector<double> delta(pairs.size()), didm(pairs.size()), action(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t t) {
        delta[t] = l1_diff(forward_bofop(model, pairs[t].a).readout, forward_bofop(model, pairs[t].b).readout);
        didm[t] = didm_movers_distance(pairs[t].a, pairs[t].b, depth);
        action[t] = action_metric_estimate(pairs[t].a, pairs[t].b, opts).value;
    });

    auto ratio = [](double num, double den) {
        if (num == 0.0) return 0.0;
        return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
    };
    double max_ratio_didm = 0.0, max_ratio_action = 0.0;
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto& p = pairs[t];
        const double rd = ratio(delta[t], didm[t]), ra = ratio(delta[t], action[t]);
        max_ratio_didm = std::max(max_ratio_didm, rd);
        max_ratio_action = std::max(max_ratio_action, ra);
        r.rows.push_back({static_cast<double>(t), p.relation, static_cast<double>(p.a.n()), static_cast<double>(p.b.n()),
                          std::to_string(p.s1), std::to_string(p.s2), delta[t], didm[t], action[t], rd, ra});
        if (p.relation == "identical") add_check(r, "identical_pair_zero", delta[t] == 0.0 && didm[t] == 0.0, delta[t], 0.0);
    }
    r.summary.emplace_back("r", r_max);
    r.summary.emplace_back("certificate", certificate);
    r.summary.emplace_back("max_ratio_didm", max_ratio_didm);
    r.summary.emplace_back("max_ratio_action", max_ratio_action);
    // The action axis is an estimate, so exceeding the certificate there is a finding, not a failure.
    r.summary.emplace_back("action_ratio_exceeds_certificate", max_ratio_action > certificate ? 1.0 : 0.0);
    add_check(r, "didm_ratio_within_certificate", max_ratio_didm <= certificate * (1.0 + 1e-12), max_ratio_didm,
              certificate);

    r.plot = {"readout change vs DIDM distance", "didm", {"delta_readout"}, false, false, false};
    return r;
}

RunReport run_generalization(const ExperimentConfig& cfg) {
    RunReport r = make_report(cfg, {"trial", "n_samples", "repetitions", "median_deviation", "mean_deviation",
                                    "max_deviation", "hoeffding_bound_at_k"});
    std::vector<MpnnModel> hyps = cfg.hypotheses.models;
    for (std::size_t h = 0; h < cfg.hypotheses.random_count; ++h) {
        hyps.push_back(random_model(cfg.hypotheses.random_dims, 2, derive_seed(cfg.seed, 0x4000 + h), cfg.hypotheses.random_scale));
    }
    for (const auto& m : hyps) {
        if (m.readout.out_dim() != 2) throw std::invalid_argument("generalization: hypotheses must have two outputs");
    }
    const GeneratorSpec& g0 = cfg.generators.front();
    const GeneratorSpec& g1 = cfg.generators.back();
    const std::size_t H = hyps.size();

    // Loss of every hypothesis on sample `index` of `stream`: half the l1 distance
    // between the clamped prediction and the one-hot label, so it lies in [0, 1].
    auto losses = [&](std::uint64_t stream, std::uint64_t index, double* out) {
        const std::uint64_t s = derive_seed(stream, index);
        Rng rng(s);
        const bool label = rng.bernoulli(cfg.class_prior);
        const auto& spec = label ? g1 : g0;
        const auto b = sample_graph(spec, spec.n, derive_seed(s, 1));
        for (std::size_t h = 0; h < H; ++h) {
            const auto y = forward_bofop(hyps[h], b).readout;
            double l = 0.0;
            for (std::size_t c = 0; c < 2; ++c) {
                const double p = std::clamp(0.5 * (y[c] + 1.0), 0.0, 1.0);
                l += std::abs(p - ((c == 1) == label ? 1.0 : 0.0));
            }
            out[h] = 0.5 * l;
        }
    };
    // Empirical risk of each hypothesis over samples [0, count) of a stream.
    auto risks = [&](std::uint64_t stream, std::size_t count, bool parallel) {
        std::vector<double> table(count * H);
        auto body = [&](std::size_t i) { losses(stream, i, table.data() + i * H); };
        if (parallel) {
            parallel_for(count, body);
        } else {
            for (std::size_t i = 0; i < count; ++i) body(i);
        }
        std::vector<double> out(H);
        std::vector<double> column(count);
        for (std::size_t h = 0; h < H; ++h) {
            for (std::size_t i = 0; i < count; ++i) column[i] = table[i * H + h];
            out[h] = running_mean(column);
        }
        return out;
    };
    auto sup_deviation = [&](const std::vector<double>& emp, const std::vector<double>& ref) {
        double d = 0.0;
        for (std::size_t h = 0; h < H; ++h) d = std::max(d, std::abs(emp[h] - ref[h]));
        return d;
    };

    const std::size_t n_ref = cfg.reference_factor * std::max(cfg.sizes.back(), cfg.hoeffding_n);
    const auto reference = risks(derive_seed(cfg.seed, 1), n_ref, true);

    std::vector<double> log_n, log_dev;
    for (std::size_t t = 0; t < cfg.sizes.size(); ++t) {
        const std::size_t n = cfg.sizes[t];
        const std::uint64_t base = derive_seed(cfg.seed, 0x100 + n);
        std::vector<double> devs(cfg.repetitions);
        parallel_for(cfg.repetitions,
                     [&](std::size_t rep) { devs[rep] = sup_deviation(risks(derive_seed(base, rep), n, false), reference); });
        const double med = median(devs);
        const double bound = 2.0 * std::exp(-2.0 * cfg.hoeffding_k * cfg.hoeffding_k * static_cast<double>(n));
        r.rows.push_back({static_cast<double>(t), static_cast<double>(n), static_cast<double>(cfg.repetitions), med,
                          running_mean(devs), *std::max_element(devs.begin(), devs.end()), bound});
        if (med > 0.0) {
            log_n.push_back(std::log(static_cast<double>(n)));
            log_dev.push_back(std::log(med));
        }
    }

    // Least-squares slope of log median deviation against log N.
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (log_n.size() >= 2) {
        const double mx = running_mean(log_n), my = running_mean(log_dev);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < log_n.size(); ++i) {
            sxy += (log_n[i] - mx) * (log_dev[i] - my);
            sxx += (log_n[i] - mx) * (log_n[i] - mx);
        }
        slope = sxy / sxx;
    }

    // Hoeffding envelope: each fixed hypothesis deviates by more than k rarely.
    std::size_t violations = 0;
    double worst = 0.0;
    if (cfg.hoeffding_repetitions > 0) {
        const std::uint64_t base = derive_seed(cfg.seed, 0x40EF);
        std::vector<std::vector<double>> emp(cfg.hoeffding_repetitions);
        parallel_for(cfg.hoeffding_repetitions,
                     [&](std::size_t rep) { emp[rep] = risks(derive_seed(base, rep), cfg.hoeffding_n, false); });
        for (const auto& e : emp) {
            for (std::size_t h = 0; h < H; ++h) {
                const double d = std::abs(e[h] - reference[h]);
                worst = std::max(worst, d);
                if (d > cfg.hoeffding_k) ++violations;
            }
        }
    }
    const double k = cfg.hoeffding_k;
    const double envelope = 2.0 * std::exp(-2.0 * k * k * static_cast<double>(cfg.hoeffding_n));

    r.summary.emplace_back("hypotheses", static_cast<double>(H));
    r.summary.emplace_back("reference_size", static_cast<double>(n_ref));
    for (std::size_t h = 0; h < H; ++h) r.summary.emplace_back("reference_risk_" + std::to_string(h), reference[h]);
    r.summary.emplace_back("slope", slope);
    r.summary.emplace_back("hoeffding_n", static_cast<double>(cfg.hoeffding_n));
    r.summary.emplace_back("hoeffding_k", k);
    r.summary.emplace_back("hoeffding_repetitions", static_cast<double>(cfg.hoeffding_repetitions));
    r.summary.emplace_back("hoeffding_bound", envelope);
    r.summary.emplace_back("hoeffding_max_deviation", worst);
    r.summary.emplace_back("hoeffding_violations", static_cast<double>(violations));

    if (log_n.size() >= 2) {
        add_check(r, "slope_near_target", std::abs(slope - cfg.slope_target) <= cfg.slope_tolerance, slope, cfg.slope_target);
    }
    if (cfg.hoeffding_repetitions > 0) {
        add_check(r, "hoeffding_no_violations", violations == 0, static_cast<double>(violations), 0.0);
    }
    r.plot = {"sup deviation from reference risk", "n_samples", {"median_deviation"}, true, true, true};
    return r;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunReport r;
    switch (cfg.kind) {
        case ExperimentKind::Convergence: r = run_convergence(cfg); break;
        case ExperimentKind::Fineness: r = run_fineness(cfg); break;
        case ExperimentKind::Continuity: r = run_continuity(cfg); break;
        case ExperimentKind::Generalization: r = run_generalization(cfg); break;
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ---------------------------------------------------------------- rendering

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

Json number_json(double x) {
    if (!std::isfinite(x)) return format_number(x);
    return x;
}

std::string render_csv(const RunReport& r) {
    std::ostringstream out;
    for (std::size_t c = 0; c < r.columns.size(); ++c) out << (c ? "," : "") << csv_escape(r.columns[c]);
    out << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            if (const double* x = std::get_if<double>(&row[c])) {
                out << format_number(*x);
            } else {
                out << csv_escape(std::get<std::string>(row[c]));
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string render_json(const RunReport& r) {
    Json j;
    j["version"] = BOFOP_VERSION;
    j["kind"] = std::string(to_string(r.kind));
    j["seed"] = r.config.contains("seed") ? r.config["seed"] : Json();
    j["config"] = r.config;
    j["columns"] = r.columns;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json jr = Json::array();
        for (const auto& cell : row) {
            if (const double* x = std::get_if<double>(&cell)) {
                jr.push_back(number_json(*x));
            } else {
                jr.push_back(std::get<std::string>(cell));
            }
        }
        rows.push_back(jr);
    }
    j["rows"] = rows;
    Json summary = Json::object();
    for (const auto& [k, v] : r.summary) summary[k] = number_json(v);
    j["summary"] = summary;
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number_json(c.value)},
                          {"threshold", number_json(c.threshold)}});
    }
    j["checks"] = checks;
    j["all_checks_pass"] = r.all_checks_pass();
    return j.dump(2) + "\n";
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string render_svg(const RunReport& r) {
    constexpr double W = 640, Hh = 420, L = 70, R = 20, T = 40, B = 60;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    const auto& p = r.plot;

    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> pts;
    };
    std::vector<Series> series;
    std::size_t xc = 0;
    bool have_x = !p.x.empty() && std::find(r.columns.begin(), r.columns.end(), p.x) != r.columns.end();
    if (have_x) xc = r.column(p.x);
    const std::size_t rel = std::find(r.columns.begin(), r.columns.end(), "relation") != r.columns.end()
                                ? r.column("relation")
                                : r.columns.size();
    for (const auto& name : p.y) {
        if (!have_x || std::find(r.columns.begin(), r.columns.end(), name) == r.columns.end()) continue;
        Series s{name, {}};
        const std::size_t yc = r.column(name);
        for (const auto& row : r.rows) {
            // Line plots follow the consecutive trials only.
            if (p.lines && rel < row.size() && std::get<std::string>(row[rel]) != "consecutive") continue;
            const double* x = std::get_if<double>(&row[xc]);
            const double* y = std::get_if<double>(&row[yc]);
            if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) continue;
            if ((p.log_x && *x <= 0) || (p.log_y && *y <= 0)) continue;
            s.pts.emplace_back(p.log_x ? std::log10(*x) : *x, p.log_y ? std::log10(*y) : *y);
        }
        series.push_back(std::move(s));
    }
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const auto& s : series) {
        for (auto [x, y] : s.pts) {
            if (first) {
                x0 = x1 = x;
                y0 = y1 = y;
                first = false;
            }
            x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
        }
    }
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double y) { return Hh - B - (y - y0) / (y1 - y0) * (Hh - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << p.title << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << Hh - B << "\" x2=\"" << W - R << "\" y2=\"" << Hh - B << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << Hh - B << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
        const double vx = p.log_x ? std::pow(10.0, fx) : fx, vy = p.log_y ? std::pow(10.0, fy) : fy;
        o << "<text x=\"" << sx(fx) << "\" y=\"" << Hh - B + 16 << "\" text-anchor=\"middle\">" << fmt_tick(vx) << "</text>\n";
        o << "<text x=\"" << L - 6 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">" << fmt_tick(vy) << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << Hh - 18 << "\" text-anchor=\"middle\">" << p.x
      << (p.log_x ? " (log)" : "") << "</text>\n";
    std::string ylabel;
    for (std::size_t i = 0; i < p.y.size(); ++i) ylabel += (i ? ", " : "") + p.y[i];
    o << "<text transform=\"translate(16," << (T + Hh - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel
      << (p.log_y ? " (log)" : "") << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* c = colors[k % 4];
        const auto& s = series[k];
        if (p.lines && s.pts.size() > 1) {
            o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < s.pts.size(); ++i) o << (i ? " " : "") << sx(s.pts[i].first) << ',' << sy(s.pts[i].second);
            o << "\"/>\n";
        }
        for (auto [x, y] : s.pts) o << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
        o << "<text x=\"" << W - R - 110 << "\" y=\"" << T + 14 * (k + 1) << "\" fill=\"" << c << "\">" << s.name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace

std::string render_report(const RunReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Csv: return render_csv(report);
        case ReportFormat::Json: return render_json(report);
        case ReportFormat::Svg: return render_svg(report);
    }
    return {};
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    write_text_file(dir / "report.csv", render_report(report, ReportFormat::Csv));
    write_text_file(dir / "report.json", render_report(report, ReportFormat::Json));
    write_text_file(dir / "report.svg", render_report(report, ReportFormat::Svg));
}

}  // namespace bofop
