// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.
//
//   acceptance [--only N]...

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "bofop/experiments.hpp"
#include "bofop/generators.hpp"
#include "bofop/io.hpp"
#include "bofop/mpnn.hpp"
#include "bofop/ot.hpp"
#include "bofop/profile.hpp"
#include "bofop/rng.hpp"
#include "bofop/wl.hpp"
#include "oracles.hpp"

using bofop::Aggregation;
using bofop::DiscreteMeasure;
using bofop::FiniteBofopSignal;
using bofop::GroundMetric;
using bofop::Matrix;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

FiniteBofopSignal random_signal(bofop::Rng& rng, std::size_t n, std::size_t d, bool coarse_features = false,
                                std::optional<Aggregation> aggregation = std::nullopt) {
    std::vector<bofop::WeightedEdge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.bernoulli(0.4)) edges.push_back({i, j, rng.uniform(0.1, 1.0)});
    Matrix f(n, d);
    for (double& x : f.data()) x = coarse_features ? rng.below(3) * 0.5 - 0.5 : rng.uniform(-1.0, 1.0);
    const auto agg = static_cast<Aggregation>(rng.below(3));
    return bofop::from_graph(n, edges, f, aggregation.value_or(agg));
}

GroundMetric random_ground(bofop::Rng& rng) { return rng.below(2) == 0 ? GroundMetric::l1() : GroundMetric::l2(); }

// 1. ot_unbalanced against exhaustive enumeration of coupling-polytope vertices.
Outcome ot_oracle() {
    bofop::Rng rng(101);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t dim = 1 + rng.below(3);
        const auto mu = oracle::random_measure(rng, dim, 1 + rng.below(3), rng.uniform(0.2, 2.0));
        const auto nu = oracle::random_measure(rng, dim, 1 + rng.below(3), rng.uniform(0.2, 2.0));
        const auto ground = random_ground(rng);
        const double got = bofop::ot_unbalanced(mu, nu, ground);
        const auto w1 = mu.weights();
        const auto w2 = nu.weights();
        const double want = oracle::unbalanced_ot_by_vertex_enumeration({w1.begin(), w1.end()}, {w2.begin(), w2.end()},
                                                                        ground.cost_matrix(mu, nu));
        worst = std::max(worst, std::abs(got - want));
    }
    return {worst <= 1e-9, "200 pairs, max |diff| " + fmt("%.3g", worst)};
}

// 2. Symmetry and triangle inequality: ot_unbalanced on equal-mass triples and
// d^L_IDM (L <= 3) between nodes of three random graphs. Fibers have mass at
// most 1 (normalized sum); with heavier fibers the mass-gap term breaks the
// triangle inequality once ground costs exceed 2.
Outcome metric_axioms() {
    bofop::Rng rng(202);
    double worst = 0.0;  // largest violation
    for (int t = 0; t < 500; ++t) {
        const std::size_t dim = 1 + rng.below(3);
        const double mass = rng.uniform(0.5, 2.0);
        const auto ground = random_ground(rng);
        const auto a = oracle::random_measure(rng, dim, 1 + rng.below(4), mass);
        const auto b = oracle::random_measure(rng, dim, 1 + rng.below(4), mass);
        const auto c = oracle::random_measure(rng, dim, 1 + rng.below(4), mass);
        const double ab = bofop::ot_unbalanced(a, b, ground), ba = bofop::ot_unbalanced(b, a, ground);
        const double bc = bofop::ot_unbalanced(b, c, ground), ac = bofop::ot_unbalanced(a, c, ground);
        worst = std::max({worst, std::abs(ab - ba), ac - ab - bc});

        const std::size_t level = 1 + rng.below(3);
        const std::size_t d = 1 + rng.below(2);
        const auto sub_probability = [&] {
            return bofop::compute_idms(random_signal(rng, 2 + rng.below(5), d, true, Aggregation::NormalizedSum), level);
        };
        const auto g1 = sub_probability();
        const auto g2 = sub_probability();
        const auto g3 = sub_probability();
        const std::size_t x = rng.below(g1.n()), y = rng.below(g2.n()), z = rng.below(g3.n());
        const double xy = bofop::idm_distance(g1, x, g2, y, level), yx = bofop::idm_distance(g2, y, g1, x, level);
        const double yz = bofop::idm_distance(g2, y, g3, z, level), xz = bofop::idm_distance(g1, x, g3, z, level);
        worst = std::max({worst, std::abs(xy - yx), xz - xy - yz});
    }
    return {worst <= 1e-9, "500 OT triples and 500 IDM triples, max violation " + fmt("%.3g", std::max(0.0, worst))};
}

// 3. kr_lower_bound <= W1 for affine test functions with |slope_i| <= 1 (l1 ground).
Outcome kr_duality() {
    bofop::Rng rng(303);
    std::size_t violations = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t dim = 1 + rng.below(3);
        const double mass = rng.uniform(0.3, 2.0);
        const auto mu = oracle::random_measure(rng, dim, 1 + rng.below(5), mass);
        const auto nu = oracle::random_measure(rng, dim, 1 + rng.below(5), mass);
        std::vector<double> slope(dim);
        for (double& s : slope) s = rng.uniform(-1.0, 1.0);
        const double offset = rng.uniform(-1.0, 1.0);
        const auto f = [&](std::span<const double> x) {
            double v = offset;
            for (std::size_t i = 0; i < dim; ++i) v += slope[i] * x[i];
            return v;
        };
        const double w1 = bofop::ot_unbalanced(mu, nu, GroundMetric::l1());
        if (bofop::kr_lower_bound(mu, nu, f) > w1 + 1e-12) ++violations;
    }
    return {violations == 0, "500 pairs, " + std::to_string(violations) + " violations"};
}

bool wl_equivalent(const std::vector<std::vector<std::size_t>>& a, const std::vector<std::vector<std::size_t>>& b) {
    for (std::size_t t = 0; t < a.size(); ++t) {
        std::map<std::size_t, double> ha, hb;
        for (auto c : a[t]) ha[c] += 1.0 / static_cast<double>(a[t].size());
        for (auto c : b[t]) hb[c] += 1.0 / static_cast<double>(b[t].size());
        if (ha.size() != hb.size()) return false;
        for (const auto& [c, w] : ha) {
            const auto it = hb.find(c);
            if (it == hb.end() || std::abs(it->second - w) > 1e-12) return false;
        }
    }
    return true;
}

// 4. All simple graphs up to 5 vertices: DIDM distance zero iff WL histograms
// (as vertex distributions) agree at every round up to L.
Outcome wl_equivalence() {
    std::vector<FiniteBofopSignal> graphs;
    for (std::size_t n = 1; n <= 5; ++n) {
        for (const auto& e : oracle::nonisomorphic_graphs(n)) {
            std::vector<bofop::WeightedEdge> we;
            for (const auto& [i, j] : e) we.push_back({i, j, 1.0});
            graphs.push_back(bofop::from_graph(n, we, Matrix(n, 1, 1.0), Aggregation::Sum));
        }
    }
    std::size_t discrepancies = 0, pairs = 0, zero_pairs = 0;
    for (std::size_t depth = 0; depth <= 3; ++depth) {
        bofop::ColorRefiner refiner;
        std::vector<std::vector<std::vector<std::size_t>>> colors;
        std::vector<bofop::Didm> didms;
        for (const auto& g : graphs) {
            colors.push_back(refiner.refine(g, depth));
            didms.push_back(bofop::compute_idms(g, depth));
        }
        for (std::size_t x = 0; x < graphs.size(); ++x) {
            for (std::size_t y = x + 1; y < graphs.size(); ++y) {
                const bool zero = bofop::didm_movers_distance(didms[x], didms[y]) <= 1e-9;
                if (zero != wl_equivalent(colors[x], colors[y])) ++discrepancies;
                zero_pairs += zero;
                ++pairs;
            }
        }
    }
    return {discrepancies == 0 && graphs.size() == 52,
            std::to_string(graphs.size()) + " graphs, " + std::to_string(pairs) + " pairs over L = 0..3 (" +
                std::to_string(zero_pairs) + " at distance 0), " + std::to_string(discrepancies) + " discrepancies"};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// 5. Readouts through the graph, IDM classes and profiles coincide.
Outcome three_way_commutation() {
    bofop::Rng rng(505);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + rng.below(2);
        const auto b = random_signal(rng, 1 + rng.below(12), d);
        const std::size_t depth = rng.below(4);
        std::vector<std::size_t> dims{d};
        for (std::size_t l = 0; l <= depth; ++l) dims.push_back(1 + rng.below(2));
        const auto model = bofop::random_model(dims, 2, rng.next_u64(), 1.5);
        const auto fwd = bofop::forward_bofop(model, b).readout;
        const auto idm = bofop::forward_idm(model, bofop::compute_idms(b, depth)).readout;
        const auto prof = bofop::forward_profile(model, bofop::hidden_signal_profile(model, b, rng.below(2), rng.next_u64()));
        worst = std::max({worst, max_abs_diff(fwd, idm), max_abs_diff(fwd, prof), max_abs_diff(idm, prof)});
    }
    return {worst <= 1e-9, "100 cases, max discrepancy " + fmt("%.3g", worst)};
}

// 6. W1 contracts under pushforward by an affine map of known constant, and the
// Hausdorff distance of profile samples contracts under signal pushforward and
// under the coordinate projection that marginalization applies.
Outcome contraction() {
    bofop::Rng rng(606);
    double min_slack = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 300; ++t) {
        const std::size_t dim = 1 + rng.below(3), out = 1 + rng.below(3);
        const double mass = rng.uniform(0.3, 2.0);
        const auto mu = oracle::random_measure(rng, dim, 1 + rng.below(4), mass);
        const auto nu = oracle::random_measure(rng, dim, 1 + rng.below(4), rng.bernoulli(0.5) ? mass : rng.uniform(0.3, 2.0));
        Matrix w(out, dim);
        for (double& x : w.data()) x = rng.uniform(-1.0, 1.0);
        std::vector<double> shift(out);
        for (double& x : shift) x = rng.uniform(-0.5, 0.5);
        const bofop::AffineMap phi(w, shift, bofop::Activation::Identity);
        const auto push = [&](std::span<const double> x) { return phi(x); };
        const double before = bofop::ot_unbalanced(mu, nu, GroundMetric::l1());
        const double after = bofop::ot_unbalanced(bofop::pushforward_measure(mu, push, out),
                                                  bofop::pushforward_measure(nu, push, out), GroundMetric::l1());
        // The mass gap is not scaled by the map, hence max(1, L).
        min_slack = std::min(min_slack, std::max(1.0, phi.lipschitz()) * before - after);

        const std::size_t k = rng.below(3), d = 1 + rng.below(2);
        auto sample = [&] {
            bofop::ProfileSample s;
            s.k = k;
            s.d = d;
            for (std::size_t m = 0, c = 1 + rng.below(3); m < c; ++m) {
                s.members.push_back({k, d, oracle::random_measure(rng, 2 * k + d, 1 + rng.below(3), 1.0), std::nullopt});
            }
            return s;
        };
        const auto s1 = sample(), s2 = sample();
        Matrix ws(d, d);
        for (double& x : ws.data()) x = rng.uniform(-1.0, 1.0) / static_cast<double>(d);
        const bofop::AffineMap sig(ws, std::vector<double>(d, 0.0), bofop::Activation::Clamp);
        const auto hd = [](const bofop::ProfileSample& a, const bofop::ProfileSample& b) {
            const auto ma = a.measures();
            const auto mb = b.measures();
            return bofop::hausdorff_set_distance(ma, mb, GroundMetric::l1());
        };
        const double h0 = hd(s1, s2);
        const auto sig_fn = [&](std::span<const double> y) { return sig(y); };
        min_slack = std::min(min_slack, std::max(1.0, sig.lipschitz()) * h0 - hd(bofop::push_signal(s1, sig_fn, d),
                                                                                 bofop::push_signal(s2, sig_fn, d)));
        std::vector<std::size_t> keep;
        for (std::size_t c = 0; c < 2 * k + d; ++c)
            if (rng.bernoulli(0.6)) keep.push_back(c);
        std::vector<DiscreteMeasure> p1, p2;
        for (const auto& m : s1.measures()) p1.push_back(m.project(keep));
        for (const auto& m : s2.measures()) p2.push_back(m.project(keep));
        min_slack = std::min(min_slack, h0 - bofop::hausdorff_set_distance(p1, p2, GroundMetric::l1()));
    }
    return {min_slack >= -1e-9, "300 cases, min slack " + fmt("%.3g", min_slack)};
}

// 7. Relabelling invariance of both distances.
Outcome permutation_invariance() {
    bofop::Rng rng(707);
    double worst_didm = 0.0, worst_action = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto b = random_signal(rng, 2 + rng.below(9), 1 + rng.below(2));
        const auto perm = oracle::random_permutation(rng, b.n());
        const auto pb = b.permuted(perm);
        worst_didm = std::max(worst_didm, bofop::didm_movers_distance(pb, b, 2));
        bofop::ActionMetricOptions opts;
        opts.k_max = 2;
        opts.samples = 8;
        opts.seed = rng.next_u64();
        opts.sampling.permutation = perm;
        worst_action = std::max(worst_action, bofop::action_metric_estimate(pb, b, opts).value);
    }
    return {worst_didm <= 1e-9 && worst_action <= 1e-9,
            "50 graphs, max DIDM " + fmt("%.3g", worst_didm) + ", max action " + fmt("%.3g", worst_action)};
}

// 8. EQUATOR(2000, 0.05) has infinity-norm close to 1.
Outcome equator_norm() {
    double lo = 1e300, hi = -1e300;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        bofop::GeneratorSpec spec;
        spec.kind = bofop::GeneratorSpec::Kind::Equator;
        spec.n = 2000;
        spec.band_eps = 0.05;
        spec.seed = seed;
        const double norm = bofop::infty_norm(bofop::generate(spec).signal);
        lo = std::min(lo, norm);
        hi = std::max(hi, norm);
    }
    return {lo >= 0.95 && hi <= 1.05, "10 seeds, norm in [" + fmt("%.6g", lo) + ", " + fmt("%.6g", hi) + "]"};
}

// 9. Normalized sum: sparse graphs aggregate to nearly nothing, dense ones do not.
Outcome sparse_collapse() {
    double sparse_max = 0.0, dense_min = 1e300;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (bool dense : {false, true}) {
            bofop::GeneratorSpec spec;
            spec.kind = bofop::GeneratorSpec::Kind::ErdosRenyi;
            spec.n = 1000;
            spec.p = dense ? 0.5 : 4.0 / 1000.0;
            spec.aggregation = Aggregation::NormalizedSum;
            spec.seed = seed;
            const auto g = bofop::generate(spec);
            const Matrix af = bofop::apply_operator(g.signal, Matrix(1000, 1, 1.0));
            double mx = 0.0;
            for (double x : af.data()) mx = std::max(mx, x);
            if (dense) {
                dense_min = std::min(dense_min, mx);
            } else {
                sparse_max = std::max(sparse_max, mx);
            }
        }
    }
    return {sparse_max <= 0.02 && dense_min >= 0.4,
            "5 seeds, sparse max " + fmt("%.4g", sparse_max) + ", dense max at least " + fmt("%.4g", dense_min)};
}

// 10. Generalization run from the shipped config.
Outcome generalization() {
    const std::filesystem::path path = std::filesystem::path(BOFOP_SOURCE_DIR) / "configs" / "generalization.json";
    const auto cfg = bofop::parse_experiment_config(bofop::read_json_file(path), path.parent_path());
    const bool schedule = cfg.sizes == std::vector<std::size_t>{250, 1000, 4000, 16000} && cfg.hoeffding_n == 1000 &&
                          cfg.hoeffding_repetitions == 1000 && cfg.hoeffding_k == 0.1 && cfg.reference_factor == 100;
    const auto start = std::chrono::steady_clock::now();
    const auto report = bofop::run_generalization(cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::map<std::string, double> s(report.summary.begin(), report.summary.end());
    const double bound = 2.0 * std::exp(-20.0);
    const bool bound_ok = std::abs(s["hoeffding_bound"] - bound) <= 1e-15 && std::abs(bound - 4.12e-9) < 0.01e-9;
    return {schedule && bound_ok && report.all_checks_pass() && seconds < 600.0,
            "slope " + fmt("%.4f", s["slope"]) + ", " + fmt("%.0f", s["hoeffding_violations"]) +
                " violations in 1000 repetitions (bound " + fmt("%.3g", s["hoeffding_bound"]) + "), " +
                fmt("%.1f", seconds) + " s"};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 11. The CLI reproduces its outputs byte for byte.
Outcome cli_determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "bofop_acceptance_cli";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string cli = BOFOP_CLI_PATH;
    const fs::path golden = fs::path(BOFOP_SOURCE_DIR) / "tests" / "golden";
    std::size_t compared = 0, mismatches = 0, failures = 0;
    auto run = [&](const std::string& args) {
        if (std::system((cli + " " + args + " >/dev/null 2>&1").c_str()) != 0) ++failures;
    };
    auto same = [&](const fs::path& a, const fs::path& b) {
        ++compared;
        if (!fs::exists(a) || slurp(a) != slurp(b)) ++mismatches;
    };
    for (const char* kind : {"convergence", "fineness", "continuity", "generalization"}) {
        const std::string cfg = (golden / (std::string(kind) + ".json")).string();
        for (const char* rep : {"a", "b"}) {
            run("experiment run --config " + cfg + " --out " + (root / rep / kind).string());
        }
        for (const char* file : {"report.csv", "report.json"}) same(root / "a" / kind / file, root / "b" / kind / file);
    }
    const fs::path spec = root / "spec.json";
    bofop::write_text_file(spec, R"({"kind": "erdos_renyi", "n": 12, "p": 0.4, "seed": 9,
        "features": {"kind": "random_uniform", "dim": 1}})");
    for (const char* rep : {"a", "b"}) {
        const fs::path dir = root / rep;
        run("graph generate --spec " + spec.string() + " --out " + (dir / "g.json").string());
        run("distance action " + (dir / "g.json").string() + " " + (root / "a" / "g.json").string() +
            " --k-max 2 --samples 6 --seed 4 > " + (dir / "action.json").string());
        run("distance didm " + (dir / "g.json").string() + " " + (root / "a" / "g.json").string() + " --depth 2 > " +
            (dir / "didm.json").string());
    }
    for (const char* file : {"g.json", "action.json", "didm.json"}) same(root / "a" / file, root / "b" / file);
    return {mismatches == 0 && failures == 0,
            std::to_string(compared) + " files compared, " + std::to_string(mismatches) + " differ, " +
                std::to_string(failures) + " failed runs"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"OT oracle equivalence", ot_oracle},
        {"metric axioms", metric_axioms},
        {"Kantorovich duality sanity", kr_duality},
        {"1-WL equivalence", wl_equivalence},
        {"three-way MPNN commutation", three_way_commutation},
        {"contraction", contraction},
        {"permutation invariance", permutation_invariance},
        {"equator operator norm", equator_norm},
        {"sparse aggregation collapse", sparse_collapse},
        {"generalization skeleton", generalization},
        {"CLI determinism", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << ": " << o.detail << " ["
                  << fmt("%.2f", s) << " s]" << std::endl;
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
