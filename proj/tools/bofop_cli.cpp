// bofop: command line front end.
//
// Exit codes: 0 success, 1 I/O or input error, 2 failed checks under --assert.

#include <CLI11.hpp>

#include <iostream>

#include "bofop/experiments.hpp"
#include "bofop/io.hpp"
#include "bofop/mpnn.hpp"
#include "bofop/profile.hpp"
#include "bofop/signal.hpp"
#include "bofop/wl.hpp"

using namespace bofop;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitAssert = 2;

FiniteBofopSignal load_graph(const std::string& path) { return graph_from_json(read_json_file(path)).to_signal(); }

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bofop: operator-signal distances, WL refinement, MPNN evaluation and experiments"};
    app.set_version_flag("--version", std::string(BOFOP_VERSION));
    app.require_subcommand(1);

    // graph generate
    auto* graph = app.add_subcommand("graph", "graph generation");
    graph->require_subcommand(1);
    auto* gen = graph->add_subcommand("generate", "sample a graph from a generator spec");
    std::string spec_path, graph_out;
    gen->add_option("--spec", spec_path, "generator spec JSON")->required();
    gen->add_option("--out", graph_out, "output graph JSON (stdout if omitted)");

    // distance action|didm
    auto* dist = app.add_subcommand("distance", "distance between two graphs");
    dist->require_subcommand(1);
    std::string g1, g2;
    ActionMetricOptions aopt;
    std::string strategy = "mixed";
    auto* action = dist->add_subcommand("action", "truncated action metric estimate");
    action->add_option("g1", g1)->required();
    action->add_option("g2", g2)->required();
    action->add_option("--k-max", aopt.k_max, "largest profile order")->capture_default_str();
    action->add_option("--samples", aopt.samples, "profile members per order")->capture_default_str();
    action->add_option("--strategy", strategy, "signal_only|uniform|sign|wl_cells|color_keyed|mixed")->capture_default_str();
    action->add_option("--seed", aopt.seed, "sampling seed")->capture_default_str();
    std::size_t depth = 2;
    auto* didm = dist->add_subcommand("didm", "DIDM mover's distance");
    didm->add_option("g1", g1)->required();
    didm->add_option("g2", g2)->required();
    didm->add_option("--depth", depth, "IDM depth L")->capture_default_str();

    // wl run
    auto* wl = app.add_subcommand("wl", "color refinement");
    wl->require_subcommand(1);
    auto* wl_run = wl->add_subcommand("run", "classical 1-WL colors and IDM class counts");
    std::string wl_graph;
    std::size_t rounds = 3;
    wl_run->add_option("graph", wl_graph)->required();
    wl_run->add_option("--rounds", rounds)->capture_default_str();

    // mpnn forward
    auto* mpnn = app.add_subcommand("mpnn", "message passing networks");
    mpnn->require_subcommand(1);
    auto* fwd = mpnn->add_subcommand("forward", "evaluate a model on a graph");
    std::string model_path, fwd_graph, via = "bofop";
    fwd->add_option("--model", model_path)->required();
    fwd->add_option("--graph", fwd_graph)->required();
    fwd->add_option("--via", via, "bofop|idm|profile")
        ->check(CLI::IsMember({"bofop", "idm", "profile"}))
        ->capture_default_str();

    // experiment run
    auto* exp = app.add_subcommand("experiment", "experiment runners");
    exp->require_subcommand(1);
    auto* run = exp->add_subcommand("run", "run an experiment config and write report.{csv,json,svg}");
    std::string config_path, out_dir;
    bool assert_mode = false;
    run->add_option("--config", config_path)->required();
    run->add_option("--out", out_dir, "output directory (defaults to the config's \"out\")");
    run->add_flag("--assert", assert_mode, "exit with status 2 if a check fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitIo;
    }

    try {
        if (*gen) {
            const auto g = generate(generator_from_json(read_json_file(spec_path)));
            for (const auto& w : g.warnings) std::cerr << "warning: " << w << '\n';
            const std::string text = graph_to_json(g.document).dump(2) + "\n";
            if (graph_out.empty()) {
                std::cout << text;
            } else {
                write_text_file(graph_out, text);
            }
        } else if (*action) {
            aopt.strategy = parse_profile_strategy(strategy);
            const auto est = action_metric_estimate(load_graph(g1), load_graph(g2), aopt);
            Json j;
            j["metric"] = "action";
            j["value"] = est.value;
            j["per_k"] = est.per_k;
            j["tail_bound"] = est.tail_bound;
            j["k_max"] = est.k_max;
            j["samples"] = est.samples;
            j["strategy"] = std::string(to_string(est.strategy));
            j["seed"] = aopt.seed;
            print(j);
        } else if (*didm) {
            Json j;
            j["metric"] = "didm";
            j["depth"] = depth;
            j["value"] = didm_movers_distance(load_graph(g1), load_graph(g2), depth);
            print(j);
        } else if (*wl_run) {
            const auto b = load_graph(wl_graph);
            Json j;
            j["rounds"] = rounds;
            try {
                j["colors"] = classical_wl_partition(b, rounds);
            } catch (const std::invalid_argument& e) {
                j["colors"] = nullptr;
                j["colors_unavailable"] = e.what();
            }
            const auto idms = compute_idms(b, rounds);
            Json counts = Json::array();
            for (const auto& level : idms.levels) counts.push_back(level.size());
            j["idm_classes_per_level"] = counts;
            print(j);
        } else if (*fwd) {
            const auto model = model_from_json(read_json_file(model_path));
            const auto b = load_graph(fwd_graph);
            std::vector<double> out;
            if (via == "bofop") {
                out = forward_bofop(model, b).readout;
            } else if (via == "idm") {
                out = forward_idm(model, compute_idms(b, model.depth())).readout;
            } else {
                out = forward_profile(model, hidden_signal_profile(model, b));
            }
            Json j;
            j["via"] = via;
            j["readout"] = out;
            print(j);
        } else if (*run) {
            const std::filesystem::path cfg_file = config_path;
            const Json doc = read_json_file(cfg_file);
            const auto cfg = parse_experiment_config(doc, cfg_file.parent_path());
            if (out_dir.empty()) {
                if (!doc.contains("out")) throw std::invalid_argument("no output directory: pass --out or set \"out\"");
                out_dir = (cfg_file.parent_path() / doc["out"].get<std::string>()).string();
            }
            const auto report = run_experiment(cfg);
            emit_report(report, out_dir);
            for (const auto& c : report.checks) {
                std::cout << (c.pass ? "ok    " : "FAIL  ") << c.name << "  value=" << format_number(c.value)
                          << "  threshold=" << format_number(c.threshold) << '\n';
            }
            std::cerr << "wall time: " << report.wall_seconds << " s\n";
            if (assert_mode && !report.all_checks_pass()) return kExitAssert;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
