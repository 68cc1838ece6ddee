#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bofop/generators.hpp"
#include "bofop/io.hpp"
#include "bofop/mpnn.hpp"
#include "bofop/profile.hpp"

namespace bofop {

enum class ExperimentKind { Convergence, Fineness, Continuity, Generalization };

[[nodiscard]] std::string_view to_string(ExperimentKind k);
[[nodiscard]] ExperimentKind parse_experiment_kind(std::string_view name);

/// Hypotheses for the generalization run: either given models or random ones.
struct HypothesisSpec {
    std::vector<MpnnModel> models;
    std::vector<std::size_t> random_dims;  ///< d, d_0, .., d_L for random models
    std::size_t random_count = 0;
    double random_scale = 1.0;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Convergence;
    Json echo;  ///< the config document as given

    std::uint64_t seed = 0;
    std::size_t depth = 2;
    // action metric estimate
    std::size_t k_max = 2;
    std::size_t samples = 16;
    ProfileStrategy strategy = ProfileStrategy::Mixed;

    std::vector<GeneratorSpec> generators;  ///< n is overridden by `sizes` where used
    std::vector<std::size_t> sizes;
    std::size_t replicates = 1;  ///< convergence: independent size sequences averaged per row

    // fineness
    double eta = 0.01;
    std::size_t pairs = 8;
    double epsilon = 0.1;  ///< bound on DIDM distance for perturbation pairs

    // continuity
    std::optional<MpnnModel> model;

    // generalization
    HypothesisSpec hypotheses;
    double class_prior = 0.5;  ///< probability of label 1 (second generator)
    std::size_t repetitions = 100;
    std::size_t hoeffding_n = 1000;
    std::size_t hoeffding_repetitions = 1000;
    double hoeffding_k = 0.1;
    std::size_t reference_factor = 100;
    double slope_target = -0.5;
    double slope_tolerance = 0.15;
};

/// Parses and validates a config document. Model paths are resolved relative
/// to `base_dir`. Throws std::invalid_argument on schema or range errors and
/// IoError for unreadable model files.
[[nodiscard]] ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir = {});

using Cell = std::variant<double, std::string>;

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
};

struct PlotSpec {
    std::string title;
    std::string x;
    std::vector<std::string> y;
    bool log_x = false;
    bool log_y = false;
    bool lines = true;  ///< false: scatter
};

struct RunReport {
    ExperimentKind kind = ExperimentKind::Convergence;
    Json config;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, double>> summary;
    std::vector<Check> checks;
    PlotSpec plot;
    double wall_seconds = 0.0;  ///< not written to CSV or JSON

    [[nodiscard]] bool all_checks_pass() const;
    [[nodiscard]] std::size_t column(const std::string& name) const;
};

[[nodiscard]] RunReport run_convergence(const ExperimentConfig& cfg);
[[nodiscard]] RunReport run_fineness(const ExperimentConfig& cfg);
[[nodiscard]] RunReport run_continuity(const ExperimentConfig& cfg);
[[nodiscard]] RunReport run_generalization(const ExperimentConfig& cfg);
/// Dispatches on cfg.kind and fills wall_seconds.
[[nodiscard]] RunReport run_experiment(const ExperimentConfig& cfg);

enum class ReportFormat { Csv, Json, Svg };

[[nodiscard]] std::string render_report(const RunReport& report, ReportFormat format);
/// Writes report.csv, report.json and report.svg into `dir` (created if
/// needed). Throws IoError if a file cannot be written.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

/// Shortest decimal string that reads back to the same double.
[[nodiscard]] std::string format_number(double x);

}  // namespace bofop
