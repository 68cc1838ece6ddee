#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bofop/generators.hpp"
#include "bofop/measure.hpp"
#include "bofop/mpnn.hpp"
#include "bofop/profile.hpp"

namespace bofop {

/// Unreadable or unwritable file, or a document that is not valid JSON.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

[[nodiscard]] Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"dim": d, "atoms": [[...], ...], "weights": [...]}
[[nodiscard]] Json measure_to_json(const DiscreteMeasure& mu);
[[nodiscard]] DiscreteMeasure measure_from_json(const Json& j);

/// {"n", "edges": [[i, j, w], ...], "features", "aggregation", "vertex_weights"?, "kernel"?}
[[nodiscard]] Json graph_to_json(const GraphDocument& doc);
[[nodiscard]] GraphDocument graph_from_json(const Json& j);

/// {"kind", "n", "p", "kernel", "band_eps", "aggregation", "features", "seed"}; features is
/// {"kind": "constant", "value": [...]}, {"kind": "random_uniform", "dim": d} or
/// {"kind": "per_node", "values": [[...], ...]}.
[[nodiscard]] Json generator_to_json(const GeneratorSpec& spec);
[[nodiscard]] GeneratorSpec generator_from_json(const Json& j);

/// {"phi0": map, "layers": [map, ...], "readout": map}; map is
/// {"weights": [[...]], "bias": [...], "activation": name or [names], "lipschitz"?}.
/// A declared "lipschitz" below the certified constant is rejected.
[[nodiscard]] Json model_to_json(const MpnnModel& model);
[[nodiscard]] MpnnModel model_from_json(const Json& j);

[[nodiscard]] Json profile_to_json(const ProfileSample& s);
[[nodiscard]] ProfileSample profile_from_json(const Json& j);

}  // namespace bofop
