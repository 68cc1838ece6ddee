#include "bofop/io.hpp"

#include <fstream>
#include <algorithm>

namespace bofop {

namespace {

// Schema problems surface as std::invalid_argument with the offending key.
template <class T>
T get(const Json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("field '") + key + "': " + e.what());
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? get<T>(j, key) : fallback;
}

Matrix matrix_from_json(const Json& rows, std::size_t cols_if_empty = 0) {
    return Matrix::from_rows(rows.get<std::vector<std::vector<double>>>(), cols_if_empty);
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

Json map_to_json(const AffineMap& m) {
    Json j;
    j["weights"] = matrix_to_json(m.weights());
    j["bias"] = m.bias();
    const auto& acts = m.activations();
    if (std::all_of(acts.begin(), acts.end(), [&](Activation a) { return a == acts.front(); }) && !acts.empty()) {
        j["activation"] = std::string(to_string(acts.front()));
    } else {
        Json names = Json::array();
        for (Activation a : acts) names.push_back(std::string(to_string(a)));
        j["activation"] = names;
    }
    j["lipschitz"] = m.lipschitz();
    return j;
}

AffineMap map_from_json(const Json& j, const std::string& where) {
    try {
        const auto rows = get<std::vector<std::vector<double>>>(j, "weights");
        const auto bias = get<std::vector<double>>(j, "bias");
        Matrix w = Matrix::from_rows(rows, 0);
        std::vector<Activation> acts;
        const Json& a = j.at("activation");
        if (a.is_string()) {
            acts.assign(w.rows(), parse_activation(a.get<std::string>()));
        } else {
            for (const auto& name : a) acts.push_back(parse_activation(name.get<std::string>()));
        }
        AffineMap m(std::move(w), bias, std::move(acts));
        if (j.contains("lipschitz") && get<double>(j, "lipschitz") < m.lipschitz() - 1e-12) {
            throw std::invalid_argument("declared lipschitz constant is below the certified " +
                                        std::to_string(m.lipschitz()));
        }
        return m;
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(where + ": " + e.what());
    }
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Json measure_to_json(const DiscreteMeasure& mu) {
    Json j;
    j["dim"] = mu.dim();
    Json atoms = Json::array();
    for (std::size_t i = 0; i < mu.size(); ++i) atoms.push_back(std::vector<double>(mu.atom(i).begin(), mu.atom(i).end()));
    j["atoms"] = atoms;
    j["weights"] = std::vector<double>(mu.weights().begin(), mu.weights().end());
    return j;
}

DiscreteMeasure measure_from_json(const Json& j) {
    return DiscreteMeasure(get<std::size_t>(j, "dim"), get<std::vector<std::vector<double>>>(j, "atoms"),
                           get<std::vector<double>>(j, "weights"));
}

Json graph_to_json(const GraphDocument& doc) {
    Json j;
    j["n"] = doc.n;
    Json edges = Json::array();
    for (const auto& e : doc.edges) edges.push_back(Json::array({e.i, e.j, e.weight}));
    j["edges"] = edges;
    j["features"] = matrix_to_json(doc.features);
    j["aggregation"] = std::string(to_string(doc.aggregation));
    if (doc.vertex_weights) j["vertex_weights"] = *doc.vertex_weights;
    if (doc.kernel) j["kernel"] = matrix_to_json(*doc.kernel);
    return j;
}

GraphDocument graph_from_json(const Json& j) {
    GraphDocument doc;
    doc.n = get<std::size_t>(j, "n");
    for (const auto& e : get<Json>(j, "edges")) {
        if (!e.is_array() || (e.size() != 2 && e.size() != 3)) {
            throw std::invalid_argument("edges: each entry must be [i, j] or [i, j, w]");
        }
        doc.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e.size() == 3 ? e[2].get<double>() : 1.0});
    }
    doc.features = matrix_from_json(get<Json>(j, "features"));
    doc.aggregation = parse_aggregation(get_or<std::string>(j, "aggregation", "sum"));
    if (j.contains("vertex_weights") && !j["vertex_weights"].is_null()) {
        doc.vertex_weights = get<std::vector<double>>(j, "vertex_weights");
    }
    if (j.contains("kernel") && !j["kernel"].is_null()) doc.kernel = matrix_from_json(j["kernel"], doc.n);
    return doc;
}

Json generator_to_json(const GeneratorSpec& spec) {
    Json j;
    j["kind"] = std::string(to_string(spec.kind));
    j["n"] = spec.n;
    if (spec.kind == GeneratorSpec::Kind::ErdosRenyi) j["p"] = spec.p;
    if (spec.kind == GeneratorSpec::Kind::GraphonSample) j["kernel"] = spec.kernel_expr;
    if (spec.kind == GeneratorSpec::Kind::Equator) j["band_eps"] = spec.band_eps;
    j["aggregation"] = std::string(to_string(spec.aggregation));
    Json f;
    switch (spec.features.kind) {
        case FeatureSpec::Kind::Constant:
            f["kind"] = "constant";
            f["value"] = spec.features.constant;
            break;
        case FeatureSpec::Kind::RandomUniform:
            f["kind"] = "random_uniform";
            f["dim"] = spec.features.dim;
            break;
        case FeatureSpec::Kind::PerNode:
            f["kind"] = "per_node";
            f["values"] = matrix_to_json(spec.features.per_node);
            break;
    }
    j["features"] = f;
    j["seed"] = spec.seed;
    return j;
}

GeneratorSpec generator_from_json(const Json& j) {
    GeneratorSpec spec;
    spec.kind = parse_generator_kind(get<std::string>(j, "kind"));
    spec.n = get<std::size_t>(j, "n");
    spec.p = get_or<double>(j, "p", spec.p);
    spec.kernel_expr = get_or<std::string>(j, "kernel", spec.kernel_expr);
    spec.band_eps = get_or<double>(j, "band_eps", spec.band_eps);
    spec.aggregation = parse_aggregation(get_or<std::string>(j, "aggregation", "sum"));
    spec.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("features")) {
        const Json& f = j["features"];
        const auto kind = get<std::string>(f, "kind");
        if (kind == "constant") {
            spec.features.kind = FeatureSpec::Kind::Constant;
            spec.features.constant = get_or<std::vector<double>>(f, "value", {1.0});
        } else if (kind == "random_uniform") {
            spec.features.kind = FeatureSpec::Kind::RandomUniform;
            spec.features.dim = get_or<std::size_t>(f, "dim", 1);
        } else if (kind == "per_node") {
            spec.features.kind = FeatureSpec::Kind::PerNode;
            spec.features.per_node = matrix_from_json(get<Json>(f, "values"));
        } else {
            throw std::invalid_argument("features: unknown kind '" + kind + "'");
        }
    }
    return spec;
}

Json model_to_json(const MpnnModel& model) {
    Json j;
    j["phi0"] = map_to_json(model.phi0);
    Json layers = Json::array();
    for (const auto& l : model.layers) layers.push_back(map_to_json(l));
    j["layers"] = layers;
    j["readout"] = map_to_json(model.readout);
    return j;
}

MpnnModel model_from_json(const Json& j) {
    MpnnModel m;
    m.phi0 = map_from_json(get<Json>(j, "phi0"), "phi0");
    std::size_t index = 1;
    for (const auto& l : get_or<Json>(j, "layers", Json::array())) {
        m.layers.push_back(map_from_json(l, "layer " + std::to_string(index++)));
    }
    m.readout = map_from_json(get<Json>(j, "readout"), "readout");
    m.validate();
    return m;
}

Json profile_to_json(const ProfileSample& s) {
    Json j;
    j["k"] = s.k;
    j["d"] = s.d;
    j["strategy"] = std::string(to_string(s.strategy));
    j["seed"] = s.seed;
    j["source_norm_bound"] = s.source_norm_bound;
    j["diagonal_empty"] = s.diagonal_empty;
    Json members = Json::array();
    for (const auto& m : s.members) {
        Json mj;
        mj["measure"] = measure_to_json(m.measure);
        if (m.test_vectors) mj["test_vectors"] = matrix_to_json(*m.test_vectors);
        members.push_back(mj);
    }
    j["members"] = members;
    return j;
}

ProfileSample profile_from_json(const Json& j) {
    ProfileSample s;
    s.k = get<std::size_t>(j, "k");
    s.d = get<std::size_t>(j, "d");
    s.strategy = parse_profile_strategy(get_or<std::string>(j, "strategy", "signal_only"));
    s.seed = get_or<std::uint64_t>(j, "seed", 0);
    s.source_norm_bound = get_or<double>(j, "source_norm_bound", 0.0);
    s.diagonal_empty = get_or<bool>(j, "diagonal_empty", false);
    for (const auto& mj : get<Json>(j, "members")) {
        PDistribution p{s.k, s.d, measure_from_json(get<Json>(mj, "measure")), std::nullopt};
        if (p.measure.dim() != 2 * s.k + s.d) throw std::invalid_argument("members: measure dimension must be 2k + d");
        if (mj.contains("test_vectors")) p.test_vectors = matrix_from_json(mj["test_vectors"], s.k);
        s.members.push_back(std::move(p));
    }
    return s;
}

}  // namespace bofop
