#include "reisda/config.hpp"

#include <set>

#include <json.hpp>

#include "reisda/csv.hpp"
#include "reisda/errors.hpp"

namespace reisda {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw InvalidInputError("config: " + msg); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

MlpSpec parse_base(const json& j) {
    MlpSpec spec;
    if (!j.contains("layers")) fail("base.layers is required");
    spec.layer_sizes = j.at("layers").get<std::vector<std::size_t>>();
    spec.learning_rate = get_or(j, "learning_rate", 0.1);
    spec.epochs = get_or(j, "epochs", 300);
    spec.activation = activation_from_string(get_or<std::string>(j, "activation", "tanh"));
    spec.update_mode = update_mode_from_string(get_or<std::string>(j, "update_mode", "full_batch"));
    spec.seed = get_or<std::uint64_t>(j, "seed", 0);
    spec.validate();
    return spec;
}

MethodConfig parse_method(const json& j) {
    MethodConfig m;
    if (j.is_string()) {
        m.name = j.get<std::string>();
    } else {
        m.name = j.at("name").get<std::string>();
        m.eta = get_or<std::size_t>(j, "eta", 2);
        m.warm_start = get_or(j, "warm_start", false);
        m.kmm.bandwidth = get_or(j, "bandwidth", m.kmm.bandwidth);
        m.kmm.box_upper = get_or(j, "box", m.kmm.box_upper);
        m.kmm.sum_slack = get_or(j, "slack", m.kmm.sum_slack);
        m.kmm.qp_tol = get_or(j, "qp_tol", m.kmm.qp_tol);
        m.kmm.qp_max_iter = get_or(j, "qp_max_iter", m.kmm.qp_max_iter);
        m.tca.bandwidth = get_or(j, "bandwidth", m.tca.bandwidth);
        m.tca.latent_dim = get_or<std::size_t>(j, "latent_dim", m.tca.latent_dim);
        m.tca.mu = get_or(j, "mu", m.tca.mu);
    }
    static const std::set<std::string> known{"baseline", "kmm", "tca", "isda", "reisda"};
    if (!known.contains(m.name)) fail("unknown method '" + m.name + "'");
    if (m.eta == 0) fail("method eta must be at least 1");
    return m;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    cfg.schema_version = get_or(j, "schema_version", 0);
    if (cfg.schema_version != 1) fail("schema_version must be 1");

    if (!j.contains("dataset")) fail("dataset section is required");
    const json& d = j.at("dataset");
    const auto type = d.at("type").get<std::string>();
    if (type == "friedman") {
        cfg.dataset.type = DatasetConfig::Type::kFriedman;
        cfg.dataset.friedman.n_source = get_or<std::size_t>(d, "n_source", 80);
        cfg.dataset.friedman.n_target = get_or<std::size_t>(d, "n_target", 41);
        cfg.dataset.friedman.domain_low = get_or(d, "low", 0.2);
        cfg.dataset.friedman.domain_high = get_or(d, "high", 1.2);
        cfg.dataset.friedman.shift = get_or(d, "shift", 0.2);
        cfg.dataset.friedman.validate();
    } else if (type == "csv") {
        cfg.dataset.type = DatasetConfig::Type::kCsv;
        if (d.contains("sources")) {
            cfg.dataset.source_paths = d.at("sources").get<std::vector<std::string>>();
        } else if (d.contains("source")) {
            cfg.dataset.source_paths = {d.at("source").get<std::string>()};
        }
        if (cfg.dataset.source_paths.empty()) fail("csv dataset needs source or sources");
        cfg.dataset.target_path = get_or<std::string>(d, "target", "");
        if (cfg.dataset.target_path.empty()) fail("csv dataset needs target");
        cfg.dataset.calibration_path = get_or<std::string>(d, "calibration", "");
        cfg.dataset.truth_path = get_or<std::string>(d, "truth", "");
    } else {
        fail("dataset.type must be 'friedman' or 'csv'");
    }

    if (j.contains("preprocess")) {
        const json& p = j.at("preprocess");
        cfg.preprocess.normalize_inputs = get_or(p, "normalize_inputs", false);
        cfg.preprocess.normalize_labels = get_or(p, "normalize_labels", false);
        const auto fit = get_or<std::string>(p, "normalize_fit", "joint");
        if (fit == "joint") {
            cfg.preprocess.normalize_fit = PreprocessConfig::Fit::kJoint;
        } else if (fit == "source") {
            cfg.preprocess.normalize_fit = PreprocessConfig::Fit::kSource;
        } else {
            fail("normalize_fit must be 'joint' or 'source'");
        }
        cfg.preprocess.frame_difference = get_or(p, "frame_difference", false);
        cfg.preprocess.pca_retain = get_or<std::size_t>(p, "pca_retain", 0);
        cfg.preprocess.pca_fraction = get_or(p, "pca_fraction", 0.0);
        if (cfg.preprocess.pca_retain > 0 && cfg.preprocess.pca_fraction > 0.0) {
            fail("choose either pca_retain or pca_fraction, not both");
        }
        const auto ord = get_or<std::string>(p, "ordering", "auto");
        if (ord == "auto") {
            cfg.preprocess.ordering = PreprocessConfig::Ordering::kAuto;
        } else if (ord == "by_distance") {
            cfg.preprocess.ordering = PreprocessConfig::Ordering::kByDistance;
        } else if (ord == "keep_order") {
            cfg.preprocess.ordering = PreprocessConfig::Ordering::kKeepOrder;
        } else {
            fail("ordering must be 'auto', 'by_distance' or 'keep_order'");
        }
    }

    if (!j.contains("base")) fail("base section is required");
    cfg.base = parse_base(j.at("base"));

    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty()) {
        fail("methods must be a non-empty array");
    }
    for (const auto& mj : j.at("methods")) cfg.methods.push_back(parse_method(mj));

    cfg.seeds = get_or(j, "seeds", std::vector<std::uint64_t>{0});
    if (cfg.seeds.empty()) fail("seeds must be non-empty");
    cfg.output_dir = get_or<std::string>(j, "output_dir", "out");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_text_file(path));
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    json d;
    if (cfg.dataset.type == DatasetConfig::Type::kFriedman) {
        d["type"] = "friedman";
        d["n_source"] = cfg.dataset.friedman.n_source;
        d["n_target"] = cfg.dataset.friedman.n_target;
        d["low"] = cfg.dataset.friedman.domain_low;
        d["high"] = cfg.dataset.friedman.domain_high;
        d["shift"] = cfg.dataset.friedman.shift;
    } else {
        d["type"] = "csv";
        d["sources"] = cfg.dataset.source_paths;
        d["target"] = cfg.dataset.target_path;
        if (!cfg.dataset.calibration_path.empty()) d["calibration"] = cfg.dataset.calibration_path;
        if (!cfg.dataset.truth_path.empty()) d["truth"] = cfg.dataset.truth_path;
    }
    j["dataset"] = std::move(d);

    json p;
    p["normalize_inputs"] = cfg.preprocess.normalize_inputs;
    p["normalize_labels"] = cfg.preprocess.normalize_labels;
    p["normalize_fit"] =
        cfg.preprocess.normalize_fit == PreprocessConfig::Fit::kJoint ? "joint" : "source";
    p["frame_difference"] = cfg.preprocess.frame_difference;
    p["pca_retain"] = cfg.preprocess.pca_retain;
    p["pca_fraction"] = cfg.preprocess.pca_fraction;
    switch (cfg.preprocess.ordering) {
        case PreprocessConfig::Ordering::kAuto: p["ordering"] = "auto"; break;
        case PreprocessConfig::Ordering::kByDistance: p["ordering"] = "by_distance"; break;
        case PreprocessConfig::Ordering::kKeepOrder: p["ordering"] = "keep_order"; break;
    }
    j["preprocess"] = std::move(p);

    json b;
    b["layers"] = cfg.base.layer_sizes;
    b["learning_rate"] = cfg.base.learning_rate;
    b["epochs"] = cfg.base.epochs;
    b["activation"] = to_string(cfg.base.activation);
    b["update_mode"] = to_string(cfg.base.update_mode);
    j["base"] = std::move(b);

    json methods = json::array();
    for (const auto& m : cfg.methods) {
        json mj;
        mj["name"] = m.name;
        if (m.name == "isda" || m.name == "reisda") {
            mj["eta"] = m.eta;
            mj["warm_start"] = m.warm_start;
        } else if (m.name == "kmm") {
            mj["bandwidth"] = m.kmm.bandwidth;
            mj["box"] = m.kmm.box_upper;
            mj["slack"] = m.kmm.sum_slack;
        } else if (m.name == "tca") {
            mj["bandwidth"] = m.tca.bandwidth;
            mj["latent_dim"] = m.tca.latent_dim;
            mj["mu"] = m.tca.mu;
        }
        methods.push_back(std::move(mj));
    }
    j["methods"] = std::move(methods);
    j["seeds"] = cfg.seeds;
    j["output_dir"] = cfg.output_dir;
    return j.dump(2);
}

}  // namespace reisda
