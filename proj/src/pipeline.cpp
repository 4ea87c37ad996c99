#include "reisda/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "reisda/csv.hpp"
#include "reisda/errors.hpp"
#include "reisda/preprocess.hpp"

namespace reisda {

namespace fs = std::filesystem;

CsvDataset read_dataset_csv(const std::string& path, bool require_labels) {
    const CsvTable table = read_csv(path);
    if (table.header.empty()) throw InvalidInputError(path + ": empty csv");

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (table.header[c].rfind("x_", 0) == 0) feature_cols.push_back(c);
    }
    if (feature_cols.empty()) {
        throw InvalidInputError(path + ": no feature columns (x_*) found");
    }
    const bool has_y = table.has_column("y");
    if (require_labels && !has_y) {
        throw InvalidInputError(path + ": label column 'y' is required here");
    }
    const bool has_t = table.has_column("t");
    const std::size_t y_col = has_y ? table.column("y") : 0;
    const std::size_t t_col = has_t ? table.column("t") : 0;

    CsvDataset out;
    out.data.inputs = Matrix(table.rows.size(), feature_cols.size());
    if (has_y) out.data.labels.reserve(table.rows.size());
    if (has_t) out.time.reserve(table.rows.size());

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < feature_cols.size(); ++c) {
            out.data.inputs(r, c) = parse_double(table.rows[r][feature_cols[c]]);
        }
        if (has_y) out.data.labels.push_back(parse_double(table.rows[r][y_col]));
        if (has_t) out.time.push_back(parse_double(table.rows[r][t_col]));
    }
    if (has_t) {
        for (std::size_t r = 1; r < out.time.size(); ++r) {
            if (out.time[r] < out.time[r - 1]) {
                throw InvalidInputError(path + ": t column must be non-decreasing");
            }
        }
    }
    out.data.validate(path);
    return out;
}

namespace {

struct RawData {
    std::vector<CsvDataset> sources;   // one or more labeled sets
    Matrix targets;
    bool targets_have_time = false;
    std::optional<LabeledSample> calibration;
    std::vector<double> truth;         // may be empty (unscored run)
    std::string fingerprint;
};

RawData load_raw(const ExperimentConfig& cfg) {
    RawData raw;
    if (cfg.dataset.type == DatasetConfig::Type::kFriedman) {
        const Benchmark bench = make_friedman_benchmark(cfg.dataset.friedman);
        CsvDataset src;
        src.data = bench.pair.source;
        raw.sources.push_back(std::move(src));
        raw.targets = bench.pair.target_inputs;
        raw.calibration = bench.pair.calibration;
        raw.truth = bench.target_truth;
        std::ostringstream fp;
        fp << "friedman n_source=" << cfg.dataset.friedman.n_source
           << " n_target=" << cfg.dataset.friedman.n_target << " domain=["
           << cfg.dataset.friedman.domain_low << ',' << cfg.dataset.friedman.domain_high
           << "] shift=" << cfg.dataset.friedman.shift;
        raw.fingerprint = fp.str();
        return raw;
    }

    for (const auto& path : cfg.dataset.source_paths) {
        raw.sources.push_back(read_dataset_csv(path, true));
    }
    CsvDataset target = read_dataset_csv(cfg.dataset.target_path, false);
    raw.targets_have_time = target.has_time();
    raw.targets = std::move(target.data.inputs);

    if (!cfg.dataset.calibration_path.empty()) {
        const CsvDataset cal = read_dataset_csv(cfg.dataset.calibration_path, true);
        if (cal.data.size() != 1) {
            throw InvalidInputError(cfg.dataset.calibration_path +
                                    ": calibration file must hold exactly one row");
        }
        raw.calibration = LabeledSample{cal.data.inputs.row_copy(0), cal.data.labels[0]};
    }
    if (!cfg.dataset.truth_path.empty()) {
        const CsvTable t = read_csv(cfg.dataset.truth_path);
        const std::size_t y = t.column("y");
        for (const auto& row : t.rows) raw.truth.push_back(parse_double(row[y]));
        if (raw.truth.size() != raw.targets.rows()) {
            throw InvalidInputError(cfg.dataset.truth_path +
                                    ": truth row count does not match the target set");
        }
    }
    std::ostringstream fp;
    fp << "csv sources=" << raw.sources.size() << " target_rows=" << raw.targets.rows()
       << " dims=" << raw.targets.cols();
    raw.fingerprint = fp.str();
    return raw;
}

Matrix pooled_inputs(const RawData& raw, bool include_targets) {
    Matrix pool;
    for (const auto& s : raw.sources) pool = vstack(pool, s.data.inputs);
    if (include_targets) {
        pool = vstack(pool, raw.targets);
        if (raw.calibration) pool = append_row(pool, raw.calibration->input);
    }
    return pool;
}

}  // namespace

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg) {
    RawData raw = load_raw(cfg);

    if (raw.truth.empty()) {
        throw InvalidInputError("dataset: sealed truth labels are required for scoring");
    }

    // 1. frame differences (velocity features) per time series
    if (cfg.preprocess.frame_difference) {
        for (auto& s : raw.sources) s.data.inputs = frame_difference(s.data.inputs);
        raw.targets = frame_difference(raw.targets);
        if (raw.calibration) {
            // a single frame carries zero velocity
            Matrix one(1, static_cast<std::size_t>(raw.calibration->input.size()));
            one.set_row(0, raw.calibration->input);
            raw.calibration->input = frame_difference(one).row_copy(0);
        }
    }

    // 2. max-min normalization of inputs
    if (cfg.preprocess.normalize_inputs) {
        const Matrix fit_on = pooled_inputs(
            raw, cfg.preprocess.normalize_fit == PreprocessConfig::Fit::kJoint);
        const MinMaxParams mm = minmax_fit(fit_on);
        for (auto& s : raw.sources) s.data.inputs = minmax_apply(mm, s.data.inputs);
        raw.targets = minmax_apply(mm, raw.targets);
        if (raw.calibration) {
            Matrix one(1, static_cast<std::size_t>(raw.calibration->input.size()));
            one.set_row(0, raw.calibration->input);
            raw.calibration->input = minmax_apply(mm, one).row_copy(0);
        }
    }

    // 3. label scaling (fit over every label a method may see)
    double label_scale = 1.0;
    double label_offset = 0.0;
    if (cfg.preprocess.normalize_labels) {
        double lo = raw.calibration ? raw.calibration->label
                                    : raw.sources.front().data.labels.front();
        double hi = lo;
        for (const auto& s : raw.sources) {
            for (double y : s.data.labels) {
                lo = std::min(lo, y);
                hi = std::max(hi, y);
            }
        }
        if (raw.calibration) {
            lo = std::min(lo, raw.calibration->label);
            hi = std::max(hi, raw.calibration->label);
        }
        if (hi > lo) {
            label_scale = hi - lo;
            label_offset = lo;
        }
        for (auto& s : raw.sources) {
            for (double& y : s.data.labels) y = (y - label_offset) / label_scale;
        }
        if (raw.calibration) {
            raw.calibration->label = (raw.calibration->label - label_offset) / label_scale;
        }
    }

    // 4. calibration point: provided one wins, otherwise the least-mean-
    // distance source sample (single-source only)
    LabeledSample calibration;
    if (raw.calibration) {
        calibration = *raw.calibration;
    } else {
        if (raw.sources.size() != 1) {
            throw InvalidInputError(
                "dataset: calibration file is required when several sources are given");
        }
        calibration = choose_calibration(raw.sources.front().data, raw.targets);
    }

    // 5. dimension reduction on everything, fitted on the pooled inputs;
    // the pre-reduction view is kept for TCA
    std::vector<Dataset> sources_full;
    Matrix targets_full;
    LabeledSample calibration_full;
    const bool reduce = cfg.preprocess.pca_retain > 0 || cfg.preprocess.pca_fraction > 0.0;
    if (reduce) {
        for (const auto& s : raw.sources) sources_full.push_back(s.data);
        targets_full = raw.targets;
        calibration_full = calibration;

        const Matrix fit_on = pooled_inputs(raw, true);
        const PcaParams pca = cfg.preprocess.pca_retain > 0
                                  ? pca_fit(fit_on, cfg.preprocess.pca_retain)
                                  : pca_fit_fraction(fit_on, cfg.preprocess.pca_fraction);
        for (auto& s : raw.sources) s.data.inputs = pca_apply(pca, s.data.inputs);
        raw.targets = pca_apply(pca, raw.targets);
        Matrix one(1, static_cast<std::size_t>(calibration.input.size()));
        one.set_row(0, calibration.input);
        calibration.input = pca_apply(pca, one).row_copy(0);
    }

    // 6. multi-source selection at the calibration point, on the
    // representation the methods will train on
    std::size_t chosen = 0;
    if (raw.sources.size() > 1) {
        std::vector<MlpModel> models;
        models.reserve(raw.sources.size());
        MlpSpec spec = cfg.base;
        spec.seed = cfg.seeds.front();
        for (const auto& s : raw.sources) models.push_back(train(spec, s.data));
        chosen = select_source_model(models, calibration);
    }
    Dataset source = std::move(raw.sources[chosen].data);

    std::optional<DomainPair> tca_pair;
    if (reduce) {
        DomainPair pre;
        pre.source = std::move(sources_full[chosen]);
        pre.target_inputs = std::move(targets_full);
        pre.calibration = std::move(calibration_full);
        tca_pair = std::move(pre);
    }

    // 7. target ordering
    bool by_distance = false;
    switch (cfg.preprocess.ordering) {
        case PreprocessConfig::Ordering::kByDistance: by_distance = true; break;
        case PreprocessConfig::Ordering::kKeepOrder: by_distance = false; break;
        case PreprocessConfig::Ordering::kAuto:
            // time series keep their order; the generated benchmark is
            // already distance-ordered
            by_distance = cfg.dataset.type == DatasetConfig::Type::kCsv && !raw.targets_have_time;
            break;
    }
    if (by_distance) {
        const auto perm =
            order_targets(raw.targets, calibration.input, TargetOrdering::kByDistance);
        raw.targets = apply_permutation(raw.targets, perm);
        raw.truth = apply_permutation(raw.truth, perm);
        if (tca_pair) tca_pair->target_inputs = apply_permutation(tca_pair->target_inputs, perm);
    }

    PreparedExperiment exp;
    exp.pair.source = std::move(source);
    exp.pair.target_inputs = std::move(raw.targets);
    exp.pair.calibration = std::move(calibration);
    exp.truth = std::move(raw.truth);
    exp.label_scale = label_scale;
    exp.label_offset = label_offset;
    exp.fingerprint = raw.fingerprint;
    exp.tca_pair = std::move(tca_pair);
    exp.pair.validate();
    return exp;
}

void write_friedman_bundle(const FriedmanBenchmarkSpec& spec, const std::string& dir) {
    const Benchmark bench = make_friedman_benchmark(spec);
    std::error_code ec;
    fs::create_directories(dir, ec);

    const std::size_t d = bench.pair.dim();
    std::vector<std::string> feature_header(d);
    for (std::size_t j = 0; j < d; ++j) feature_header[j] = "x_" + std::to_string(j + 1);

    CsvTable source;
    source.header = feature_header;
    source.header.push_back("y");
    for (std::size_t i = 0; i < bench.pair.source.size(); ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < d; ++j) {
            row.push_back(format_double(bench.pair.source.inputs(i, j)));
        }
        row.push_back(format_double(bench.pair.source.labels[i]));
        source.rows.push_back(std::move(row));
    }
    write_csv((fs::path(dir) / "source.csv").string(), source);

    CsvTable target;
    target.header = feature_header;
    for (std::size_t i = 0; i < bench.pair.target_size(); ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < d; ++j) {
            row.push_back(format_double(bench.pair.target_inputs(i, j)));
        }
        target.rows.push_back(std::move(row));
    }
    write_csv((fs::path(dir) / "target.csv").string(), target);

    CsvTable calibration;
    calibration.header = source.header;
    {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < d; ++j) {
            row.push_back(format_double(bench.pair.calibration.input[j]));
        }
        row.push_back(format_double(bench.pair.calibration.label));
        calibration.rows.push_back(std::move(row));
    }
    write_csv((fs::path(dir) / "calibration.csv").string(), calibration);

    CsvTable truth;
    truth.header = {"y"};
    for (double y : bench.target_truth) truth.rows.push_back({format_double(y)});
    write_csv((fs::path(dir) / "truth.csv").string(), truth);

    nlohmann::json meta;
    meta["dataset"] = "friedman";
    meta["n_source"] = spec.n_source;
    meta["n_target"] = spec.n_target;
    meta["low"] = spec.domain_low;
    meta["high"] = spec.domain_high;
    meta["shift"] = spec.shift;
    meta["dims"] = spec.dims;
    meta["target_order"] = "ascending distance to the calibration input";
    write_text_file((fs::path(dir) / "meta.json").string(), meta.dump(2) + "\n");
}

}  // namespace reisda
