#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "reisda/config.hpp"
#include "reisda/csv.hpp"
#include "reisda/errors.hpp"
#include "reisda/pipeline.hpp"

using namespace reisda;

namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

const char* kFriedmanConfig = R"({
  "schema_version": 1,
  "dataset": {"type": "friedman", "n_source": 20, "n_target": 8},
  "preprocess": {"normalize_labels": true},
  "base": {"layers": [5, 6, 1], "learning_rate": 0.1, "epochs": 30,
           "update_mode": "per_sample"},
  "methods": [{"name": "baseline"}, {"name": "reisda", "eta": 2, "warm_start": true}],
  "seeds": [1, 2],
  "output_dir": "out"
})";

}  // namespace

TEST_CASE("csv parse and format round trip with quoting") {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{"plain", "with,comma"}, {"has \"quotes\"", "multi\nline"}};
    const CsvTable back = parse_csv(format_csv(t));
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
}

TEST_CASE("csv reader rejects ragged rows and unterminated quotes") {
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), InvalidInputError);
    CHECK_THROWS_AS(parse_csv("a,b\n\"unterminated,1\n"), InvalidInputError);
    CHECK_THROWS_AS(parse_double("not-a-number"), InvalidInputError);
}

TEST_CASE("config parsing validates its input") {
    CHECK_THROWS_AS(parse_config("this is not json"), InvalidInputError);
    CHECK_THROWS_AS(parse_config("{}"), InvalidInputError);  // missing schema_version
    CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})"), InvalidInputError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"schema_version":1,"dataset":{"type":"friedman"},"base":{"layers":[5,1]},"methods":[{"name":"bogus"}]})"),
        InvalidInputError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"schema_version":1,"dataset":{"type":"csv","target":"t.csv"},"base":{"layers":[5,1]},"methods":["baseline"]})"),
        InvalidInputError);  // no sources

    const auto cfg = parse_config(kFriedmanConfig);
    CHECK(cfg.dataset.friedman.n_source == 20);
    CHECK(cfg.base.epochs == 30);
    CHECK(cfg.methods.size() == 2);
    CHECK(cfg.methods[1].warm_start);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("prepare_experiment normalizes labels and keeps raw truth") {
    const auto cfg = parse_config(kFriedmanConfig);
    const auto exp = prepare_experiment(cfg);
    CHECK(exp.pair.source_size() == 20);
    CHECK(exp.pair.target_size() == 8);
    CHECK(exp.label_scale > 1.0);
    for (double y : exp.pair.source.labels) {
        CHECK(y >= 0.0);
        CHECK(y <= 1.0);
    }
    // truth stays in raw units ~ [0, 35]
    bool any_big = false;
    for (double y : exp.truth) any_big = any_big || y > 2.0;
    CHECK(any_big);
    CHECK(!exp.tca_pair.has_value());
}

TEST_CASE("generated bundles are byte-identical and reproduce the inline benchmark") {
    const std::string dir = temp_dir("reisda_bundle");
    FriedmanBenchmarkSpec spec;
    spec.n_source = 20;
    spec.n_target = 8;
    write_friedman_bundle(spec, dir);
    const std::string first = read_text_file(dir + "/source.csv");
    write_friedman_bundle(spec, dir);
    CHECK(read_text_file(dir + "/source.csv") == first);

    // run the same experiment from the CSV bundle and inline generation
    auto cfg = parse_config(kFriedmanConfig);
    const auto inline_exp = prepare_experiment(cfg);

    cfg.dataset.type = DatasetConfig::Type::kCsv;
    cfg.dataset.source_paths = {dir + "/source.csv"};
    cfg.dataset.target_path = dir + "/target.csv";
    cfg.dataset.calibration_path = dir + "/calibration.csv";
    cfg.dataset.truth_path = dir + "/truth.csv";
    cfg.preprocess.ordering = PreprocessConfig::Ordering::kKeepOrder;  // already ordered
    const auto csv_exp = prepare_experiment(cfg);

    CHECK(csv_exp.pair.source.inputs == inline_exp.pair.source.inputs);
    CHECK(csv_exp.pair.source.labels == inline_exp.pair.source.labels);
    CHECK(csv_exp.pair.target_inputs == inline_exp.pair.target_inputs);
    CHECK(csv_exp.pair.calibration.input == inline_exp.pair.calibration.input);
    CHECK(csv_exp.truth == inline_exp.truth);
    fs::remove_all(dir);
}

TEST_CASE("dataset csv contract: x_ columns, y label, t time marker") {
    const std::string dir = temp_dir("reisda_csv_contract");
    write_text_file(dir + "/good.csv", "t,x_1,x_2,y\n0,1.0,2.0,3.0\n1,1.5,2.5,3.5\n");
    const auto ds = read_dataset_csv(dir + "/good.csv", true);
    CHECK(ds.data.dim() == 2);
    CHECK(ds.data.size() == 2);
    CHECK(ds.has_time());
    CHECK(ds.data.inputs(1, 1) == 2.5);

    write_text_file(dir + "/no_features.csv", "a,y\n1,2\n");
    CHECK_THROWS_AS(read_dataset_csv(dir + "/no_features.csv", false), InvalidInputError);
    write_text_file(dir + "/unlabeled.csv", "x_1\n1\n");
    CHECK_THROWS_AS(read_dataset_csv(dir + "/unlabeled.csv", true), InvalidInputError);
    CHECK_THROWS_AS(read_dataset_csv(dir + "/missing.csv", true), IoError);
    write_text_file(dir + "/bad_time.csv", "t,x_1,y\n2,1,1\n1,2,2\n");
    CHECK_THROWS_AS(read_dataset_csv(dir + "/bad_time.csv", true), InvalidInputError);
    fs::remove_all(dir);
}

TEST_CASE("multi-source csv pipeline with differencing, normalization and pca") {
    const std::string dir = temp_dir("reisda_multisource");

    // three subjects; the target's generating law matches subject 1
    auto write_subject = [&](const std::string& name, double offset, std::size_t rows) {
        CsvTable t;
        t.header = {"t", "x_1", "x_2", "x_3", "y"};
        for (std::size_t i = 0; i < rows; ++i) {
            const double phase = static_cast<double>(i) / static_cast<double>(rows);
            const double u = std::sin(6.28318 * phase);
            std::vector<std::string> row{
                format_double(static_cast<double>(i)), format_double(u + offset),
                format_double(0.5 * u + offset), format_double(offset),
                format_double(10.0 * u + offset)};
            t.rows.push_back(std::move(row));
        }
        write_csv(dir + "/" + name, t);
    };
    write_subject("s0.csv", 0.0, 24);
    write_subject("s1.csv", 2.0, 24);
    write_subject("s2.csv", 4.0, 24);
    write_subject("target_full.csv", 2.1, 16);

    // strip y from the target file, keep it as truth
    const CsvTable full = read_csv(dir + "/target_full.csv");
    CsvTable target;
    target.header = {"t", "x_1", "x_2", "x_3"};
    CsvTable truth;
    truth.header = {"y"};
    CsvTable calibration;
    calibration.header = {"x_1", "x_2", "x_3", "y"};
    for (std::size_t i = 0; i < full.rows.size(); ++i) {
        target.rows.push_back(
            {full.rows[i][0], full.rows[i][1], full.rows[i][2], full.rows[i][3]});
        truth.rows.push_back({full.rows[i][4]});
    }
    calibration.rows.push_back(
        {full.rows[0][1], full.rows[0][2], full.rows[0][3], full.rows[0][4]});
    write_csv(dir + "/target.csv", target);
    write_csv(dir + "/truth.csv", truth);
    write_csv(dir + "/calibration.csv", calibration);

    ExperimentConfig cfg;
    cfg.dataset.type = DatasetConfig::Type::kCsv;
    cfg.dataset.source_paths = {dir + "/s0.csv", dir + "/s1.csv", dir + "/s2.csv"};
    cfg.dataset.target_path = dir + "/target.csv";
    cfg.dataset.calibration_path = dir + "/calibration.csv";
    cfg.dataset.truth_path = dir + "/truth.csv";
    cfg.preprocess.normalize_inputs = true;
    cfg.preprocess.normalize_labels = true;
    cfg.preprocess.frame_difference = true;
    cfg.preprocess.pca_retain = 4;
    cfg.base.layer_sizes = {4, 6, 1};
    cfg.base.epochs = 200;
    cfg.base.update_mode = UpdateMode::kPerSample;
    cfg.seeds = {1};
    cfg.methods = {{.name = "baseline"}};

    const auto exp = prepare_experiment(cfg);
    // subject 1 generates the target, so the selection rule must pick it
    // (its labels match the calibration sample's law)
    CHECK(exp.pair.source_size() == 24);
    const double source_mean_label =
        std::accumulate(exp.pair.source.labels.begin(), exp.pair.source.labels.end(), 0.0) /
        24.0;
    // subject 1 labels center near 2.0 raw; subjects 0/2 near 0 and 4
    const double raw_mean = source_mean_label * exp.label_scale + exp.label_offset;
    CHECK(raw_mean == doctest::Approx(2.0).epsilon(0.25));

    // pca reduced the method view to 4 columns, tca view kept 6 (3 + 3 diffs)
    CHECK(exp.pair.target_inputs.cols() == 4);
    REQUIRE(exp.tca_pair.has_value());
    CHECK(exp.tca_pair->target_inputs.cols() == 6);
    CHECK(exp.tca_pair->source.inputs.rows() == 24);
    // time series: original order preserved
    CHECK(exp.truth.size() == 16);
    fs::remove_all(dir);
}

TEST_CASE("config json snapshot is parseable and stable") {
    const auto cfg = parse_config(kFriedmanConfig);
    const std::string snap = config_to_json(cfg);
    const auto again = parse_config(snap);
    CHECK(config_to_json(again) == snap);
}
