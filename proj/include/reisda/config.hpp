#pragma once

#include "reisda/datagen.hpp"
#include "reisda/evaluation.hpp"
#include "reisda/mlp.hpp"

#include <string>
#include <vector>

namespace reisda {

struct DatasetConfig {
    enum class Type { kFriedman, kCsv };
    Type type = Type::kFriedman;

    FriedmanBenchmarkSpec friedman;

    // csv mode: one or more labeled source files, one target file, optional
    // calibration and truth files
    std::vector<std::string> source_paths;
    std::string target_path;
    std::string calibration_path;
    std::string truth_path;
};

struct PreprocessConfig {
    enum class Fit { kJoint, kSource };
    enum class Ordering { kAuto, kByDistance, kKeepOrder };

    bool normalize_inputs = false;
    bool normalize_labels = false;
    Fit normalize_fit = Fit::kJoint;
    bool frame_difference = false;
    std::size_t pca_retain = 0;    // 0 = off
    double pca_fraction = 0.0;     // alternative to pca_retain; 0 = off
    Ordering ordering = Ordering::kAuto;
};

struct ExperimentConfig {
    int schema_version = 1;
    DatasetConfig dataset;
    PreprocessConfig preprocess;
    MlpSpec base;
    std::vector<MethodConfig> methods;
    std::vector<std::uint64_t> seeds;
    std::string output_dir = "out";
};

// Parses and validates the JSON config; throws InvalidInputError with a
// field-level message on any problem.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical JSON snapshot, embedded in reports.
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace reisda
