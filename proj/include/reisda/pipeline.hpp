#pragma once

#include "reisda/config.hpp"
#include "reisda/evaluation.hpp"

#include <string>

namespace reisda {

// Full ingestion + preprocessing chain: load (or generate) the dataset,
// frame-difference time series, normalize, reduce dimensions, pick the
// source when several are given, order the targets, and package everything
// the harness needs.
PreparedExperiment prepare_experiment(const ExperimentConfig& cfg);

// Writes source.csv, target.csv, calibration.csv, truth.csv (sealed) and
// meta.json for a generated benchmark. Regeneration is byte-identical.
void write_friedman_bundle(const FriedmanBenchmarkSpec& spec, const std::string& dir);

// One labeled time-series CSV file per the dataset contract: header row,
// x_* feature columns, optional t column, y label column.
struct CsvDataset {
    Dataset data;
    std::vector<double> time;  // empty when no t column
    bool has_time() const { return !time.empty(); }
};
CsvDataset read_dataset_csv(const std::string& path, bool require_labels);

}  // namespace reisda
