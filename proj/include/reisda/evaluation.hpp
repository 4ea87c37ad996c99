#pragma once

#include "reisda/adaptation.hpp"
#include "reisda/dataset.hpp"
#include "reisda/mlp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace reisda {

// sqrt(mean((predicted - truth)^2))
double rmse(const std::vector<double>& predicted, const std::vector<double>& truth);

double median(std::vector<double> values);

// What the comparison harness feeds every method: the problem in the space
// the methods train in, plus the sealed truth in raw units and the affine
// map that takes method output back to raw units. Methods never see truth.
struct PreparedExperiment {
    DomainPair pair;
    std::vector<double> truth;   // raw units, aligned with pair.target_inputs
    double label_scale = 1.0;    // raw = normalized * scale + offset
    double label_offset = 0.0;
    std::string fingerprint;     // dataset description recorded in reports

    // TCA runs on the inputs as they were before dimension reduction; when
    // the pipeline applied PCA this holds the pre-PCA view of the problem.
    std::optional<DomainPair> tca_pair;

    const DomainPair& tca_view() const { return tca_pair ? *tca_pair : pair; }
};

struct MethodConfig {
    std::string name;  // baseline | kmm | tca | isda | reisda
    std::size_t eta = 2;
    bool warm_start = false;
    KmmConfig kmm;
    TcaConfig tca;
};

struct SeedRun {
    std::uint64_t seed = 0;
    double rmse_value = 0.0;
    std::vector<double> predictions;  // raw units
    std::vector<double> abs_errors;
    std::vector<double> loss_trace;   // raw units; empty for one-shot methods
    std::string error;                // non-empty marks a failed run

    bool ok() const { return error.empty(); }
    bool operator==(const SeedRun&) const = default;
};

struct MethodReport {
    std::string name;
    std::vector<SeedRun> runs;
    double median_rmse = 0.0;
    double mean_rmse = 0.0;
    double min_rmse = 0.0;
    double max_rmse = 0.0;
    std::size_t representative = 0;  // run whose RMSE is closest to the median

    bool operator==(const MethodReport&) const = default;
};

struct RunReport {
    std::string experiment;  // dataset fingerprint / benchmark description
    std::string config_snapshot;
    // multi-seed runs summarize by the median; recorded so readers of the
    // report know single-run numbers were not used
    std::string aggregation = "median over seeds";
    std::vector<std::uint64_t> seeds;
    std::vector<double> truth;
    std::vector<MethodReport> methods;

    bool any_failures() const;
    const MethodReport* find(const std::string& name) const;
    bool operator==(const RunReport&) const = default;
};

// Run one method for one seed; the base spec's seed field is replaced by
// `seed`. Failures are captured in SeedRun::error, not thrown.
SeedRun run_method(const PreparedExperiment& exp, const MethodConfig& method,
                   const MlpSpec& base, std::uint64_t seed);

// Fill the aggregate fields of a MethodReport from its runs.
void summarize_method(MethodReport& report);

// Every (method, seed) pair on identical data; per-method RMSE aggregated
// by the median across seeds.
RunReport run_comparison(const PreparedExperiment& exp, const std::vector<MethodConfig>& methods,
                         const MlpSpec& base, const std::vector<std::uint64_t>& seeds);

struct EtaTrace {
    std::size_t eta = 0;
    // per_seed[s][n] = RMSE over all targets labeled after iteration n,
    // in raw units
    std::vector<std::vector<double>> per_seed;

    std::vector<double> final_values() const;
};

// Re-ISDA labeled-point RMSE traces for each block size.
std::vector<EtaTrace> eta_sweep(const PreparedExperiment& exp,
                                const std::vector<std::size_t>& etas, const MlpSpec& base,
                                bool warm_start, const std::vector<std::uint64_t>& seeds);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

// Writes report.json, table.csv, predictions.csv, traces.csv and plot.svg
// into dir (created if missing).
void emit_report(const RunReport& report, const std::string& dir);

// Writes traces.csv and plot.svg for an eta sweep.
void emit_sweep(const std::vector<EtaTrace>& traces, const std::string& dir);

}  // namespace reisda
