#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reisda/adaptation.hpp"
#include "reisda/config.hpp"
#include "reisda/csv.hpp"
#include "reisda/errors.hpp"
#include "reisda/evaluation.hpp"
#include "reisda/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMethodFailed = 1;
constexpr int kExitUsage = 2;

bool use_color() {
    if (std::getenv("NO_COLOR") != nullptr) return false;
    return isatty(fileno(stdout)) != 0;
}

std::string paint(const std::string& text, const char* code) {
    if (!use_color()) return text;
    return std::string("\033[") + code + "m" + text + "\033[0m";
}

int cmd_gen(const reisda::FriedmanBenchmarkSpec& spec, const std::string& out_dir) {
    reisda::write_friedman_bundle(spec, out_dir);
    std::cout << "wrote benchmark bundle to " << out_dir << " (source " << spec.n_source
              << " rows, target " << spec.n_target << " rows)\n";
    return kExitOk;
}

int cmd_run(const std::string& config_path) {
    const auto cfg = reisda::load_config(config_path);
    const auto exp = reisda::prepare_experiment(cfg);

    reisda::RunReport report;
    report.experiment = exp.fingerprint;
    report.seeds = cfg.seeds;
    report.truth = exp.truth;
    report.config_snapshot = reisda::config_to_json(cfg);

    reisda::CsvTable timings;
    timings.header = {"method", "wall_ms"};

    for (const auto& method : cfg.methods) {
        const auto started = std::chrono::steady_clock::now();
        reisda::MethodReport mr;
        mr.name = method.name;
        for (const auto seed : cfg.seeds) {
            mr.runs.push_back(reisda::run_method(exp, method, cfg.base, seed));
        }
        reisda::summarize_method(mr);
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        timings.rows.push_back({method.name, std::to_string(elapsed)});

        std::size_t failures = 0;
        for (const auto& r : mr.runs) {
            if (!r.ok()) ++failures;
        }
        if (failures == mr.runs.size()) {
            std::cout << "[" << method.name << "] " << paint("failed", "31") << ": "
                      << mr.runs.front().error << " (" << elapsed << " ms)\n";
        } else {
            std::cout << "[" << method.name << "] median RMSE "
                      << paint(reisda::format_double(mr.median_rmse), "32") << " over "
                      << mr.runs.size() - failures << " seed(s)";
            if (failures > 0) std::cout << ", " << failures << " failed";
            std::cout << " (" << elapsed << " ms)\n";
        }
        report.methods.push_back(std::move(mr));
    }

    reisda::emit_report(report, cfg.output_dir);
    reisda::write_csv(cfg.output_dir + "/timings.csv", timings);
    std::cout << "report written to " << cfg.output_dir << "\n";
    return report.any_failures() ? kExitMethodFailed : kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::size_t>& etas) {
    const auto cfg = reisda::load_config(config_path);
    const auto exp = reisda::prepare_experiment(cfg);

    bool warm_start = false;
    for (const auto& m : cfg.methods) {
        if (m.name == "reisda") warm_start = m.warm_start;
    }
    const auto traces = reisda::eta_sweep(exp, etas, cfg.base, warm_start, cfg.seeds);
    for (const auto& t : traces) {
        const auto finals = t.final_values();
        std::cout << "eta=" << t.eta << ": " << t.per_seed.front().size()
                  << " iterations, median final RMSE "
                  << reisda::format_double(reisda::median(finals)) << "\n";
    }
    reisda::emit_sweep(traces, cfg.output_dir);
    std::cout << "sweep written to " << cfg.output_dir << "\n";
    return kExitOk;
}

int cmd_oracle(const std::string& config_path, const std::vector<double>& grid) {
    const auto cfg = reisda::load_config(config_path);
    const auto exp = reisda::prepare_experiment(cfg);

    reisda::AdaptationConfig ad;
    ad.base = cfg.base;
    ad.base.seed = cfg.seeds.front();
    for (const auto& m : cfg.methods) {
        if (m.name == "isda" || m.name == "reisda") {
            ad.eta = m.eta;
            break;
        }
    }

    const auto oracle = reisda::dp_exhaustive_oracle(exp.pair, ad, grid);
    std::cout << "oracle minimum total loss: " << reisda::format_double(oracle.min_total_loss)
              << "\nbest labels:";
    for (double v : oracle.best_labels) std::cout << ' ' << reisda::format_double(v);
    std::cout << "\n";

    auto snap_total = [&](const std::vector<double>& labels) {
        std::vector<double> snapped(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            double best = grid.front();
            for (double g : grid) {
                if (std::abs(g - labels[i]) < std::abs(best - labels[i])) best = g;
            }
            snapped[i] = best;
        }
        return reisda::assignment_total_loss(exp.pair, ad, snapped).total;
    };

    ad.renew = false;
    const auto isda = reisda::run_isda(exp.pair, ad);
    ad.renew = true;
    const auto reisda_run = reisda::run_re_isda(exp.pair, ad);
    std::cout << "greedy isda total (labels snapped to grid): "
              << reisda::format_double(snap_total(isda.predictions)) << "\n";
    std::cout << "greedy reisda total (labels snapped to grid): "
              << reisda::format_double(snap_total(reisda_run.predictions)) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"domain adaptation for regression: benchmark harness"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a benchmark bundle");
    std::string gen_kind = "friedman";
    gen->add_option("kind", gen_kind, "benchmark family")->check(CLI::IsMember({"friedman"}));
    reisda::FriedmanBenchmarkSpec spec;
    std::string gen_out = "bundle";
    gen->add_option("--n-source", spec.n_source, "source sample count");
    gen->add_option("--n-target", spec.n_target, "target sample count");
    gen->add_option("--low", spec.domain_low, "domain lower bound");
    gen->add_option("--high", spec.domain_high, "domain upper bound");
    gen->add_option("--shift", spec.shift, "per-dimension target shift");
    gen->add_option("--out", gen_out, "output directory");

    // run
    auto* run = app.add_subcommand("run", "run the configured comparison");
    std::string run_config;
    run->add_option("config", run_config, "experiment config JSON")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "block-size sweep for the renewing method");
    std::string sweep_config;
    std::vector<std::size_t> etas;
    sweep->add_option("config", sweep_config, "experiment config JSON")->required();
    sweep->add_option("--etas", etas, "comma separated block sizes")
        ->required()
        ->delimiter(',');

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exhaustive label-assignment oracle (tiny sets)");
    std::string oracle_config;
    std::vector<double> grid;
    oracle->add_option("config", oracle_config, "experiment config JSON")->required();
    oracle->add_option("--grid", grid, "comma separated candidate labels")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(spec, gen_out);
        if (run->parsed()) return cmd_run(run_config);
        if (sweep->parsed()) return cmd_sweep(sweep_config, etas);
        if (oracle->parsed()) return cmd_oracle(oracle_config, grid);
    } catch (const reisda::InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const reisda::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMethodFailed;
    }
    return kExitUsage;
}
