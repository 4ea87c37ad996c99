#include "reisda/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "reisda/csv.hpp"
#include "reisda/errors.hpp"
#include "reisda/svg.hpp"

namespace reisda {

double rmse(const std::vector<double>& predicted, const std::vector<double>& truth) {
    if (predicted.empty() || predicted.size() != truth.size()) {
        throw InvalidInputError("rmse: vectors must be non-empty and of equal length");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - truth[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(predicted.size()));
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidInputError("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool RunReport::any_failures() const {
    for (const auto& m : methods)
        for (const auto& r : m.runs)
            if (!r.ok()) return true;
    return false;
}

const MethodReport* RunReport::find(const std::string& name) const {
    for (const auto& m : methods)
        if (m.name == name) return &m;
    return nullptr;
}

namespace {

std::vector<double> denormalize(std::vector<double> values, double scale, double offset) {
    for (double& v : values) v = v * scale + offset;
    return values;
}

MlpSpec with_seed(MlpSpec spec, std::uint64_t seed) {
    spec.seed = seed;
    return spec;
}

}  // namespace

SeedRun run_method(const PreparedExperiment& exp, const MethodConfig& method, const MlpSpec& base,
                   std::uint64_t seed) {
    SeedRun run;
    run.seed = seed;
    const MlpSpec seeded = with_seed(base, seed);
    try {
        std::vector<double> predictions;
        if (method.name == "baseline") {
            predictions = run_baseline(exp.pair, seeded);
        } else if (method.name == "kmm") {
            const auto weights =
                kmm_weights(exp.pair.source.inputs, exp.pair.target_inputs, method.kmm);
            const MlpModel model = train(seeded, exp.pair.source, weights);
            predictions = predict(model, exp.pair.target_inputs);
        } else if (method.name == "tca") {
            const DomainPair& view = exp.tca_view();
            const auto emb = tca_transform(view.source.inputs, view.target_inputs, method.tca);
            MlpSpec latent = seeded;
            latent.layer_sizes.front() = method.tca.latent_dim;
            const MlpModel model = train(latent, Dataset{emb.new_source, view.source.labels});
            predictions = predict(model, emb.new_target);
        } else if (method.name == "isda" || method.name == "reisda") {
            AdaptationConfig cfg;
            cfg.eta = method.eta;
            cfg.base = seeded;
            cfg.renew = method.name == "reisda";
            cfg.warm_start = method.warm_start;
            auto sl = run_self_labeling(exp.pair, cfg);
            predictions = std::move(sl.predictions);
            run.loss_trace = loss_trace(sl.states);
            for (double& r : run.loss_trace) r *= exp.label_scale;
        } else {
            throw InvalidInputError("unknown method: " + method.name);
        }
        run.predictions = denormalize(std::move(predictions), exp.label_scale, exp.label_offset);
        run.rmse_value = rmse(run.predictions, exp.truth);
        run.abs_errors.resize(run.predictions.size());
        for (std::size_t i = 0; i < run.predictions.size(); ++i) {
            run.abs_errors[i] = std::abs(run.predictions[i] - exp.truth[i]);
        }
    } catch (const std::exception& e) {
        run.error = e.what();
        run.predictions.clear();
        run.abs_errors.clear();
        run.loss_trace.clear();
        run.rmse_value = 0.0;
    }
    return run;
}

void summarize_method(MethodReport& report) {
    std::vector<double> scores;
    for (const auto& r : report.runs) {
        if (r.ok()) scores.push_back(r.rmse_value);
    }
    if (scores.empty()) return;
    report.median_rmse = median(scores);
    report.mean_rmse = 0.0;
    for (double v : scores) report.mean_rmse += v;
    report.mean_rmse /= static_cast<double>(scores.size());
    report.min_rmse = *std::min_element(scores.begin(), scores.end());
    report.max_rmse = *std::max_element(scores.begin(), scores.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        if (!report.runs[i].ok()) continue;
        const double gap = std::abs(report.runs[i].rmse_value - report.median_rmse);
        if (gap < best) {
            best = gap;
            report.representative = i;
        }
    }
}

RunReport run_comparison(const PreparedExperiment& exp, const std::vector<MethodConfig>& methods,
                         const MlpSpec& base, const std::vector<std::uint64_t>& seeds) {
    if (methods.empty()) throw InvalidInputError("run_comparison: no methods");
    if (seeds.empty()) throw InvalidInputError("run_comparison: no seeds");
    exp.pair.validate();
    if (exp.truth.size() != exp.pair.target_size()) {
        throw InvalidInputError("run_comparison: truth length mismatch");
    }

    RunReport report;
    report.experiment = exp.fingerprint;
    report.seeds = seeds;
    report.truth = exp.truth;

    for (const auto& method : methods) {
        MethodReport mr;
        mr.name = method.name;
        for (const std::uint64_t seed : seeds) {
            mr.runs.push_back(run_method(exp, method, base, seed));
        }
        summarize_method(mr);
        report.methods.push_back(std::move(mr));
    }
    return report;
}

std::vector<double> EtaTrace::final_values() const {
    std::vector<double> out;
    out.reserve(per_seed.size());
    for (const auto& trace : per_seed) {
        if (!trace.empty()) out.push_back(trace.back());
    }
    return out;
}

std::vector<EtaTrace> eta_sweep(const PreparedExperiment& exp,
                                const std::vector<std::size_t>& etas, const MlpSpec& base,
                                bool warm_start, const std::vector<std::uint64_t>& seeds) {
    if (etas.empty()) throw InvalidInputError("eta_sweep: no block sizes");
    if (seeds.empty()) throw InvalidInputError("eta_sweep: no seeds");
    const std::size_t p = exp.pair.target_size();

    std::vector<EtaTrace> out;
    for (const std::size_t eta : etas) {
        if (eta == 0 || eta > p) throw InvalidInputError("eta_sweep: eta out of range");
        EtaTrace trace;
        trace.eta = eta;
        for (const std::uint64_t seed : seeds) {
            AdaptationConfig cfg;
            cfg.eta = eta;
            cfg.base = with_seed(base, seed);
            cfg.renew = true;
            cfg.warm_start = warm_start;
            const auto run = run_re_isda(exp.pair, cfg);
            std::vector<double> per_step;
            per_step.reserve(run.states.size());
            for (const auto& state : run.states) {
                const auto raw = denormalize(state.pseudo_labels, exp.label_scale,
                                             exp.label_offset);
                const std::vector<double> truth_prefix(exp.truth.begin(),
                                                       exp.truth.begin() +
                                                           static_cast<long>(raw.size()));
                per_step.push_back(rmse(raw, truth_prefix));
            }
            trace.per_seed.push_back(std::move(per_step));
        }
        out.push_back(std::move(trace));
    }
    return out;
}

namespace {

nlohmann::json run_to_json(const SeedRun& r) {
    nlohmann::json j;
    j["seed"] = r.seed;
    if (r.ok()) {
        j["rmse"] = r.rmse_value;
        j["predictions"] = r.predictions;
        j["abs_errors"] = r.abs_errors;
        j["loss_trace"] = r.loss_trace;
    } else {
        j["error"] = r.error;
    }
    return j;
}

SeedRun run_from_json(const nlohmann::json& j) {
    SeedRun r;
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("error")) {
        r.error = j.at("error").get<std::string>();
    } else {
        r.rmse_value = j.at("rmse").get<double>();
        r.predictions = j.at("predictions").get<std::vector<double>>();
        r.abs_errors = j.at("abs_errors").get<std::vector<double>>();
        r.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    }
    return r;
}

}  // namespace

std::string report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["experiment"] = report.experiment;
    j["config_snapshot"] = report.config_snapshot;
    j["aggregation"] = report.aggregation;
    j["seeds"] = report.seeds;
    j["truth"] = report.truth;
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : report.methods) {
        nlohmann::json mj;
        mj["name"] = m.name;
        mj["median_rmse"] = m.median_rmse;
        mj["mean_rmse"] = m.mean_rmse;
        mj["min_rmse"] = m.min_rmse;
        mj["max_rmse"] = m.max_rmse;
        mj["representative"] = m.representative;
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : m.runs) runs.push_back(run_to_json(r));
        mj["runs"] = std::move(runs);
        methods.push_back(std::move(mj));
    }
    j["methods"] = std::move(methods);
    return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    RunReport report;
    report.experiment = j.at("experiment").get<std::string>();
    report.config_snapshot = j.at("config_snapshot").get<std::string>();
    report.aggregation = j.at("aggregation").get<std::string>();
    report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    report.truth = j.at("truth").get<std::vector<double>>();
    for (const auto& mj : j.at("methods")) {
        MethodReport m;
        m.name = mj.at("name").get<std::string>();
        m.median_rmse = mj.at("median_rmse").get<double>();
        m.mean_rmse = mj.at("mean_rmse").get<double>();
        m.min_rmse = mj.at("min_rmse").get<double>();
        m.max_rmse = mj.at("max_rmse").get<double>();
        m.representative = mj.at("representative").get<std::size_t>();
        for (const auto& rj : mj.at("runs")) m.runs.push_back(run_from_json(rj));
        report.methods.push_back(std::move(m));
    }
    return report;
}

void emit_report(const RunReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);

    write_text_file((fs::path(dir) / "report.json").string(), report_to_json(report));

    CsvTable table;
    table.header = {"method", "rmse", "rmse_mean", "rmse_min", "rmse_max"};
    for (const auto& m : report.methods) {
        table.rows.push_back({m.name, format_double(m.median_rmse), format_double(m.mean_rmse),
                              format_double(m.min_rmse), format_double(m.max_rmse)});
    }
    write_csv((fs::path(dir) / "table.csv").string(), table);

    CsvTable preds;
    preds.header = {"point", "truth"};
    for (const auto& m : report.methods) preds.header.push_back(m.name);
    for (std::size_t i = 0; i < report.truth.size(); ++i) {
        std::vector<std::string> row{std::to_string(i), format_double(report.truth[i])};
        for (const auto& m : report.methods) {
            const SeedRun* rep =
                m.runs.empty() || !m.runs[m.representative].ok() ? nullptr : &m.runs[m.representative];
            row.push_back(rep && i < rep->predictions.size()
                              ? format_double(rep->predictions[i])
                              : "");
        }
        preds.rows.push_back(std::move(row));
    }
    write_csv((fs::path(dir) / "predictions.csv").string(), preds);

    CsvTable traces;
    traces.header = {"method", "seed", "step", "loss"};
    for (const auto& m : report.methods) {
        for (const auto& r : m.runs) {
            for (std::size_t s = 0; s < r.loss_trace.size(); ++s) {
                traces.rows.push_back({m.name, std::to_string(r.seed), std::to_string(s),
                                       format_double(r.loss_trace[s])});
            }
        }
    }
    write_csv((fs::path(dir) / "traces.csv").string(), traces);

    // charts: predictions per method against truth, plus calibration-loss traces
    std::vector<SvgSeries> pred_series;
    {
        SvgSeries truth;
        truth.label = "truth";
        truth.points = true;
        for (std::size_t i = 0; i < report.truth.size(); ++i) {
            truth.x.push_back(static_cast<double>(i));
            truth.y.push_back(report.truth[i]);
        }
        pred_series.push_back(std::move(truth));
    }
    for (const auto& m : report.methods) {
        if (m.runs.empty() || !m.runs[m.representative].ok()) continue;
        SvgSeries s;
        s.label = m.name;
        const auto& p = m.runs[m.representative].predictions;
        for (std::size_t i = 0; i < p.size(); ++i) {
            s.x.push_back(static_cast<double>(i));
            s.y.push_back(p[i]);
        }
        pred_series.push_back(std::move(s));
    }
    std::vector<std::string> charts;
    charts.push_back(
        svg_line_chart("Predictions (representative seed)", "target index", "value", pred_series));

    std::vector<SvgSeries> trace_series;
    for (const auto& m : report.methods) {
        if (m.runs.empty() || !m.runs[m.representative].ok()) continue;
        const auto& t = m.runs[m.representative].loss_trace;
        if (t.empty()) continue;
        SvgSeries s;
        s.label = m.name;
        for (std::size_t i = 0; i < t.size(); ++i) {
            s.x.push_back(static_cast<double>(i));
            s.y.push_back(t[i]);
        }
        trace_series.push_back(std::move(s));
    }
    if (!trace_series.empty()) {
        charts.push_back(svg_line_chart("Calibration loss per step", "step", "|f(x_c) - y_c|",
                                        trace_series));
    }
    write_text_file((fs::path(dir) / "plot.svg").string(), svg_stack(charts));
}

void emit_sweep(const std::vector<EtaTrace>& traces, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);

    CsvTable csv;
    csv.header = {"eta", "seed_index", "step", "rmse"};
    for (const auto& t : traces) {
        for (std::size_t s = 0; s < t.per_seed.size(); ++s) {
            for (std::size_t n = 0; n < t.per_seed[s].size(); ++n) {
                csv.rows.push_back({std::to_string(t.eta), std::to_string(s), std::to_string(n),
                                    format_double(t.per_seed[s][n])});
            }
        }
    }
    write_csv((fs::path(dir) / "traces.csv").string(), csv);

    // chart of the median trace per eta
    std::vector<SvgSeries> series;
    for (const auto& t : traces) {
        if (t.per_seed.empty()) continue;
        const std::size_t len = t.per_seed.front().size();
        SvgSeries s;
        s.label = "eta=" + std::to_string(t.eta);
        for (std::size_t n = 0; n < len; ++n) {
            std::vector<double> vals;
            for (const auto& tr : t.per_seed)
                if (n < tr.size()) vals.push_back(tr[n]);
            s.x.push_back(static_cast<double>(n));
            s.y.push_back(median(std::move(vals)));
        }
        series.push_back(std::move(s));
    }
    write_text_file((fs::path(dir) / "plot.svg").string(),
                    svg_line_chart("Labeled-point RMSE per iteration (median across seeds)",
                                   "iteration", "RMSE", series));
}

}  // namespace reisda
