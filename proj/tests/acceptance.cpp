// End-to-end acceptance suite. Each numbered check prints one PASS/FAIL
// line; the process exits non-zero if any check fails.
//
// usage: acceptance <path-to-cli-binary> <path-to-configs-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "reisda/adaptation.hpp"
#include "reisda/config.hpp"
#include "reisda/csv.hpp"
#include "reisda/datagen.hpp"
#include "reisda/eig.hpp"
#include "reisda/errors.hpp"
#include "reisda/evaluation.hpp"
#include "reisda/halton.hpp"
#include "reisda/pipeline.hpp"
#include "reisda/qp.hpp"
#include "reisda/rng.hpp"

#include "synthetic_series.hpp"

using namespace reisda;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double median_rmse(const RunReport& r, const std::string& method) {
    const MethodReport* m = r.find(method);
    return m == nullptr ? std::nan("") : m->median_rmse;
}

// small 1-D covariate-shift instance for the oracle checks
DomainPair tiny_pair(std::size_t q, std::size_t p, double shift, std::uint64_t seed) {
    SplitMix64 rng(seed);
    DomainPair pair;
    pair.source.inputs = Matrix(q, 1);
    pair.source.labels.resize(q);
    for (std::size_t i = 0; i < q; ++i) {
        const double x = rng.next_double();
        pair.source.inputs(i, 0) = x;
        pair.source.labels[i] = 2.0 * x + 1.0;
    }
    pair.target_inputs = Matrix(p, 1);
    for (std::size_t i = 0; i < p; ++i) pair.target_inputs(i, 0) = rng.next_double() + shift;
    pair.calibration = {{shift}, 2.0 * shift + 1.0};
    return pair;
}

std::string temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

// ---------------------------------------------------------------- checks

void check_friedman_comparison(const ExperimentConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    const auto exp = prepare_experiment(cfg);
    const auto rep = run_comparison(exp, cfg.methods, cfg.base, cfg.seeds);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                            .count();

    const double re = median_rmse(rep, "reisda");
    const double is = median_rmse(rep, "isda");
    const double nn = median_rmse(rep, "baseline");
    const bool ordering = re < is && re < nn;
    const bool re_band = re >= 1.2 && re <= 3.2;
    const bool nn_band = nn >= 2.4 && nn <= 5.0;
    const bool in_time = secs < 600.0;
    report(1, "friedman five-method comparison", ordering && re_band && nn_band && in_time,
           "median RMSE reisda=" + fmt(re) + " isda=" + fmt(is) + " baseline=" + fmt(nn) +
               " kmm=" + fmt(median_rmse(rep, "kmm")) + " tca=" + fmt(median_rmse(rep, "tca")) +
               " (reisda<isda, reisda<baseline, reisda in [1.2,3.2], baseline in [2.4,5.0]; " +
               fmt(secs) + "s over " + std::to_string(cfg.seeds.size()) + " seeds)");
}

void check_eta_sweep(const ExperimentConfig& cfg) {
    const auto exp = prepare_experiment(cfg);
    bool warm = false;
    for (const auto& m : cfg.methods)
        if (m.name == "reisda") warm = m.warm_start;
    const auto traces = eta_sweep(exp, {2, 5}, cfg.base, warm, cfg.seeds);

    const double final2 = median(traces[0].final_values());
    const double final5 = median(traces[1].final_values());

    bool shapes_ok = true;
    std::string shape_counts;
    for (const auto& t : traces) {
        int early = 0;
        for (const auto& tr : t.per_seed) {
            std::size_t arg = 0;
            for (std::size_t i = 1; i < tr.size(); ++i)
                if (tr[i] > tr[arg]) arg = i;
            if (arg + 1 < tr.size()) ++early;
        }
        shapes_ok = shapes_ok && early >= 7;
        shape_counts += " eta" + std::to_string(t.eta) + "=" + std::to_string(early) + "/10";
    }
    report(2, "eta sweep", final2 <= final5 && shapes_ok,
           "median final RMSE eta2=" + fmt(final2) + " <= eta5=" + fmt(final5) +
               "; peak-before-final" + shape_counts + " (need >= 7/10)");
}

void check_oracle_bound() {
    int ok_count = 0;
    const int instances = 20;
    for (int k = 0; k < instances; ++k) {
        const std::size_t p = 2 + static_cast<std::size_t>(k % 2);
        DomainPair pair = tiny_pair(5, p, 0.2 + 0.1 * (k % 4), 500 + k);
        AdaptationConfig cfg;
        cfg.eta = 1 + static_cast<std::size_t>(k % 2);
        cfg.base.layer_sizes = {1, 3, 1};
        cfg.base.learning_rate = 0.1;
        cfg.base.epochs = 15;
        cfg.base.update_mode = UpdateMode::kPerSample;
        cfg.base.seed = 42 + k;

        std::vector<double> grid;
        const std::size_t grid_size = 3 + k % 2;
        for (std::size_t g = 0; g < grid_size; ++g) {
            grid.push_back(1.0 + 3.0 * static_cast<double>(g) / static_cast<double>(grid_size - 1));
        }
        const auto oracle = dp_exhaustive_oracle(pair, cfg, grid);

        auto snapped_total = [&](const std::vector<double>& labels) {
            std::vector<double> snapped(labels.size());
            for (std::size_t i = 0; i < labels.size(); ++i) {
                double best = grid.front();
                for (double g : grid)
                    if (std::abs(g - labels[i]) < std::abs(best - labels[i])) best = g;
                snapped[i] = best;
            }
            return assignment_total_loss(pair, cfg, snapped).total;
        };

        cfg.renew = false;
        const double isda_total = snapped_total(run_isda(pair, cfg).predictions);
        cfg.renew = true;
        const double re_total = snapped_total(run_re_isda(pair, cfg).predictions);
        if (isda_total >= oracle.min_total_loss && re_total >= oracle.min_total_loss) ++ok_count;
    }
    report(3, "exhaustive oracle lower-bounds greedy labelings",
           ok_count == instances,
           std::to_string(ok_count) + "/" + std::to_string(instances) +
               " randomized tiny instances (exact comparison)");
}

void check_gradients() {
    int checked = 0;
    double worst = 0.0;
    SplitMix64 arch(2024);
    const Activation acts[] = {Activation::kTanh, Activation::kSigmoid, Activation::kRelu};
    for (std::uint64_t seed = 1; checked < 24 && seed <= 400; ++seed) {
        MlpSpec spec;
        const std::size_t in = 2 + arch.next_u64() % 3;
        const std::size_t hidden = 2 + arch.next_u64() % 4;
        spec.layer_sizes = {in, hidden, 1};
        if (arch.next_u64() % 2 == 0) {
            spec.layer_sizes = {in, hidden, 2 + arch.next_u64() % 2, 1};
        }
        spec.activation = acts[seed % 3];
        spec.seed = seed * 13 + 1;

        SplitMix64 rng(seed * 71 + 3);
        Dataset d;
        d.inputs = Matrix(6, in);
        for (double& v : d.inputs.data()) v = rng.next_symmetric(1.0);
        d.labels.resize(6);
        for (double& y : d.labels) y = rng.next_symmetric(1.0);

        if (spec.activation == Activation::kRelu) {
            // central differences are undefined across a relu kink; skip
            // instances with a pre-activation too close to zero
            const MlpModel probe = seeded_init(spec);
            bool near_kink = false;
            for (std::size_t i = 0; i < d.size() && !near_kink; ++i) {
                std::vector<double> a(d.inputs.row(i).begin(), d.inputs.row(i).end());
                for (std::size_t l = 0; l + 1 < probe.weights.size() && !near_kink; ++l) {
                    std::vector<double> z(probe.weights[l].rows());
                    for (std::size_t j = 0; j < z.size(); ++j) {
                        z[j] = probe.biases[l][j] + dot(probe.weights[l].row(j), a);
                        if (std::abs(z[j]) < 5e-4) near_kink = true;
                    }
                    for (auto& v : z) v = v > 0.0 ? v : 0.0;
                    a = std::move(z);
                }
            }
            if (near_kink) continue;
        }
        worst = std::max(worst, gradient_check(spec, d, 1e-5));
        ++checked;
    }
    report(4, "backprop matches central finite differences",
           checked == 24 && worst < 1e-4,
           "max relative error " + fmt(worst) + " over " + std::to_string(checked) +
               " random specs/seeds (< 1e-4)");
}

void check_numerics() {
    double worst_recon = 0.0, worst_trace = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SplitMix64 rng(seed);
        Matrix a(10, 10);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = i; j < 10; ++j) a(i, j) = a(j, i) = rng.next_symmetric(2.0);
        const auto e = symmetric_eig(a);
        Matrix lam(10, 10);
        double value_sum = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            lam(i, i) = e.values[i];
            value_sum += e.values[i];
        }
        const Matrix rebuilt = e.vectors * lam * e.vectors.transposed();
        double fro = 0.0;
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 10; ++j) {
                const double d = rebuilt(i, j) - a(i, j);
                fro += d * d;
            }
        worst_recon = std::max(worst_recon, std::sqrt(fro));
        double trace = 0.0;
        for (std::size_t i = 0; i < 10; ++i) trace += a(i, i);
        worst_trace = std::max(worst_trace, std::abs(trace - value_sum));
    }

    bool qp_ok = true;
    double worst_kkt = 0.0;
    SplitMix64 rng(4242);
    for (int inst = 0; inst < 8 && qp_ok; ++inst) {
        const std::size_t n = 2 + inst % 4;
        Matrix g(n, n);
        for (double& v : g.data()) v = rng.next_symmetric(1.0);
        QpProblem p;
        p.quadratic = g * g.transposed();
        for (std::size_t i = 0; i < n; ++i) p.quadratic(i, i) += 0.1;
        p.linear.resize(n);
        for (double& v : p.linear) v = rng.next_symmetric(2.0);
        p.box_upper = 1.5;
        p.sum_target = 1.0;
        p.sum_slack = 0.25;
        const double tol = 1e-8;
        const auto b = solve_qp(p, tol, 100000);
        worst_kkt = std::max(worst_kkt, kkt_residual(p, b));
        if (kkt_residual(p, b) > tol) qp_ok = false;
        const double fstar = p.objective(b);
        for (int k = 0; k < 1000 && qp_ok; ++k) {
            std::vector<double> z(n);
            for (double& v : z) v = rng.next_double() * p.box_upper;
            if (p.objective(project_feasible(p, std::move(z))) < fstar - 1e-9) qp_ok = false;
        }
    }
    report(5, "numerics kernels",
           worst_recon <= 1e-7 && worst_trace <= 1e-8 && qp_ok,
           "eig reconstruction " + fmt(worst_recon) + " (<= 1e-7), trace drift " +
               fmt(worst_trace) + " (<= 1e-8), qp kkt " + fmt(worst_kkt) +
               " (<= 1e-8) and optimal against 1000 random feasible points");
}

void check_micro_oracles() {
    const bool f0 = friedman(std::vector<double>{0, 0, 0, 0, 0}) == 5.0;
    const bool f1 = friedman(std::vector<double>{1, 1, 1, 1, 1}) == 20.0;
    const bool h1 = halton(1, 2) == 0.5;
    const bool h3 = halton(3, 2) == 0.75;
    const bool r0 = rmse({1.0, 2.0}, {1.0, 2.0}) == 0.0;
    const bool r1 = rmse({1.0, 1.0}, {0.0, 2.0}) == 1.0;
    const bool r3 = rmse({3.0}, {0.0}) == 3.0;
    report(6, "exact micro oracles", f0 && f1 && h1 && h3 && r0 && r1 && r3,
           "friedman(0)=5, friedman(1)=20, halton(1,2)=.5, halton(3,2)=.75, rmse identities");
}

void check_degeneracies() {
    // single block: both methods identical bit for bit
    DomainPair pair = tiny_pair(10, 3, 0.4, 99);
    AdaptationConfig cfg;
    cfg.eta = 3;
    cfg.base.layer_sizes = {1, 4, 1};
    cfg.base.epochs = 40;
    cfg.base.update_mode = UpdateMode::kPerSample;
    cfg.base.seed = 7;
    const auto isda_run = run_isda(pair, cfg);
    cfg.renew = true;
    const auto re_run = run_re_isda(pair, cfg);
    const bool identical = isda_run.predictions == re_run.predictions;

    // kmm on identical domains: near-uniform weights
    const Benchmark bench = make_friedman_benchmark();
    KmmConfig kmm;
    kmm.bandwidth = 0.5;
    const auto w = kmm_weights(bench.pair.source.inputs, bench.pair.source.inputs, kmm);
    double dev = 0.0;
    for (double v : w) dev = std::max(dev, std::abs(v - 1.0));

    // tca shapes
    bool shapes = true;
    for (const std::size_t m : {1u, 3u, 5u}) {
        TcaConfig tcfg;
        tcfg.latent_dim = m;
        const auto emb =
            tca_transform(bench.pair.source.inputs, bench.pair.target_inputs, tcfg);
        shapes = shapes && emb.new_source.rows() == 80 && emb.new_source.cols() == m &&
                 emb.new_target.rows() == 41 && emb.new_target.cols() == m;
    }
    report(7, "method degeneracies", identical && dev < 1e-2 && shapes,
           std::string("single-block isda == reisda bit-identical; kmm uniform dev ") +
               fmt(dev) + " (< 1e-2); tca shapes q x m / p x m");
}

void check_cli_determinism(const std::string& cli, const std::string& config_dir) {
    const std::string work = temp_dir("reisda_accept_cli");
    auto cfg = load_config(config_dir + "/friedman_quick.json");
    cfg.output_dir = work + "/out";
    write_text_file(work + "/cfg.json", config_to_json(cfg));

    std::string captured[2];
    for (int run = 0; run < 2; ++run) {
        const std::string cmd = "\"" + cli + "\" run " + work + "/cfg.json > " + work +
                                "/log_" + std::to_string(run) + ".txt 2>&1";
        const int rc = std::system(cmd.c_str());
        if (rc != 0) {
            report(8, "repeated runs are byte-identical", false,
                   "cli exited with status " + std::to_string(rc));
            return;
        }
        captured[run] = read_text_file(cfg.output_dir + "/report.json");
        fs::remove_all(cfg.output_dir);
    }
    const std::string& a = captured[0];
    const std::string& b = captured[1];
    report(8, "repeated runs are byte-identical", !a.empty() && a == b,
           "two cli runs of the same config, report.json of " + std::to_string(a.size()) +
               " bytes each");
    fs::remove_all(work);
}

void check_csv_pipeline() {
    const std::string dir = temp_dir("reisda_accept_csv");
    const auto files = synthetic_series::write_subjects(dir);

    ExperimentConfig cfg;
    cfg.dataset.type = DatasetConfig::Type::kCsv;
    cfg.dataset.source_paths = files.source_paths;
    cfg.dataset.target_path = files.target_path;
    cfg.dataset.calibration_path = files.calibration_path;
    cfg.dataset.truth_path = files.truth_path;
    cfg.preprocess.normalize_inputs = true;
    cfg.preprocess.normalize_labels = true;
    cfg.preprocess.frame_difference = true;
    cfg.preprocess.pca_retain = 10;
    cfg.base.layer_sizes = {10, 16, 8, 1};
    cfg.base.learning_rate = 0.1;
    cfg.base.epochs = 200;
    cfg.base.update_mode = UpdateMode::kPerSample;
    cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.methods = {{.name = "baseline"},
                   {.name = "kmm"},
                   {.name = "tca"},
                   {.name = "isda", .eta = 2, .warm_start = true},
                   {.name = "reisda", .eta = 2, .warm_start = true}};
    cfg.methods[1].kmm.bandwidth = 2.0;
    cfg.methods[2].tca.latent_dim = 10;

    const auto exp = prepare_experiment(cfg);
    const bool dims_ok = exp.tca_pair.has_value() &&
                         exp.tca_pair->source.inputs.cols() == 62 &&
                         exp.pair.source.inputs.cols() == 10;

    const auto rep = run_comparison(exp, cfg.methods, cfg.base, cfg.seeds);
    const double re = median_rmse(rep, "reisda");
    const double nn = median_rmse(rep, "baseline");
    report(9, "csv pipeline on multi-subject motion-capture-shaped data",
           dims_ok && !rep.any_failures() && re < nn,
           "62 raw columns -> pca 10; all five methods ran; median RMSE reisda=" + fmt(re) +
               " < baseline=" + fmt(nn) + " over 10 seeds");
    fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <cli-binary> <configs-dir>\n");
        return 2;
    }
    const std::string cli = argv[1];
    const std::string config_dir = argv[2];

    const auto table1 = load_config(config_dir + "/friedman_table1.json");
    try {
        check_friedman_comparison(table1);
        check_eta_sweep(table1);
        check_oracle_bound();
        check_gradients();
        check_numerics();
        check_micro_oracles();
        check_degeneracies();
        check_cli_determinism(cli, config_dir);
        check_csv_pipeline();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
        return 1;
    }

    std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
