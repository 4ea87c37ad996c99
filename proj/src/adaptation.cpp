#include "reisda/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "reisda/eig.hpp"
#include "reisda/errors.hpp"
#include "reisda/qp.hpp"

namespace reisda {

namespace {

std::size_t block_count(std::size_t p, std::size_t eta) { return (p + eta - 1) / eta; }

void check_self_labeling_inputs(const DomainPair& pair, const AdaptationConfig& cfg) {
    pair.validate();
    if (cfg.eta == 0) throw InvalidInputError("adaptation: eta must be at least 1");
    if (cfg.eta > pair.target_size()) {
        throw InvalidInputError("adaptation: eta exceeds target count");
    }
}

// Append rows [0, hi) of targets with the given labels to a copy of base.
Dataset pool_with_prefix(const Dataset& base, const Matrix& targets,
                         const std::vector<double>& labels, std::size_t hi) {
    Dataset pool = base;
    Matrix block(hi, targets.cols());
    for (std::size_t i = 0; i < hi; ++i) block.set_row(i, targets.row(i));
    pool.inputs = vstack(pool.inputs, block);
    pool.labels.insert(pool.labels.end(), labels.begin(), labels.begin() + static_cast<long>(hi));
    return pool;
}

SelfLabelingRun run_common(const DomainPair& pair, const AdaptationConfig& cfg, bool renew) {
    check_self_labeling_inputs(pair, cfg);
    const std::size_t p = pair.target_size();
    const std::size_t blocks = block_count(p, cfg.eta);
    const Dataset base_pool = pair.pool_with_calibration();

    SelfLabelingRun run;
    run.states.reserve(blocks);
    run.predictions.assign(p, 0.0);

    Dataset pool = base_pool;
    MlpModel model;
    bool have_model = false;

    for (std::size_t n = 0; n < blocks; ++n) {
        const std::size_t lo = n * cfg.eta;
        const std::size_t hi = std::min(lo + cfg.eta, p);

        try {
            if (cfg.warm_start && have_model) {
                model = train_from(std::move(model), pool);
            } else {
                model = train(cfg.base, pool);
            }
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string(e.what()) + " at self-labeling step " +
                                      std::to_string(n),
                                  e.epoch());
        }
        have_model = true;

        IterationState state;
        state.step = n;
        state.labeled_pool = pool;
        state.state_loss = std::abs(predict_one(model, pair.calibration.input) -
                                    pair.calibration.label);

        Matrix block(hi - lo, pair.target_inputs.cols());
        for (std::size_t i = lo; i < hi; ++i) block.set_row(i - lo, pair.target_inputs.row(i));
        state.pending_block = block;

        if (renew) {
            // re-predict everything labeled so far plus the new block
            Matrix prefix(hi, pair.target_inputs.cols());
            for (std::size_t i = 0; i < hi; ++i) prefix.set_row(i, pair.target_inputs.row(i));
            const auto labels = predict(model, prefix);
            std::copy(labels.begin(), labels.end(), run.predictions.begin());
            pool = pool_with_prefix(base_pool, pair.target_inputs, run.predictions, hi);
        } else {
            const auto block_labels = predict(model, block);
            std::copy(block_labels.begin(), block_labels.end(),
                      run.predictions.begin() + static_cast<long>(lo));
            Dataset grown = std::move(pool);
            for (std::size_t i = lo; i < hi; ++i) {
                grown = append_sample(std::move(grown), pair.target_inputs.row(i),
                                      run.predictions[i]);
            }
            pool = std::move(grown);
        }

        state.pseudo_labels.assign(run.predictions.begin(),
                                   run.predictions.begin() + static_cast<long>(hi));
        run.states.push_back(std::move(state));
    }
    return run;
}

}  // namespace

std::vector<double> run_baseline(const DomainPair& pair, const MlpSpec& base) {
    pair.validate();
    const MlpModel model = train(base, pair.pool_with_calibration());
    return predict(model, pair.target_inputs);
}

SelfLabelingRun run_isda(const DomainPair& pair, const AdaptationConfig& cfg) {
    if (cfg.renew) throw InvalidInputError("run_isda requires cfg.renew == false");
    return run_common(pair, cfg, false);
}

SelfLabelingRun run_re_isda(const DomainPair& pair, const AdaptationConfig& cfg) {
    if (!cfg.renew) throw InvalidInputError("run_re_isda requires cfg.renew == true");
    return run_common(pair, cfg, true);
}

SelfLabelingRun run_self_labeling(const DomainPair& pair, const AdaptationConfig& cfg) {
    return run_common(pair, cfg, cfg.renew);
}

std::vector<double> loss_trace(const std::vector<IterationState>& states) {
    if (states.empty()) throw InvalidInputError("loss_trace: no states");
    std::vector<double> r(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) r[i] = states[i].state_loss;
    return r;
}

Matrix gaussian_kernel_matrix(const Matrix& a, const Matrix& b, double sigma) {
    if (a.cols() != b.cols()) throw InvalidInputError("kernel: dimension mismatch");
    if (!(sigma > 0.0)) throw InvalidInputError("kernel: bandwidth must be positive");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    Matrix k(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            k(i, j) = std::exp(-squared_distance(a.row(i), b.row(j)) * inv);
        }
    }
    return k;
}

double kernel_mmd_squared(const Matrix& a, const Matrix& b, double sigma) {
    const std::size_t q = a.rows();
    const std::size_t p = b.rows();
    const Matrix kaa = gaussian_kernel_matrix(a, a, sigma);
    const Matrix kbb = gaussian_kernel_matrix(b, b, sigma);
    const Matrix kab = gaussian_kernel_matrix(a, b, sigma);
    double saa = std::accumulate(kaa.data().begin(), kaa.data().end(), 0.0);
    double sbb = std::accumulate(kbb.data().begin(), kbb.data().end(), 0.0);
    double sab = std::accumulate(kab.data().begin(), kab.data().end(), 0.0);
    const double dq = static_cast<double>(q), dp = static_cast<double>(p);
    return saa / (dq * dq) + sbb / (dp * dp) - 2.0 * sab / (dq * dp);
}

std::vector<double> kmm_weights(const Matrix& source_inputs, const Matrix& target_inputs,
                                const KmmConfig& cfg) {
    if (source_inputs.rows() == 0 || target_inputs.rows() == 0) {
        throw InvalidInputError("kmm: empty source or target");
    }
    const std::size_t q = source_inputs.rows();
    const std::size_t p = target_inputs.rows();

    QpProblem qp;
    qp.quadratic = gaussian_kernel_matrix(source_inputs, source_inputs, cfg.bandwidth);
    const Matrix cross = gaussian_kernel_matrix(source_inputs, target_inputs, cfg.bandwidth);
    qp.linear.assign(q, 0.0);
    const double ratio = static_cast<double>(q) / static_cast<double>(p);
    for (std::size_t i = 0; i < q; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += cross(i, j);
        qp.linear[i] = ratio * s;
    }
    qp.box_upper = cfg.box_upper;
    qp.sum_target = 1.0;
    qp.sum_slack = cfg.sum_slack >= 0.0
                       ? cfg.sum_slack
                       : (std::sqrt(static_cast<double>(q)) - 1.0) / std::sqrt(static_cast<double>(q));
    return solve_qp(qp, cfg.qp_tol, cfg.qp_max_iter);
}

TcaEmbedding tca_transform(const Matrix& source_inputs, const Matrix& target_inputs,
                           const TcaConfig& cfg) {
    if (source_inputs.cols() != target_inputs.cols()) {
        throw InvalidInputError("tca: dimension mismatch");
    }
    const std::size_t q = source_inputs.rows();
    const std::size_t p = target_inputs.rows();
    const std::size_t n = q + p;
    if (q == 0 || p == 0) throw InvalidInputError("tca: empty source or target");
    if (cfg.latent_dim == 0 || cfg.latent_dim > n) {
        throw InvalidInputError("tca: latent dimension out of range");
    }
    if (!(cfg.mu > 0.0)) throw InvalidInputError("tca: mu must be positive");

    const Matrix pooled = vstack(source_inputs, target_inputs);

    double sigma = cfg.bandwidth;
    if (!(sigma > 0.0)) {
        // median pairwise distance heuristic
        std::vector<double> dists;
        dists.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dists.push_back(euclidean_distance(pooled.row(i), pooled.row(j)));
        std::nth_element(dists.begin(), dists.begin() + static_cast<long>(dists.size() / 2),
                         dists.end());
        sigma = dists[dists.size() / 2];
        if (!(sigma > 0.0)) sigma = 1.0;
    }

    const Matrix k = gaussian_kernel_matrix(pooled, pooled, sigma);

    // MMD coefficient matrix L = v v' with v = (1/q ... , -1/p ...)
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = i < q ? 1.0 / static_cast<double>(q) : -1.0 / static_cast<double>(p);
    }
    const auto kv = multiply(k, v);
    Matrix klk(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) klk(i, j) = kv[i] * kv[j];

    // KHK with H = I - 11'/n
    Matrix kc = k;  // column-centered
    for (std::size_t j = 0; j < n; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += k(i, j);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) kc(i, j) -= mean;
    }
    const Matrix khk = kc * kc.transposed();  // K H H K = K H K since H is a projection

    Matrix b = klk;
    for (std::size_t i = 0; i < n; ++i) b(i, i) += cfg.mu;

    // b is symmetric positive definite; form b^{-1/2}
    const EigResult eb = symmetric_eig(b);
    Matrix half(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        const double lam = eb.values[c];
        if (!(lam > 0.0)) throw ConvergenceError("tca: regularized matrix not positive", lam);
        const double inv_sqrt = 1.0 / std::sqrt(lam);
        for (std::size_t r = 0; r < n; ++r) half(r, c) = eb.vectors(r, c) * inv_sqrt;
    }
    const Matrix b_inv_half = half * eb.vectors.transposed();

    const Matrix c = b_inv_half * khk * b_inv_half;
    // enforce symmetry lost to rounding
    Matrix cs = c;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cs(i, j) = 0.5 * (c(i, j) + c(j, i));
    const EigResult ec = symmetric_eig(cs);

    Matrix w(n, cfg.latent_dim);
    for (std::size_t m = 0; m < cfg.latent_dim; ++m) {
        std::vector<double> u(n);
        for (std::size_t r = 0; r < n; ++r) u[r] = ec.vectors(r, m);
        auto col = multiply(b_inv_half, u);
        // scale to w' (KHK) w = 1 where the component is not degenerate
        const auto aw = multiply(khk, col);
        const double quad = dot(aw, col);
        if (quad > 1e-12) {
            const double inv = 1.0 / std::sqrt(quad);
            for (double& x : col) x *= inv;
        }
        for (std::size_t r = 0; r < n; ++r) w(r, m) = col[r];
    }

    const Matrix embedding = k * w;
    TcaEmbedding out;
    out.new_source = Matrix(q, cfg.latent_dim);
    out.new_target = Matrix(p, cfg.latent_dim);
    for (std::size_t i = 0; i < q; ++i) out.new_source.set_row(i, embedding.row(i));
    for (std::size_t i = 0; i < p; ++i) out.new_target.set_row(i, embedding.row(q + i));
    return out;
}

AssignmentLoss assignment_total_loss(const DomainPair& pair, const AdaptationConfig& cfg,
                                     const std::vector<double>& labels) {
    check_self_labeling_inputs(pair, cfg);
    const std::size_t p = pair.target_size();
    if (labels.size() != p) throw InvalidInputError("assignment loss: label count mismatch");

    const Dataset base_pool = pair.pool_with_calibration();
    AssignmentLoss out;
    const std::size_t blocks = block_count(p, cfg.eta);
    out.per_state.reserve(blocks);
    for (std::size_t n = 0; n < blocks; ++n) {
        const std::size_t hi = std::min((n + 1) * cfg.eta, p);
        const Dataset pool = pool_with_prefix(base_pool, pair.target_inputs, labels, hi);
        const MlpModel model = train(cfg.base, pool);
        const double r =
            std::abs(predict_one(model, pair.calibration.input) - pair.calibration.label);
        out.per_state.push_back(r);
        out.total += r;
    }
    return out;
}

OracleResult dp_exhaustive_oracle(const DomainPair& pair, const AdaptationConfig& cfg,
                                  const std::vector<double>& label_grid) {
    check_self_labeling_inputs(pair, cfg);
    if (label_grid.empty()) throw InvalidInputError("oracle: empty label grid");
    const std::size_t p = pair.target_size();

    double combos = 1.0;
    for (std::size_t i = 0; i < p; ++i) {
        combos *= static_cast<double>(label_grid.size());
        if (combos > 1e6) {
            throw InvalidInputError("oracle: grid^p exceeds the enumeration budget of 1e6");
        }
    }

    std::vector<std::size_t> idx(p, 0);
    std::vector<double> labels(p, label_grid[0]);
    OracleResult best;
    best.min_total_loss = std::numeric_limits<double>::infinity();

    while (true) {
        for (std::size_t i = 0; i < p; ++i) labels[i] = label_grid[idx[i]];
        const double total = assignment_total_loss(pair, cfg, labels).total;
        if (total < best.min_total_loss) {
            best.min_total_loss = total;
            best.best_labels = labels;
        }
        // odometer increment
        std::size_t pos = 0;
        while (pos < p) {
            if (++idx[pos] < label_grid.size()) break;
            idx[pos] = 0;
            ++pos;
        }
        if (pos == p) break;
    }
    return best;
}

std::size_t select_source_model(const std::vector<MlpModel>& models,
                                const LabeledSample& calibration) {
    if (models.empty()) throw InvalidInputError("select_source_model: no models");
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < models.size(); ++i) {
        const double err = std::abs(predict_one(models[i], calibration.input) - calibration.label);
        if (err < best_err) {
            best_err = err;
            best = i;
        }
    }
    return best;
}

}  // namespace reisda
