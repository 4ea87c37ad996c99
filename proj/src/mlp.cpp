#include "reisda/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "reisda/errors.hpp"
#include "reisda/rng.hpp"

namespace reisda {

namespace {

double activate(Activation a, double z) {
    switch (a) {
        case Activation::kTanh: return std::tanh(z);
        case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::kRelu: return z > 0.0 ? z : 0.0;
    }
    return z;
}

// derivative expressed through the activation value
double activate_deriv(Activation a, double value) {
    switch (a) {
        case Activation::kTanh: return 1.0 - value * value;
        case Activation::kSigmoid: return value * (1.0 - value);
        case Activation::kRelu: return value > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

struct Workspace {
    // activations[0] is the input row; activations[l+1] the output of layer l
    std::vector<std::vector<double>> activations;
    std::vector<std::vector<double>> deltas;

    explicit Workspace(const std::vector<std::size_t>& sizes) {
        activations.reserve(sizes.size());
        for (std::size_t s : sizes) activations.emplace_back(s, 0.0);
        deltas.reserve(sizes.size() - 1);
        for (std::size_t l = 1; l < sizes.size(); ++l) deltas.emplace_back(sizes[l], 0.0);
    }
};

void forward_into(const MlpModel& m, std::span<const double> input, Workspace& ws) {
    std::copy(input.begin(), input.end(), ws.activations[0].begin());
    const std::size_t layers = m.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& w = m.weights[l];
        const auto& prev = ws.activations[l];
        auto& out = ws.activations[l + 1];
        const bool hidden = l + 1 < layers;
        for (std::size_t j = 0; j < w.rows(); ++j) {
            double z = m.biases[l][j] + dot(w.row(j), prev);
            out[j] = hidden ? activate(m.spec.activation, z) : z;
        }
    }
}

// Backpropagate from an output delta already placed in ws.deltas.back()[0]
// and apply one gradient step scaled by lr.
void backward_step(MlpModel& m, Workspace& ws, double lr) {
    const std::size_t layers = m.weights.size();
    for (std::size_t li = layers; li-- > 0;) {
        const auto& delta = ws.deltas[li];
        const auto& prev = ws.activations[li];
        if (li > 0) {
            auto& below = ws.deltas[li - 1];
            const Matrix& w = m.weights[li];
            for (std::size_t k = 0; k < below.size(); ++k) {
                double s = 0.0;
                for (std::size_t j = 0; j < delta.size(); ++j) s += delta[j] * w(j, k);
                below[k] = s * activate_deriv(m.spec.activation, ws.activations[li][k]);
            }
        }
        Matrix& w = m.weights[li];
        for (std::size_t j = 0; j < delta.size(); ++j) {
            const double dj = delta[j];
            auto wrow = w.row(j);
            for (std::size_t k = 0; k < prev.size(); ++k) wrow[k] -= lr * dj * prev[k];
            m.biases[li][j] -= lr * dj;
        }
    }
}

std::vector<double> normalized_weights(const Dataset& data, const std::vector<double>& w,
                                       const std::string& who) {
    const std::size_t n = data.size();
    if (w.empty()) return {};
    if (w.size() != n) throw InvalidInputError(who + ": sample weight count mismatch");
    double total = 0.0;
    for (double v : w) {
        if (!(v >= 0.0)) throw InvalidInputError(who + ": sample weights must be non-negative");
        total += v;
    }
    if (!(total > 0.0)) throw InvalidInputError(who + ": sample weights sum to zero");
    return w;
}

// analytic gradient of the weighted MSE over data; returns loss
double loss_and_gradient(const MlpModel& m, const Dataset& data, const std::vector<double>& w,
                         std::vector<Matrix>& grad_w, std::vector<std::vector<double>>& grad_b) {
    const std::size_t n = data.size();
    const std::size_t layers = m.weights.size();
    grad_w.clear();
    grad_b.clear();
    for (std::size_t l = 0; l < layers; ++l) {
        grad_w.emplace_back(m.weights[l].rows(), m.weights[l].cols());
        grad_b.emplace_back(m.biases[l].size(), 0.0);
    }
    const double wsum =
        w.empty() ? static_cast<double>(n) : std::accumulate(w.begin(), w.end(), 0.0);

    Workspace ws(m.spec.layer_sizes);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        forward_into(m, data.inputs.row(i), ws);
        const double wi = w.empty() ? 1.0 : w[i];
        const double resid = ws.activations.back()[0] - data.labels[i];
        loss += wi * resid * resid;

        ws.deltas.back()[0] = 2.0 * wi * resid / wsum;
        for (std::size_t li = layers; li-- > 0;) {
            const auto& delta = ws.deltas[li];
            const auto& prev = ws.activations[li];
            if (li > 0) {
                auto& below = ws.deltas[li - 1];
                const Matrix& wm = m.weights[li];
                for (std::size_t k = 0; k < below.size(); ++k) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < delta.size(); ++j) s += delta[j] * wm(j, k);
                    below[k] = s * activate_deriv(m.spec.activation, ws.activations[li][k]);
                }
            }
            for (std::size_t j = 0; j < delta.size(); ++j) {
                const double dj = delta[j];
                auto grow = grad_w[li].row(j);
                for (std::size_t k = 0; k < prev.size(); ++k) grow[k] += dj * prev[k];
                grad_b[li][j] += dj;
            }
        }
    }
    return loss / wsum;
}

void run_epochs(MlpModel& m, const Dataset& data, const std::vector<double>& w, int epochs) {
    const std::size_t n = data.size();
    const double lr = m.spec.learning_rate;

    if (m.spec.update_mode == UpdateMode::kFullBatch) {
        std::vector<Matrix> gw;
        std::vector<std::vector<double>> gb;
        for (int ep = 0; ep < epochs; ++ep) {
            const double loss = loss_and_gradient(m, data, w, gw, gb);
            if (!std::isfinite(loss)) {
                throw DivergenceError("mlp train: non-finite loss", ep);
            }
            for (std::size_t l = 0; l < m.weights.size(); ++l) {
                auto& wd = m.weights[l].data();
                const auto& gd = gw[l].data();
                for (std::size_t k = 0; k < wd.size(); ++k) wd[k] -= lr * gd[k];
                for (std::size_t j = 0; j < m.biases[l].size(); ++j)
                    m.biases[l][j] -= lr * gb[l][j];
            }
        }
        return;
    }

    // per-sample (incremental) mode: delta rule on 1/2 r^2 per pattern,
    // weighted patterns scaled so uniform weights reproduce the unweighted run
    const double mean_w =
        w.empty() ? 1.0 : std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
    Workspace ws(m.spec.layer_sizes);
    for (int ep = 0; ep < epochs; ++ep) {
        for (std::size_t i = 0; i < n; ++i) {
            forward_into(m, data.inputs.row(i), ws);
            const double resid = ws.activations.back()[0] - data.labels[i];
            if (!std::isfinite(resid)) {
                throw DivergenceError("mlp train: non-finite residual", ep);
            }
            const double scale = w.empty() ? 1.0 : w[i] / mean_w;
            ws.deltas.back()[0] = scale * resid;
            backward_step(m, ws, lr);
        }
    }
}

}  // namespace

Activation activation_from_string(const std::string& name) {
    if (name == "tanh") return Activation::kTanh;
    if (name == "sigmoid") return Activation::kSigmoid;
    if (name == "relu") return Activation::kRelu;
    throw InvalidInputError("unknown activation: " + name);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::kTanh: return "tanh";
        case Activation::kSigmoid: return "sigmoid";
        case Activation::kRelu: return "relu";
    }
    return "tanh";
}

UpdateMode update_mode_from_string(const std::string& name) {
    if (name == "full_batch") return UpdateMode::kFullBatch;
    if (name == "per_sample") return UpdateMode::kPerSample;
    throw InvalidInputError("unknown update mode: " + name);
}

std::string to_string(UpdateMode m) {
    return m == UpdateMode::kFullBatch ? "full_batch" : "per_sample";
}

void MlpSpec::validate() const {
    if (layer_sizes.size() < 2) {
        throw InvalidInputError("mlp spec: need at least input and output layers");
    }
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw InvalidInputError("mlp spec: zero-width layer");
    }
    if (layer_sizes.back() != 1) {
        throw InvalidInputError("mlp spec: last layer size must be 1");
    }
    if (!(learning_rate > 0.0)) {
        throw InvalidInputError("mlp spec: learning rate must be positive");
    }
    if (epochs < 0) throw InvalidInputError("mlp spec: negative epoch count");
}

MlpModel seeded_init(const MlpSpec& spec) {
    spec.validate();
    MlpModel m;
    m.spec = spec;
    SplitMix64 rng(spec.seed);
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        const std::size_t fan_in = spec.layer_sizes[l];
        const std::size_t fan_out = spec.layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        for (double& v : w.data()) v = rng.next_symmetric(limit);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(fan_out, 0.0);
    }
    return m;
}

MlpModel train(const MlpSpec& spec, const Dataset& data, const std::vector<double>& sample_weights) {
    MlpModel m = seeded_init(spec);
    return train_from(std::move(m), data, sample_weights);
}

MlpModel train_from(MlpModel start, const Dataset& data, const std::vector<double>& sample_weights) {
    data.validate("mlp train");
    if (data.size() == 0) throw InvalidInputError("mlp train: empty dataset");
    if (!data.labeled()) throw InvalidInputError("mlp train: dataset has no labels");
    if (data.dim() != start.spec.layer_sizes.front()) {
        throw InvalidInputError("mlp train: input dimension does not match first layer");
    }
    const auto w = normalized_weights(data, sample_weights, "mlp train");
    run_epochs(start, data, w, start.spec.epochs);
    start.final_training_loss = mse_loss(start, data, w);
    if (!std::isfinite(start.final_training_loss)) {
        throw DivergenceError("mlp train: non-finite final loss", start.spec.epochs);
    }
    return start;
}

std::vector<double> predict(const MlpModel& model, const Matrix& inputs) {
    if (inputs.cols() != model.spec.layer_sizes.front()) {
        throw InvalidInputError("mlp predict: input dimension mismatch");
    }
    Workspace ws(model.spec.layer_sizes);
    std::vector<double> out(inputs.rows());
    for (std::size_t i = 0; i < inputs.rows(); ++i) {
        forward_into(model, inputs.row(i), ws);
        out[i] = ws.activations.back()[0];
    }
    return out;
}

double predict_one(const MlpModel& model, std::span<const double> input) {
    if (input.size() != model.spec.layer_sizes.front()) {
        throw InvalidInputError("mlp predict: input dimension mismatch");
    }
    Workspace ws(model.spec.layer_sizes);
    forward_into(model, input, ws);
    return ws.activations.back()[0];
}

double mse_loss(const MlpModel& model, const Dataset& data,
                const std::vector<double>& sample_weights) {
    const auto w = normalized_weights(data, sample_weights, "mse_loss");
    const auto pred = predict(model, data.inputs);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        const double r = pred[i] - data.labels[i];
        num += wi * r * r;
        den += wi;
    }
    return num / den;
}

LossGradient loss_gradient(const MlpModel& model, const Dataset& data,
                           const std::vector<double>& sample_weights) {
    data.validate("loss_gradient");
    if (data.size() == 0) throw InvalidInputError("loss_gradient: empty dataset");
    const auto w = normalized_weights(data, sample_weights, "loss_gradient");
    LossGradient out;
    out.loss = loss_and_gradient(model, data, w, out.weight_grads, out.bias_grads);
    return out;
}

double gradient_check(const MlpSpec& spec, const Dataset& data, double fd_step) {
    if (!(fd_step > 0.0) || fd_step > 1e-3) {
        throw InvalidInputError("gradient_check: fd_step must be in (0, 1e-3]");
    }
    if (data.size() == 0) throw InvalidInputError("gradient_check: empty dataset");

    MlpModel m = seeded_init(spec);
    std::vector<Matrix> gw;
    std::vector<std::vector<double>> gb;
    loss_and_gradient(m, data, {}, gw, gb);

    auto loss_at = [&](MlpModel& probe) { return mse_loss(probe, data); };

    double worst = 0.0;
    auto compare = [&](double analytic, double* param) {
        const double saved = *param;
        *param = saved + fd_step;
        const double up = loss_at(m);
        *param = saved - fd_step;
        const double down = loss_at(m);
        *param = saved;
        const double fd = (up - down) / (2.0 * fd_step);
        const double denom = std::max(std::abs(analytic), std::abs(fd));
        if (denom < 1e-8) return;  // both gradients vanish: defined as zero error
        worst = std::max(worst, std::abs(analytic - fd) / denom);
    };

    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        for (std::size_t k = 0; k < m.weights[l].data().size(); ++k) {
            compare(gw[l].data()[k], &m.weights[l].data()[k]);
        }
        for (std::size_t j = 0; j < m.biases[l].size(); ++j) {
            compare(gb[l][j], &m.biases[l][j]);
        }
    }
    return worst;
}

std::string model_to_json(const MlpModel& model) {
    nlohmann::json j;
    j["layer_sizes"] = model.spec.layer_sizes;
    j["learning_rate"] = model.spec.learning_rate;
    j["epochs"] = model.spec.epochs;
    j["activation"] = to_string(model.spec.activation);
    j["update_mode"] = to_string(model.spec.update_mode);
    j["seed"] = model.spec.seed;
    j["final_training_loss"] = model.final_training_loss;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        nlohmann::json layer;
        layer["rows"] = model.weights[l].rows();
        layer["cols"] = model.weights[l].cols();
        layer["weights"] = model.weights[l].data();  // row-major
        layer["biases"] = model.biases[l];
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j.dump(2);
}

MlpModel model_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MlpModel m;
    m.spec.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    m.spec.learning_rate = j.at("learning_rate").get<double>();
    m.spec.epochs = j.at("epochs").get<int>();
    m.spec.activation = activation_from_string(j.at("activation").get<std::string>());
    m.spec.update_mode = update_mode_from_string(j.at("update_mode").get<std::string>());
    m.spec.seed = j.at("seed").get<std::uint64_t>();
    m.final_training_loss = j.at("final_training_loss").get<double>();
    for (const auto& layer : j.at("layers")) {
        const auto rows = layer.at("rows").get<std::size_t>();
        const auto cols = layer.at("cols").get<std::size_t>();
        m.weights.emplace_back(rows, cols, layer.at("weights").get<std::vector<double>>());
        m.biases.push_back(layer.at("biases").get<std::vector<double>>());
    }
    return m;
}

}  // namespace reisda
