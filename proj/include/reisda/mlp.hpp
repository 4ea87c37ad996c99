#pragma once

#include "reisda/dataset.hpp"
#include "reisda/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace reisda {

enum class Activation { kTanh, kSigmoid, kRelu };

// How parameter updates are applied within one epoch.
//   kFullBatch: one gradient step per epoch on the mean squared error.
//   kPerSample: classic incremental backpropagation, one delta-rule step
//               per pattern in data order (gradient of 1/2 r^2 per pattern).
enum class UpdateMode { kFullBatch, kPerSample };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);
UpdateMode update_mode_from_string(const std::string& name);
std::string to_string(UpdateMode m);

struct MlpSpec {
    std::vector<std::size_t> layer_sizes;  // first = input dim, last = 1
    double learning_rate = 0.1;
    int epochs = 300;
    Activation activation = Activation::kTanh;
    UpdateMode update_mode = UpdateMode::kFullBatch;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const MlpSpec&) const = default;
};

// Trained feed-forward network. Weights for layer l have shape
// layer_sizes[l+1] x layer_sizes[l]; hidden activations as configured,
// identity on the output.
struct MlpModel {
    MlpSpec spec;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    double final_training_loss = 0.0;

    bool operator==(const MlpModel&) const = default;
};

// Deterministic Glorot-uniform initialization: weights uniform in
// +-sqrt(6/(fan_in+fan_out)) drawn row-major per layer from SplitMix64(seed),
// biases zero.
MlpModel seeded_init(const MlpSpec& spec);

// Full training run from the seeded initialization. sample_weights may be
// empty (uniform) or one non-negative weight per sample.
MlpModel train(const MlpSpec& spec, const Dataset& data,
               const std::vector<double>& sample_weights = {});

// Continue training an existing model for spec.epochs more epochs (warm
// start across self-labeling iterations).
MlpModel train_from(MlpModel start, const Dataset& data,
                    const std::vector<double>& sample_weights = {});

std::vector<double> predict(const MlpModel& model, const Matrix& inputs);
double predict_one(const MlpModel& model, std::span<const double> input);

// weighted mean squared error of the model on data
double mse_loss(const MlpModel& model, const Dataset& data,
                const std::vector<double>& sample_weights = {});

struct LossGradient {
    double loss = 0.0;
    std::vector<Matrix> weight_grads;
    std::vector<std::vector<double>> bias_grads;
};

// loss and its analytic gradient at the model's current parameters
LossGradient loss_gradient(const MlpModel& model, const Dataset& data,
                           const std::vector<double>& sample_weights = {});

// Backprop verification: max relative difference between the analytic
// gradient of the mean squared error at the seeded initialization and a
// central finite difference, over every parameter.
double gradient_check(const MlpSpec& spec, const Dataset& data, double fd_step);

std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(const std::string& text);

}  // namespace reisda
