#pragma once

#include "reisda/dataset.hpp"
#include "reisda/mlp.hpp"

#include <vector>

namespace reisda {

// Block size, base learner and the renew/warm-start switches shared by the
// self-labeling methods. renew=false is plain ISDA (labels frozen once
// assigned); renew=true is Re-ISDA (every iteration re-predicts all targets
// labeled so far). warm_start=false retrains from the seeded initialization
// at every iteration; warm_start=true keeps training the same network.
struct AdaptationConfig {
    std::size_t eta = 2;
    MlpSpec base;
    bool renew = false;
    bool warm_start = false;
};

struct KmmConfig {
    double bandwidth = 0.5;   // Gaussian kernel sigma
    double box_upper = 1000.0;
    double sum_slack = -1.0;  // negative = default (sqrt(q)-1)/sqrt(q)
    double qp_tol = 1e-6;
    int qp_max_iter = 50000;
};

struct TcaConfig {
    double bandwidth = -1.0;  // non-positive = median pairwise distance heuristic
    std::size_t latent_dim = 5;
    double mu = 1.0;
};

// One step of the self-labeling dynamic program. labeled_pool is the
// training set of this step's model (source + calibration + targets labeled
// in earlier steps); pending_block is the eta inputs this step labels
// (fewer in a final partial block); pseudo_labels covers every target
// labeled once the step's action is applied; state_loss is
// |f_n(x_c) - y_c| for the model trained this step.
struct IterationState {
    std::size_t step = 0;
    Dataset labeled_pool;
    Matrix pending_block;
    std::vector<double> pseudo_labels;
    double state_loss = 0.0;
};

struct SelfLabelingRun {
    std::vector<double> predictions;  // one per target, in target order
    std::vector<IterationState> states;
};

// train once on source + calibration, predict every target
std::vector<double> run_baseline(const DomainPair& pair, const MlpSpec& base);

// ISDA: pseudo-label eta targets per step, labels fixed once assigned.
// Requires cfg.renew == false.
SelfLabelingRun run_isda(const DomainPair& pair, const AdaptationConfig& cfg);

// Re-ISDA: every iteration re-predicts all targets added so far and
// rebuilds the pool from the original source + calibration. Requires
// cfg.renew == true.
SelfLabelingRun run_re_isda(const DomainPair& pair, const AdaptationConfig& cfg);

// dispatch on cfg.renew
SelfLabelingRun run_self_labeling(const DomainPair& pair, const AdaptationConfig& cfg);

// the per-state calibration losses r_n
std::vector<double> loss_trace(const std::vector<IterationState>& states);

// k(x, y) = exp(-|x - y|^2 / (2 sigma^2)), rows of a vs rows of b
Matrix gaussian_kernel_matrix(const Matrix& a, const Matrix& b, double sigma);

// empirical squared MMD between two row sets under the Gaussian kernel
double kernel_mmd_squared(const Matrix& a, const Matrix& b, double sigma);

// KMM: importance weights for the source rows minimizing the kernel
// mean discrepancy to the target rows, under box and mean constraints.
std::vector<double> kmm_weights(const Matrix& source_inputs, const Matrix& target_inputs,
                                const KmmConfig& cfg);

struct TcaEmbedding {
    Matrix new_source;  // q x m
    Matrix new_target;  // p x m
};

// TCA: latent components of the pooled kernel minimizing the MMD between
// the two domains; solves the generalized eigenproblem
// (KLK + mu I) w = (1/lambda) KHK w and keeps the m leading components.
TcaEmbedding tca_transform(const Matrix& source_inputs, const Matrix& target_inputs,
                           const TcaConfig& cfg);

struct OracleResult {
    std::vector<double> best_labels;
    double min_total_loss = 0.0;
};

// Total dynamic-programming loss of one fixed label assignment: for every
// block prefix, train the base learner fresh on source + calibration +
// labeled prefix and accumulate its calibration error.
struct AssignmentLoss {
    std::vector<double> per_state;
    double total = 0.0;
};
AssignmentLoss assignment_total_loss(const DomainPair& pair, const AdaptationConfig& cfg,
                                     const std::vector<double>& labels);

// Exhaustive minimization of the assignment loss over label_grid^p. Only
// viable on tiny instances; the budget (grid size)^p <= 1e6 is enforced.
OracleResult dp_exhaustive_oracle(const DomainPair& pair, const AdaptationConfig& cfg,
                                  const std::vector<double>& label_grid);

// index of the model with the smallest calibration error, ties toward the
// lowest index
std::size_t select_source_model(const std::vector<MlpModel>& models,
                                const LabeledSample& calibration);

}  // namespace reisda
