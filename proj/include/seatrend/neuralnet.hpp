#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "seatrend/grid.hpp"
#include "seatrend/matrix.hpp"

namespace seatrend {

// Fully connected regression net: relu hidden layers, linear output, one
// dropout layer. Dropout uses the inverted convention (activations divided by
// the keep probability at drop time), so deterministic inference needs no
// rescaling.
struct Mlp {
    std::vector<int> layer_sizes;             // [in, hidden..., 1]
    std::vector<Matrix> weights;              // weights[l] is [out_l x in_l]
    std::vector<std::vector<double>> biases;  // biases[l] has out_l entries
    double dropout_rate = 0.0;
    int dropout_layer = 0; // hidden-layer index (0 = first hidden)

    int input_dim() const { return layer_sizes.front(); }
    int n_weight_layers() const { return static_cast<int>(weights.size()); }
    std::size_t parameter_count() const;
};

// Zero-initialized net with the given hidden sizes and a single output.
Mlp make_mlp(int input_dim, const std::vector<int>& hidden, double dropout_rate = 0.0,
             int dropout_layer = 0);

// He-style init: weights ~ N(0, 2/fan_in), biases zero.
void init_weights(Mlp& m, std::uint64_t seed);

// Min-max [0,1] normalization for feature columns and the label.
struct Scaler {
    std::vector<double> x_min, x_max;
    double y_min = 0.0, y_max = 1.0;
    bool fitted = false;

    void fit(const Matrix& X, std::span<const double> y);
    Matrix transform_features(const Matrix& X) const;
    std::vector<double> transform_labels(std::span<const double> y) const;
    double transform_label(double y) const;
    double inverse_label(double y_scaled) const;
    double label_range() const { return y_max - y_min; }
};

// Fit on raw data and return the scaled copies alongside the scaler.
struct ScaledData {
    Scaler scaler;
    Matrix X;
    std::vector<double> y;
};
ScaledData scaler_fit_transform(const Matrix& X_raw, std::span<const double> y_raw);

struct TrainConfig {
    double learning_rate = 1e-3;
    int epochs = 500;
    int batch_size = 64;
    double l2 = 5e-6;
    double dropout = 0.2;
    std::uint64_t seed = 0;
    int patience = 50;          // early stopping; 0 disables
    double val_fraction = 0.1;  // held-out share when patience > 0
};

struct TrainingSet {
    Matrix X;              // [points x features], scaled
    std::vector<double> y; // scaled labels
    LatWeights w;          // per-point area weights
};

// Deterministic forward pass (dropout inactive).
double forward(const Mlp& m, std::span<const double> x);
std::vector<double> forward_batch(const Mlp& m, const Matrix& X);

// Stochastic forward pass: units of the designated hidden layer are zeroed
// independently with probability dropout_rate, survivors scaled by 1/(1-p).
double forward_dropout(const Mlp& m, std::span<const double> x, std::mt19937_64& rng);

// Area-weighted mean squared error: sum(w r^2)/sum(w).
double weighted_mse(const Mlp& m, const TrainingSet& batch);

// Training objective: weighted MSE plus l2 * sum of squared weights
// (biases excluded).
double loss(const Mlp& m, const TrainingSet& batch, double l2);

struct Gradients {
    std::vector<Matrix> w;
    std::vector<std::vector<double>> b;
};

// Exact gradient of loss() by backpropagation (dropout inactive).
Gradients gradients(const Mlp& m, const TrainingSet& batch, double l2);

struct TrainResult {
    Mlp model;
    std::vector<double> history;     // mean minibatch objective per epoch
    std::vector<double> val_history; // empty when early stopping is off
    int best_epoch = -1;             // epoch restored by early stopping
};

// Minibatch Adam on loss() with dropout active. Deterministic given
// cfg.seed; the input parameters are the starting point (not re-initialized).
TrainResult train(const Mlp& m, const TrainingSet& data, const TrainConfig& cfg);

// One architecture + hyperparameter combination for model selection.
struct Candidate {
    std::vector<int> hidden;
    TrainConfig cfg;
};

struct KFoldReport {
    int best_index = 0;
    Matrix fold_scores;              // [candidates x k] validation weighted MSE
    std::vector<double> mean_scores; // per candidate
};

// Shuffle once with seed, split into k near-equal folds, score every
// candidate by mean validation weighted MSE; ties keep the earlier candidate.
KFoldReport kfold_select(const std::vector<Candidate>& candidates, const TrainingSet& data,
                         int k, std::uint64_t seed);

// Hidden sizes by cluster share: clusters holding at least a quarter of all
// ocean points get the large stack, the rest the small one.
std::vector<int> default_architecture(std::size_t cluster_size, std::size_t total_points);

} // namespace seatrend
