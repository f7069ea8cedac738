#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "foxann/fox.hpp"
#include "foxann/matrix.hpp"
#include "foxann/mlp.hpp"

namespace foxann::trainers {

enum class LossMode {
    kMean,     // sum of squared residuals / (samples * classes); reporting default
    kHalfSum,  // 0.5 * sum of squared residuals; the delta-rule derivation form
};

enum class ModelKind { kFoxann, kAnnBackprop, kLogreg };

struct TrainConfig {
    std::size_t epochs = 100;
    double weight_low = -3.0;
    double weight_high = 3.0;
    std::size_t population_size = 30;  // FOXANN only
    double learning_rate = 0.1;        // backprop / logistic regression only
    std::uint64_t seed = 0;
    LossMode loss_mode = LossMode::kMean;  // trace reporting for gradient trainers
    fox::ASchedule a_schedule = fox::ASchedule::kDecreasing;

    void validate() const;
};

struct EpochTrace {
    std::vector<double> train_loss;
    std::vector<double> val_loss;

    // "epoch,train_loss,val_loss" with one row per epoch
    void save_csv(const std::filesystem::path& path) const;
};

// Multinomial logistic regression parameters: scores = W^T x + b.
struct LinearModel {
    Matrix weights;  // n_features x n_classes
    std::vector<double> bias;

    std::vector<double> scores(std::span<const double> input) const;
    std::vector<double> probabilities(std::span<const double> input) const;  // softmax
    std::size_t predict(std::span<const double> input) const;

    bool operator==(const LinearModel&) const = default;
};

struct TrainedModel {
    ModelKind kind = ModelKind::kFoxann;
    std::variant<mlp::Network, LinearModel> parameters;
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;

    std::size_t predict(std::span<const double> input) const;
};

// A (sub)set of samples ready for training: scaled features, one-hot targets
// and the raw integer labels.
struct LabeledData {
    Matrix features;
    Matrix targets;  // N x C one-hot
    std::vector<int> labels;

    std::size_t n_samples() const { return features.rows; }
};

// Sum-of-squares error between one-hot targets and network outputs.
double loss(const Matrix& targets, const Matrix& outputs, LossMode mode);

// Mean-mode MSE of the network (given by its flat weights) over a sample set.
// Pure; safe to evaluate concurrently.
double foxann_objective(std::span<const double> weights, const mlp::Topology& topology,
                        const Matrix& features, const Matrix& targets);

// Trains the network by running the FOX optimizer over the flat weight vector
// against the training MSE; one epoch is one full population update. The
// trace records the best-so-far training loss and the validation loss of the
// incumbent best weights at every epoch.
std::pair<TrainedModel, EpochTrace> train_foxann(const LabeledData& train,
                                                 const LabeledData& val,
                                                 const mlp::Topology& topology,
                                                 const TrainConfig& cfg);

// Online backpropagation: per epoch, visits the training samples in a seeded
// shuffled order and applies the delta-rule update to every layer.
std::pair<TrainedModel, EpochTrace> train_backprop(const LabeledData& train,
                                                   const LabeledData& val,
                                                   const mlp::Topology& topology,
                                                   const TrainConfig& cfg);

// Multinomial logistic regression via full-batch gradient descent on the
// cross-entropy loss. Traces record the MSE of the predicted probabilities
// against the one-hot targets so the curves are comparable across models.
std::pair<TrainedModel, EpochTrace> train_logreg(const LabeledData& train,
                                                 const LabeledData& val,
                                                 std::size_t n_classes,
                                                 const TrainConfig& cfg);

// Gradient of the per-sample half-sum loss with respect to the flat weight
// vector, in the canonical layout. This is the quantity the backprop update
// steps along; the test suite checks it against finite differences.
std::vector<double> backprop_gradient(const mlp::Network& network,
                                      std::span<const double> input,
                                      std::span<const double> target);

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

}  // namespace foxann::trainers
